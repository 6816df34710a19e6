"""Fixed-step fourth-order Runge-Kutta integration."""
import logging
import math
from typing import Callable

import numpy as np

from core import NumericalError, ParameterError

logger = logging.getLogger(__name__)

Derivative = Callable[[np.ndarray, float], np.ndarray]


def runge_kutta4(y: np.ndarray, t: float, dt: float, f: Derivative) -> np.ndarray:
    """Advance y(t) by one classical RK4 step of size dt for dy/dt = f(y, t)."""
    k1 = dt * f(y, t)
    k2 = dt * f(y + 0.5 * k1, t + 0.5 * dt)
    k3 = dt * f(y + 0.5 * k2, t + 0.5 * dt)
    k4 = dt * f(y + k3, t + dt)
    return y + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def integrate_fixed(f: Derivative, y0: np.ndarray, t0: float, t1: float, n_steps: int) -> np.ndarray:
    """Integrate from t0 to t1 in n_steps equal RK4 steps and return y(t1)."""
    if n_steps < 1:
        raise ParameterError(f"n_steps must be at least 1, got {n_steps}")
    y = np.array(y0, dtype=float)
    dt = (t1 - t0) / n_steps
    for i in range(n_steps):
        y = runge_kutta4(y, t0 + i * dt, dt, f)
    return y


def integrate_converged(f: Derivative, y0: np.ndarray, t0: float, t1: float,
                        initial_step: float = 0.05, rtol: float = 1e-10, max_halvings: int = 20) -> np.ndarray:
    """Integrate with RK4, halving the step until two successive results agree.

    Args:
        f: Right-hand side f(y, t)
        y0: State at t0
        t0: Start time
        t1: End time (t1 >= t0)
        initial_step: Largest step tried
        rtol: Agreement threshold, relative to max(1, max|y|)
        max_halvings: Give up after this many halvings

    Returns:
        State at t1 from the finest run

    Raises:
        NumericalError: If the results do not settle or become non-finite
    """
    y0 = np.array(y0, dtype=float)
    span = t1 - t0
    if span < 0:
        raise ParameterError(f"end time {t1} precedes start time {t0}")
    if span == 0:
        return y0
    n_steps = max(1, math.ceil(span / initial_step))
    previous = integrate_fixed(f, y0, t0, t1, n_steps)
    for _ in range(max_halvings):
        n_steps *= 2
        current = integrate_fixed(f, y0, t0, t1, n_steps)
        if not np.all(np.isfinite(current)):
            raise NumericalError(f"RK4 solution became non-finite on [{t0}, {t1}]")
        scale = max(1.0, float(np.max(np.abs(current))))
        change = float(np.max(np.abs(current - previous)))
        if change < rtol * scale:
            logger.debug("RK4 converged on [%g, %g] with %d steps (change %.3e)", t0, t1, n_steps, change)
            return current
        previous = current
    raise NumericalError(f"RK4 step halving did not converge on [{t0}, {t1}] after {max_halvings} halvings")
