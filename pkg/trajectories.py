"""Bohmian trajectory integration, Born-rule sampling and consistency checks."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

import gaussian_engine as ge
from core import BohmflowError, NumericalError, ParameterError, PhysParams, Scenario, check_mu
from integrators import runge_kutta4
from providers.base import VelocityField

logger = logging.getLogger(__name__)

HALVING_TOLERANCE = 1e-8
CROSSING_THRESHOLD = 1e-9
GRID_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One integral curve of the velocity field.

    Attributes:
        times: Strictly increasing grid starting at 0
        x1, x2: Positions on the grid
        v1, v2: Field velocities at those positions and times
        x10, x20: Initial positions
    """
    times: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    x10: float
    x20: float
    scenario: Scenario
    params: PhysParams

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x1, self.x2])

    @property
    def velocities(self) -> np.ndarray:
        return np.column_stack([self.v1, self.v2])


@dataclass(frozen=True, eq=False)
class InitialEnsemble:
    """Initial positions drawn from |psi_0|^2 with a seeded PCG64 generator."""
    pairs: np.ndarray
    seed: int
    mu: float

    def __len__(self):
        return len(self.pairs)


class NewtonReport(NamedTuple):
    times: np.ndarray
    residual1: np.ndarray
    residual2: np.ndarray

    @property
    def max_abs(self) -> float:
        if len(self.times) == 0:
            return 0.0
        return float(max(np.max(np.abs(self.residual1)), np.max(np.abs(self.residual2))))


class Crossing(NamedTuple):
    first: int
    second: int
    t: float
    distance: float


@dataclass
class CrossingReport:
    pairs_checked: int = 0
    min_distance: float = math.inf
    violations: List[Crossing] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def time_grid(t_end: float, dt: float) -> np.ndarray:
    """Uniform grid 0..t_end with spacing dt.

    Raises:
        ParameterError: If dt or t_end is invalid, or t_end is not a whole number of steps
    """
    if not (dt > 0 and math.isfinite(dt)):
        raise ParameterError(f"dt must be positive, got {dt}")
    if not (t_end >= 0 and math.isfinite(t_end)):
        raise ParameterError(f"t_end must be non-negative, got {t_end}")
    ratio = t_end / dt
    n = int(round(ratio))
    if n == 0 and t_end > 0:
        raise ParameterError(f"dt={dt} is larger than t_end={t_end}")
    if abs(ratio - n) > GRID_RTOL * max(1.0, ratio):
        raise ParameterError(f"t_end={t_end} is not a multiple of dt={dt}; the grid would end at {n * dt:g}")
    return np.arange(n + 1) * dt


def _evaluate(field: VelocityField, x1: np.ndarray, x2: np.ndarray, t: float) -> np.ndarray:
    try:
        v = np.array(field.velocity(x1, x2, t), dtype=float)
    except BohmflowError:
        raise
    except (ArithmeticError, linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"velocity evaluation failed at t={t:g}: {e}") from e
    if not np.all(np.isfinite(v)):
        raise NumericalError(f"velocity field is not finite at t={t:g}")
    return v


def _run(field: VelocityField, y0: np.ndarray, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """RK4 on a fixed grid; y0 has shape (2, k). Returns positions and velocities (n, 2, k)."""
    ys = np.empty((len(times),) + y0.shape)
    vs = np.empty_like(ys)
    ys[0] = y0

    def rhs(y, t):
        return _evaluate(field, y[0], y[1], t)

    for i in range(len(times) - 1):
        vs[i] = rhs(ys[i], times[i])
        ys[i + 1] = runge_kutta4(ys[i], times[i], times[i + 1] - times[i], rhs)
    vs[-1] = rhs(ys[-1], times[-1])
    return ys, vs


def integrate_many(field: VelocityField, x10s: Sequence[float], x20s: Sequence[float], t_end: float, dt: float,
                   validate: bool = False) -> List[Trajectory]:
    """Integrate several initial points in one vectorised RK4 pass.

    Args:
        field: Velocity provider
        x10s, x20s: Initial positions, same length
        t_end: Final time
        dt: Step size
        validate: Re-run with dt/2 and require agreement below 1e-8

    Returns:
        Trajectories in input order

    Raises:
        ParameterError: On bad grid or mismatched inputs
        NumericalError: If a velocity evaluation fails or the step-halving check fails
    """
    x10s = np.atleast_1d(np.asarray(x10s, dtype=float))
    x20s = np.atleast_1d(np.asarray(x20s, dtype=float))
    if x10s.shape != x20s.shape or x10s.ndim != 1:
        raise ParameterError("x10 and x20 must be equal-length 1-D sequences")
    times = time_grid(t_end, dt)
    y0 = np.vstack([x10s, x20s])
    ys, vs = _run(field, y0, times)

    if validate and len(times) > 1:
        fine_times = np.linspace(0.0, times[-1], 2 * (len(times) - 1) + 1)
        fine, _ = _run(field, y0, fine_times)
        change = float(np.max(np.abs(fine[::2] - ys)))
        if change >= HALVING_TOLERANCE:
            raise NumericalError(f"trajectory changed by {change:.3e} when halving dt={dt}; reduce dt")
        logger.debug("Step-halving check passed (change %.3e)", change)

    return [
        Trajectory(times=times, x1=ys[:, 0, k].copy(), x2=ys[:, 1, k].copy(), v1=vs[:, 0, k].copy(),
                   v2=vs[:, 1, k].copy(), x10=float(x10s[k]), x20=float(x20s[k]),
                   scenario=field.scenario, params=field.params)
        for k in range(len(x10s))
    ]


def integrate(field: VelocityField, x10: float, x20: float, t_end: float, dt: float,
              validate: bool = False) -> Trajectory:
    """Integrate the guidance equation from (x10, x20) up to t_end with fixed-step RK4."""
    return integrate_many(field, [x10], [x20], t_end, dt, validate=validate)[0]


def integrate_ensemble(field: VelocityField, pairs: np.ndarray, t_end: float, dt: float, workers: int = 1,
                       chunk_size: int = 256) -> List[Trajectory]:
    """Integrate many initial points in chunks, optionally on a thread pool.

    Results come back in the order of pairs regardless of completion order.
    """
    pairs = np.asarray(pairs, dtype=float).reshape(-1, 2)
    chunks = [pairs[i:i + chunk_size] for i in range(0, len(pairs), chunk_size)]

    def run(chunk):
        return integrate_many(field, chunk[:, 0], chunk[:, 1], t_end, dt)

    if workers <= 1 or len(chunks) <= 1:
        results = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, chunks))
    return [traj for chunk in results for traj in chunk]


def sample_initial(mu: float, n: int, seed: int) -> InitialEnsemble:
    """Draw n initial position pairs from the Born distribution of the initial state."""
    mu = check_mu(mu)
    if int(n) != n or n < 1:
        raise ParameterError(f"ensemble size must be a positive integer, got {n}")
    cov = ge.initial_moments(mu).position_cov
    chol = linalg.cholesky(cov, lower=True)
    rng = np.random.default_rng(seed)
    pairs = rng.standard_normal((int(n), 2)) @ chol.T
    return InitialEnsemble(pairs=pairs, seed=seed, mu=mu)


def newton_residual(traj: Trajectory, scenario: Scenario, params: PhysParams,
                    force_field: VelocityField) -> NewtonReport:
    """Residual of dv/dt = F - 2*gamma*v_i (- 2*gamma*v_j for a common bath) along a trajectory.

    The acceleration is the five-point central difference of the recorded
    velocities, so the report covers the interior points times[2:-2]; the
    forces come from force_field.quantum_force.
    """
    if len(traj.times) < 5:
        raise ParameterError("newton_residual needs at least five time points")
    dt = np.diff(traj.times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
        raise ParameterError("newton_residual needs a uniform time grid")
    scenario = Scenario.parse(scenario)
    params = params.for_scenario(scenario)
    two_gamma = 2.0 * params.gamma

    def accel(v):
        return (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * dt[0])

    inner = slice(2, -2)
    times = traj.times[inner]
    x1, x2 = traj.x1[inner], traj.x2[inner]
    v1, v2 = traj.v1[inner], traj.v2[inner]
    f1 = np.empty_like(times)
    f2 = np.empty_like(times)
    for i, t in enumerate(times):
        f = force_field.quantum_force(x1[i], x2[i], float(t))
        f1[i], f2[i] = float(f[0]), float(f[1])

    expected1 = f1 - two_gamma * v1
    expected2 = f2 - two_gamma * v2
    if scenario is Scenario.COMMON_BATH:
        expected1 = expected1 - two_gamma * v2
        expected2 = expected2 - two_gamma * v1
    return NewtonReport(times, accel(traj.v1) - expected1, accel(traj.v2) - expected2)


def non_crossing_check(trajs: Sequence[Trajectory], threshold: float = CROSSING_THRESHOLD) -> CrossingReport:
    """Check that distinct trajectories never meet in (X1, X2) configuration space.

    Trajectories that start from the same point are the same trajectory and
    are skipped. A single coordinate coinciding is not a crossing.
    """
    report = CrossingReport()
    if len(trajs) < 2:
        return report
    times = trajs[0].times
    for traj in trajs[1:]:
        if not np.array_equal(traj.times, times):
            raise ParameterError("non_crossing_check needs trajectories on a shared time grid")

    x1 = np.vstack([t.x1 for t in trajs])
    x2 = np.vstack([t.x2 for t in trajs])
    for i in range(len(trajs) - 1):
        for j in range(i + 1, len(trajs)):
            if trajs[i].x10 == trajs[j].x10 and trajs[i].x20 == trajs[j].x20:
                continue
            dist = np.hypot(x1[i] - x1[j], x2[i] - x2[j])
            k = int(np.argmin(dist))
            report.pairs_checked += 1
            report.min_distance = min(report.min_distance, float(dist[k]))
            if dist[k] <= threshold:
                report.violations.append(Crossing(i, j, float(times[k]), float(dist[k])))
                logger.warning("Trajectories %d and %d meet at t=%g (distance %.3e)", i, j, times[k], dist[k])
    return report
