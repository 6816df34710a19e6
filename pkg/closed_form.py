"""Analytic wavefunction, velocity fields, quantum forces and eta(t) curves.

Every function is vectorised: positions and times may be numpy arrays that
broadcast against each other. All velocity and force fields of this state
family are linear in the positions. In the centre-of-mass and relative
coordinates U = (x1 + x2)/sqrt(2), W = (x1 - x2)/sqrt(2) each scenario splits
into two independent single-mode problems, which is how the dissipative
expressions below are organised.

Exponentials of gamma*t are always divided out, so nothing overflows at large
t, and every (1 - exp(-k*gamma*t)) goes through expm1 so the small-gamma
limit keeps its digits.
"""
import logging
from typing import List, NamedTuple, Tuple

import numpy as np

from core import (ArrayLike, ConfigPoint, DegenerateError, DomainError, NumericalError, PhysParams,
                  check_mu)

logger = logging.getLogger(__name__)

UNDERFLOW = 1e-300


class VelocityPair(NamedTuple):
    v1: ArrayLike
    v2: ArrayLike


class ForcePair(NamedTuple):
    f1: ArrayLike
    f2: ArrayLike


def _divide(num, den, what: str):
    den = np.asarray(den, dtype=float)
    if np.any(np.abs(den) < UNDERFLOW):
        raise NumericalError(f"denominator of {what} underflowed below {UNDERFLOW:g}")
    return np.asarray(num) / den


def _scalar(value):
    value = np.asarray(value)
    return value.item() if value.ndim == 0 else value


def _require_bath(params: PhysParams, what: str):
    if params.gamma <= 0:
        raise DomainError(f"{what} needs gamma > 0; use the unitary expressions for gamma = 0")


# ---------------------------------------------------------------------------
# Unitary evolution
# ---------------------------------------------------------------------------

def psi_sch(p: ConfigPoint, mu: float) -> complex:
    """Two-particle wavefunction under free evolution.

    Args:
        p: Configuration point (x1, x2, t)
        mu: Squeezing decay factor in (0, 1]

    Returns:
        Complex amplitude, principal branch of the square-root prefactor
    """
    mu = check_mu(mu)
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    prefactor = np.sqrt(mu / (np.pi * (mu + 1j * (mu * mu + 1.0) * t - mu * t * t)))
    exponent = (2j * mu * t * (x1 * x1 + x2 * x2) + mu * mu * (x1 + x2) ** 2 + (x1 - x2) ** 2) \
        / (4.0 * (t - 1j * mu) * (mu * t - 1j))
    return _scalar(prefactor * np.exp(exponent))


def _sch_widths(t, mu):
    """Squared width growth factors of the centre-of-mass and relative modes."""
    return 1.0 + mu * mu * t * t, mu * mu + t * t


def v_sch(p: ConfigPoint, mu: float) -> VelocityPair:
    """Bohmian velocities (v1, v2) under unitary evolution."""
    mu = check_mu(mu)
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    a, b = _sch_widths(t, mu)
    c_sum = mu * mu * t / a
    c_diff = t / b
    v1 = 0.5 * (c_sum * (x1 + x2) + c_diff * (x1 - x2))
    v2 = 0.5 * (c_sum * (x1 + x2) + c_diff * (x2 - x1))
    return VelocityPair(_scalar(v1), _scalar(v2))


def traj_sch(t: ArrayLike, x10: ArrayLike, x20: ArrayLike, mu: float) -> Tuple[ArrayLike, ArrayLike]:
    """Positions (X1, X2) at time t of the trajectory starting at (x10, x20)."""
    mu = check_mu(mu)
    t = np.asarray(t, dtype=float)
    a, b = _sch_widths(t, mu)
    grow_sum = np.sqrt(a)
    grow_diff = np.sqrt(b) / mu
    s = np.asarray(x10, dtype=float) + np.asarray(x20, dtype=float)
    d = np.asarray(x10, dtype=float) - np.asarray(x20, dtype=float)
    return _scalar(0.5 * (s * grow_sum + d * grow_diff)), _scalar(0.5 * (s * grow_sum - d * grow_diff))


def v_sch_along(t: ArrayLike, x10: ArrayLike, x20: ArrayLike, mu: float) -> VelocityPair:
    mu = check_mu(mu)
    t = np.asarray(t, dtype=float)
    a, b = _sch_widths(t, mu)
    s = np.asarray(x10, dtype=float) + np.asarray(x20, dtype=float)
    d = np.asarray(x10, dtype=float) - np.asarray(x20, dtype=float)
    sum_part = s * mu * mu * t / np.sqrt(a)
    diff_part = d * t / (mu * np.sqrt(b))
    return VelocityPair(_scalar(0.5 * (sum_part + diff_part)), _scalar(0.5 * (sum_part - diff_part)))


def q_sch(p: ConfigPoint, mu: float) -> ArrayLike:
    """Quantum potential of the unitary state at (x1, x2, t)."""
    mu = check_mu(mu)
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    a, b = _sch_widths(t, mu)
    q = 0.5 * mu * (1.0 / a + 1.0 / b) \
        - mu * mu * (x1 + x2) ** 2 / (4.0 * a * a) \
        - mu * mu * (x1 - x2) ** 2 / (4.0 * b * b)
    return _scalar(q)


def q_sch_along(t: ArrayLike, x10: ArrayLike, x20: ArrayLike, mu: float) -> ArrayLike:
    x1, x2 = traj_sch(t, x10, x20, mu)
    return q_sch(ConfigPoint(x1, x2, t), mu)


def f_qm_sch(p: ConfigPoint, mu: float) -> ForcePair:
    """Quantum forces -dQ/dx1, -dQ/dx2 of the unitary state."""
    mu = check_mu(mu)
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    a, b = _sch_widths(t, mu)
    sum_part = mu * mu * (x1 + x2) / (2.0 * a * a)
    diff_part = mu * mu * (x1 - x2) / (2.0 * b * b)
    return ForcePair(_scalar(sum_part + diff_part), _scalar(sum_part - diff_part))


def f_qm_sch_along(t: ArrayLike, x10: ArrayLike, x20: ArrayLike, mu: float) -> ForcePair:
    mu = check_mu(mu)
    t = np.asarray(t, dtype=float)
    a, b = _sch_widths(t, mu)
    s = np.asarray(x10, dtype=float) + np.asarray(x20, dtype=float)
    d = np.asarray(x10, dtype=float) - np.asarray(x20, dtype=float)
    sum_part = mu * mu * s / (2.0 * a ** 1.5)
    diff_part = mu * d / (2.0 * b ** 1.5)
    return ForcePair(_scalar(sum_part + diff_part), _scalar(sum_part - diff_part))


def eta_sch(t: ArrayLike, mu: float) -> ArrayLike:
    """Nonlocality measure |dv1/dx2| under unitary evolution."""
    mu = check_mu(mu)
    t = np.asarray(t, dtype=float)
    a, b = _sch_widths(t, mu)
    return _scalar((1.0 - mu ** 4) * t / (2.0 * a * b))


def eta_sch_peak(mu: float) -> Tuple[float, float]:
    """Time and height of the unitary eta maximum.

    Raises:
        DegenerateError: If mu == 1, where eta vanishes for all t
    """
    mu = check_mu(mu)
    if mu == 1.0:
        raise DegenerateError("eta vanishes identically for mu = 1; there is no peak")
    mu4 = mu ** 4
    t_max = float(np.sqrt((np.sqrt(mu4 * mu4 + 14.0 * mu4 + 1.0) - 1.0 - mu4) / (6.0 * mu * mu)))
    return t_max, float(eta_sch(t_max, mu))


def eta_sch_max_curve(mus) -> List[Tuple[float, float, float]]:
    """(mu, t_max, eta_max) rows over a grid of squeezing factors below 1."""
    return [(float(mu),) + eta_sch_peak(mu) for mu in mus]


# ---------------------------------------------------------------------------
# Caldeira-Leggett baths
# ---------------------------------------------------------------------------

def _kk(y):
    """-expm1(-2y) + 4 expm1(-y) + 2y, with its Taylor series near zero."""
    y = np.asarray(y, dtype=float)
    direct = -np.expm1(-2.0 * y) + 4.0 * np.expm1(-y) + 2.0 * y
    series = y ** 3 * (2.0 / 3.0 + y * (-0.5 + y * (7.0 / 30.0 + y * (-1.0 / 12.0 + y * 31.0 / 1260.0))))
    return np.where(y < 1e-3, series, direct)


def _mode_denominator(rate, diffusion, m, t):
    om = -np.expm1(-rate * t)
    return rate ** 3 / 2.0 + (rate / 2.0) * m * m * om * om + m * diffusion * _kk(rate * t)


def _mode_coeff(rate, diffusion, m, t, what: str):
    """Velocity coefficient v = c(t) * q of one dissipative Gaussian mode.

    Args:
        rate: Momentum damping rate of the mode
        diffusion: Momentum diffusion constant of the mode
        m: Inverse initial squared width of the mode, in units of 1/2
        t: Time
    """
    t = np.asarray(t, dtype=float)
    om = -np.expm1(-rate * t)
    num = rate * m * om * (rate * m * np.exp(-rate * t) / 2.0 + diffusion * om)
    return _divide(num, _mode_denominator(rate, diffusion, m, t), what)


def _common_coeffs(t, params: PhysParams):
    """Centre-of-mass and relative velocity coefficients for a shared bath.

    The relative coordinate never couples to a common bath, so it evolves freely.
    """
    t = np.asarray(t, dtype=float)
    mu = params.mu
    c_sum = _mode_coeff(4.0 * params.gamma, 2.0 * params.diffusion, mu, t, 'the common-bath velocity field')
    c_diff = t / (mu * mu + t * t)
    return c_sum, c_diff


def v_common(p: ConfigPoint, params: PhysParams) -> VelocityPair:
    """Bohmian velocities when both particles share one thermal bath.

    Raises:
        DomainError: If gamma == 0
        NumericalError: If the denominator underflows
    """
    _require_bath(params, 'v_common')
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    c_sum, c_diff = _common_coeffs(t, params)
    v1 = 0.5 * (c_sum * (x1 + x2) + c_diff * (x1 - x2))
    v2 = 0.5 * (c_sum * (x1 + x2) + c_diff * (x2 - x1))
    return VelocityPair(_scalar(v1), _scalar(v2))


def f_qm_common_first_order(p: ConfigPoint, params: PhysParams) -> ForcePair:
    """Common-bath quantum forces to first order in gamma."""
    x1, x2, t = (np.asarray(v, dtype=float) for v in (p.x1, p.x2, p.t))
    mu = params.mu
    base = f_qm_sch(ConfigPoint(x1, x2, t), mu)
    mt2 = mu * mu * t * t
    bracket = -mu + (2.0 / 3.0) * (mt2 * mt2 + 2.0 * mt2 + 3.0) * params.temperature
    correction = params.gamma * 4.0 * mu * (x1 + x2) * t / (mt2 + 1.0) ** 3 * bracket
    return ForcePair(_scalar(base.f1 + correction), _scalar(base.f2 + correction))


def v_distinct_mu1(x: ArrayLike, t: ArrayLike, params: PhysParams) -> ArrayLike:
    """Velocity of either particle for an unsqueezed state in distinct baths.

    Raises:
        DomainError: If mu != 1 or gamma == 0
    """
    if params.mu != 1.0:
        raise DomainError(f"v_distinct_mu1 applies to mu = 1 only, got mu={params.mu}; "
                          "use the moment engine for squeezed states")
    _require_bath(params, 'v_distinct_mu1')
    coeff = _mode_coeff(2.0 * params.gamma, params.diffusion, 1.0, t, 'the distinct-bath velocity field')
    return _scalar(coeff * np.asarray(x, dtype=float))


def eta_common(t: ArrayLike, params: PhysParams) -> ArrayLike:
    """Nonlocality measure for a shared bath."""
    _require_bath(params, 'eta_common')
    c_sum, c_diff = _common_coeffs(t, params)
    return _scalar(0.5 * np.abs(c_sum - c_diff))


def eta_distinct(t: ArrayLike, params: PhysParams) -> ArrayLike:
    """Nonlocality measure for independent baths; identically zero at mu = 1."""
    _require_bath(params, 'eta_distinct')
    t = np.asarray(t, dtype=float)
    g, d, mu = params.gamma, params.diffusion, params.mu
    e2 = np.exp(-2.0 * g * t)
    om2 = -np.expm1(-2.0 * g * t)
    kk = _kk(2.0 * g * t)
    den_diff = 4.0 * g ** 3 * mu * mu + g * om2 * om2 + mu * d * kk
    den_sum = 4.0 * g ** 3 + g * mu * mu * om2 * om2 + mu * d * kk
    bracket = 2.0 * g * (g * g * (mu * mu + 1.0) * e2 + g * d * mu * om2 + d * mu * t * e2) \
        + d * mu * np.expm1(-4.0 * g * t) / 2.0
    num = 4.0 * g * g * (mu * mu - 1.0) * (om2 / 2.0) * bracket
    return _scalar(np.abs(_divide(num, den_diff * den_sum, 'the distinct-bath eta')))
