"""Gaussian phase-space propagator for the two-particle Caldeira-Leggett dynamics.

The state is carried as its Wigner mean and covariance in the ordering
(x1, p1, x2, p2). Under the high-temperature master equation these obey a
linear drift/diffusion (Lyapunov) equation, so a Gaussian state stays Gaussian
and its position-space density matrix, velocity field and quantum force can be
rebuilt exactly from the moments at any time.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Tuple

import numpy as np
from scipy import linalg

from core import ArrayLike, NumericalError, ParameterError, PhysParams, Scenario, check_mu
from integrators import integrate_converged

logger = logging.getLogger(__name__)

X = [0, 2]
P = [1, 3]
MAX_CONDITION = 1e12
INITIAL_STEP = 0.05
STEP_RTOL = 1e-10

# z = (x1, y1, x2, y2) -> centre R = (x + y)/2 and chord r = x - y
_T_CENTRE = np.array([[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]])
_T_CHORD = np.array([[1.0, -1.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0]])
_X_IDX = [0, 2]
_Y_IDX = [1, 3]

# symplectic form for (x1, p1, x2, p2)
_OMEGA = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True, eq=False)
class WignerMoments:
    """Mean 4-vector and symmetric 4x4 covariance at time t."""
    mean: np.ndarray
    cov: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if np.shape(self.mean) != (4,) or np.shape(self.cov) != (4, 4):
            raise ParameterError("Wigner moments need a 4-vector mean and a 4x4 covariance")

    @property
    def position_cov(self) -> np.ndarray:
        return self.cov[np.ix_(X, X)]


@dataclass(frozen=True, eq=False)
class DriftDiffusion:
    """Linear drift matrix F and momentum diffusion matrix of the moment equations."""
    drift: np.ndarray
    diffusion: np.ndarray

    def rhs(self, cov: np.ndarray) -> np.ndarray:
        return self.drift @ cov + cov @ self.drift.T + 2.0 * self.diffusion


@dataclass(frozen=True, eq=False)
class VelocityCoeffs:
    """Matrix V with (v1, v2) = V @ (x1, x2)."""
    matrix: np.ndarray

    def apply(self, x1: ArrayLike, x2: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        v = self.matrix
        return v[0, 0] * x1 + v[0, 1] * x2, v[1, 0] * x1 + v[1, 1] * x2

    @property
    def eta(self) -> float:
        """|dv1/dx2|, the trajectory sensitivity of particle 1 to particle 2."""
        return abs(float(self.matrix[0, 1]))


@dataclass(frozen=True, eq=False)
class GaussianKernel:
    """Density matrix rho(z) = exp(-z.M.z/2 + c) with z = (x1, y1, x2, y2)."""
    quad: np.ndarray
    c: complex
    t: float = 0.0

    @staticmethod
    def _stack(x1, y1, x2, y2) -> np.ndarray:
        return np.stack(np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, y1, x2, y2))), axis=-1)

    def log_value(self, x1, y1, x2, y2):
        z = self._stack(x1, y1, x2, y2)
        return -0.5 * np.einsum('...i,ij,...j->...', z, self.quad, z) + self.c

    def evaluate(self, x1, y1, x2, y2):
        """Complex density matrix element rho(x1, x2; y1, y2)."""
        value = np.exp(self.log_value(x1, y1, x2, y2))
        return value.item() if np.ndim(value) == 0 else value

    def amplitude(self, x1, y1, x2, y2):
        value = np.exp(np.real(self.log_value(x1, y1, x2, y2)))
        return value.item() if np.ndim(value) == 0 else value

    def phase(self, x1, y1, x2, y2):
        value = np.imag(self.log_value(x1, y1, x2, y2))
        return value.item() if np.ndim(value) == 0 else value


class PositivityReport(NamedTuple):
    min_cov_eigenvalue: float
    min_uncertainty_eigenvalue: float
    scale: float = 1.0

    @property
    def ok(self) -> bool:
        # pure states sit exactly on the uncertainty boundary
        return self.min_cov_eigenvalue > 0 and self.min_uncertainty_eigenvalue > -1e-8 * self.scale


def initial_moments(mu: float) -> WignerMoments:
    """Moments of the two-mode squeezed vacuum with decay factor mu."""
    mu = check_mu(mu)
    var = (1.0 / mu + mu) / 4.0
    corr = (1.0 / mu - mu) / 4.0
    cov = np.array([
        [var, 0.0, corr, 0.0],
        [0.0, var, 0.0, -corr],
        [corr, 0.0, var, 0.0],
        [0.0, -corr, 0.0, var],
    ])
    return WignerMoments(mean=np.zeros(4), cov=cov, t=0.0)


def drift_diffusion(params: PhysParams, scenario: Scenario) -> DriftDiffusion:
    """Build the moment equations for a scenario.

    dx_i/dt = p_i. Friction acts on the momenta at rate 2*gamma, per particle
    for distinct baths and on the total momentum for a common bath; diffusion D
    enters the momentum block, fully correlated for a common bath.
    """
    scenario = Scenario.parse(scenario)
    params = params.for_scenario(scenario)
    gamma, d = params.gamma, params.diffusion

    drift = np.zeros((4, 4))
    drift[0, 1] = drift[2, 3] = 1.0
    diffusion = np.zeros((4, 4))
    if scenario is Scenario.UNITARY:
        return DriftDiffusion(drift, diffusion)

    drift[1, 1] = drift[3, 3] = -2.0 * gamma
    diffusion[1, 1] = diffusion[3, 3] = d
    if scenario is Scenario.COMMON_BATH:
        drift[1, 3] = drift[3, 1] = -2.0 * gamma
        diffusion[1, 3] = diffusion[3, 1] = d
    return DriftDiffusion(drift, diffusion)


def _check_position_block(cov: np.ndarray, t: float):
    try:
        linalg.cholesky(cov[np.ix_(X, X)], lower=True)
    except linalg.LinAlgError:
        raise NumericalError(f"position covariance lost positive definiteness at t={t:g}") from None


def full_positivity(m: WignerMoments) -> PositivityReport:
    """Smallest eigenvalues of the covariance and of cov + (i/2)*Omega."""
    cov_min = float(np.min(linalg.eigvalsh(m.cov)))
    uncertainty_min = float(np.min(linalg.eigvalsh(m.cov + 0.5j * _OMEGA)))
    return PositivityReport(cov_min, uncertainty_min, max(1.0, float(np.max(np.abs(m.cov)))))


def propagate(m0: WignerMoments, dd: DriftDiffusion, t: float) -> WignerMoments:
    """Evolve moments from m0.t to time t.

    The mean goes through the matrix exponential of the drift; the covariance
    is integrated with RK4, halving the step until successive results agree.

    Raises:
        ParameterError: If t precedes m0.t
        NumericalError: If the position covariance stops being positive definite
    """
    t = float(t)
    span = t - m0.t
    if span < 0:
        raise ParameterError(f"cannot propagate backwards from t={m0.t:g} to t={t:g}")
    if span == 0:
        return m0

    mean = linalg.expm(dd.drift * span) @ m0.mean

    def rhs(flat, _t):
        return dd.rhs(flat.reshape(4, 4)).ravel()

    cov = integrate_converged(rhs, m0.cov.ravel(), m0.t, t, initial_step=INITIAL_STEP, rtol=STEP_RTOL).reshape(4, 4)
    cov = 0.5 * (cov + cov.T)

    _check_position_block(cov, t)
    moments = WignerMoments(mean=mean, cov=cov, t=t)
    report = full_positivity(moments)
    if not report.ok:
        logger.warning("Covariance at t=%g is not a physical state (min eig %.3e, uncertainty min eig %.3e)",
                       t, report.min_cov_eigenvalue, report.min_uncertainty_eigenvalue)
    return moments


def propagate_series(m0: WignerMoments, dd: DriftDiffusion, times: Iterable[float]) -> List[WignerMoments]:
    """Propagate through ascending checkpoints, each leg starting from the previous one."""
    out = []
    current = m0
    for t in times:
        current = propagate(current, dd, t)
        out.append(current)
    return out


def purity(m: WignerMoments) -> float:
    """Tr(rho^2) = 1/sqrt(det(2*cov))."""
    return float(1.0 / np.sqrt(linalg.det(2.0 * m.cov)))


def velocity_coeffs(m: WignerMoments) -> VelocityCoeffs:
    """Velocity field V = cov_px @ inv(cov_xx) of a zero-mean Gaussian state.

    Raises:
        NumericalError: If the position covariance is ill-conditioned
    """
    sxx = m.cov[np.ix_(X, X)]
    cond = np.linalg.cond(sxx)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NumericalError(f"position covariance is ill-conditioned at t={m.t:g} (condition number {cond:.3e})")
    sxp = m.cov[np.ix_(X, P)]
    return VelocityCoeffs(linalg.solve(sxx, sxp, assume_a='pos').T)


def kernel_from_moments(m: WignerMoments) -> GaussianKernel:
    """Position-space density matrix of a zero-mean Gaussian state.

    Conditioned on the centre R, the momentum is Gaussian with mean V R and
    covariance S (the Schur complement), so
    rho = N(R; 0, cov_xx) * exp(i r.V.R - r.S.r/2).

    Raises:
        NumericalError: If the position covariance is not positive definite
    """
    sxx = m.cov[np.ix_(X, X)]
    _check_position_block(m.cov, m.t)
    v = velocity_coeffs(m).matrix
    s = m.cov[np.ix_(P, P)] - v @ m.cov[np.ix_(X, P)]
    s = 0.5 * (s + s.T)
    sxx_inv = linalg.inv(sxx)
    sxx_inv = 0.5 * (sxx_inv + sxx_inv.T)

    real = _T_CENTRE.T @ sxx_inv @ _T_CENTRE + _T_CHORD.T @ s @ _T_CHORD
    cross = _T_CHORD.T @ v @ _T_CENTRE
    quad = real - 1j * (cross + cross.T)
    _sign, logdet = np.linalg.slogdet(2.0 * np.pi * sxx)
    return GaussianKernel(quad=quad, c=complex(-0.5 * logdet), t=m.t)


def kernel_quantum_potential(k: GaussianKernel, x1, y1, x2, y2):
    """Quantum potential -1/2 sum_n (d2/dx_n^2 - d2/dy_n^2) A / A at arbitrary (x, y)."""
    kr = np.real(k.quad)
    z = GaussianKernel._stack(x1, y1, x2, y2)
    kz = z @ kr.T
    q = -0.5 * (np.sum(kz[..., _X_IDX] ** 2, axis=-1) - np.trace(kr[np.ix_(_X_IDX, _X_IDX)])
                - np.sum(kz[..., _Y_IDX] ** 2, axis=-1) + np.trace(kr[np.ix_(_Y_IDX, _Y_IDX)]))
    return q.item() if np.ndim(q) == 0 else q


def force_matrix(k: GaussianKernel) -> np.ndarray:
    """2x2 matrix G with (F1, F2) = G @ (x1, x2) on the diagonal y = x."""
    kr = np.real(k.quad)
    # on the diagonal z = E @ (x1, x2)
    embed = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    kz = kr @ embed
    return (kr[np.ix_(_X_IDX, _X_IDX)].T @ kz[_X_IDX] - kr[np.ix_(_Y_IDX, _X_IDX)].T @ kz[_Y_IDX])


def quantum_force(k: GaussianKernel, particle: int, x1: ArrayLike, x2: ArrayLike) -> ArrayLike:
    """-dQ/dx_particle evaluated on the diagonal y = x."""
    if particle not in (1, 2):
        raise ParameterError(f"particle must be 1 or 2, got {particle}")
    g = force_matrix(k)
    row = g[particle - 1]
    return row[0] * np.asarray(x1, dtype=float) + row[1] * np.asarray(x2, dtype=float)
