"""Nonlocality measure eta(t) and analytics of its curves (peak, FWHM, revivals).

eta_traj is |dv1/dx2| at the trajectory point; eta_ensemble averages it over
Born-distributed initial points. For every scenario of this state family the
field is linear in the positions, so the average is exact for any sample.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import optimize, signal

import closed_form as cf
from core import DegenerateError, NoPeakError, ParameterError, PhysParams, Scenario, WindowError
from providers import EngineField, LinearVelocityField, VelocityField, create_provider
from trajectories import integrate_ensemble, sample_initial, time_grid

logger = logging.getLogger(__name__)

DIFF_STEP = 1e-5
REVIVAL_PROMINENCE = 0.05
PEAK_XTOL = 1e-10
CROSSING_XTOL = 1e-12
TRAJECTORY_DT = 1e-3


class Revival(NamedTuple):
    t: float
    value: float
    prominence: float


@dataclass(frozen=True)
class RevivalReport:
    """Local maxima after the primary peak, in time order."""
    revivals: Tuple[Revival, ...] = ()
    threshold: float = 0.0

    def __len__(self):
        return len(self.revivals)


class Peak(NamedTuple):
    t: float
    value: float


class Fwhm(NamedTuple):
    width: float
    t_left: float
    t_right: float
    half: float


@dataclass(frozen=True)
class CurveAnalytics:
    peak_time: float
    peak_value: float
    fwhm: float
    revivals: Tuple[Revival, ...]


@dataclass(frozen=True, eq=False)
class EtaCurve:
    """Sampled eta(t), optionally with the callable it was sampled from."""
    times: np.ndarray
    values: np.ndarray
    scenario: Optional[Scenario] = None
    params: Optional[PhysParams] = None
    func: Optional[Callable[[float], float]] = None
    analytics: Optional[CurveAnalytics] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ParameterError("curve times and values must be 1-D arrays of equal length")
        if len(times) > 1 and np.any(np.diff(times) <= 0):
            raise ParameterError("curve times must be strictly increasing")
        if np.any(values < 0):
            raise ParameterError("eta values must be non-negative")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

    def __call__(self, t: float) -> float:
        if self.func is not None:
            return float(self.func(t))
        return float(np.interp(t, self.times, self.values))


def closed_form_eta(scenario, params: PhysParams) -> Callable[[float], float]:
    """Analytic eta(t) for a scenario."""
    scenario = Scenario.parse(scenario)
    params = params.for_scenario(scenario)
    if scenario is Scenario.UNITARY or params.gamma == 0:
        return lambda t: cf.eta_sch(t, params.mu)
    if scenario is Scenario.COMMON_BATH:
        return lambda t: cf.eta_common(t, params)
    return lambda t: cf.eta_distinct(t, params)


def _field_eta(field: VelocityField, x1, x2, t: float) -> np.ndarray:
    """|dv1/dx2| at given positions; analytic for linear fields, central difference otherwise."""
    if isinstance(field, LinearVelocityField):
        return np.full(np.shape(x1), field.eta(t))
    plus = field.velocity(x1, np.asarray(x2) + DIFF_STEP, t)[0]
    minus = field.velocity(x1, np.asarray(x2) - DIFF_STEP, t)[0]
    return np.abs((np.asarray(plus) - np.asarray(minus)) / (2.0 * DIFF_STEP))


def _positions_at(field: VelocityField, pairs: np.ndarray, t: float):
    if t == 0:
        return pairs[:, 0], pairs[:, 1]
    n = max(1, math.ceil(t / TRAJECTORY_DT))
    trajs = integrate_ensemble(field, pairs, t, t / n)
    return np.array([tr.x1[-1] for tr in trajs]), np.array([tr.x2[-1] for tr in trajs])


def eta_traj(scenario, params: PhysParams, t: float, x10: float, x20: float,
             field: Optional[VelocityField] = None) -> float:
    """Sensitivity |dv1/dx2| of particle 1 to particle 2 along the trajectory from (x10, x20)."""
    field = field or create_provider(scenario, params)
    if isinstance(field, LinearVelocityField):
        return field.eta(t)
    x1, x2 = _positions_at(field, np.array([[x10, x20]], dtype=float), t)
    return float(_field_eta(field, x1, x2, t)[0])


def eta_ensemble(scenario, params: PhysParams, t: float, n: int, seed: int,
                 field: Optional[VelocityField] = None) -> Tuple[float, float]:
    """Born-weighted Monte Carlo average of eta_traj.

    Returns:
        (mean, standard error of the mean)
    """
    if int(n) != n or n < 2:
        raise ParameterError(f"ensemble size must be at least 2, got {n}")
    field = field or create_provider(scenario, params)
    ensemble = sample_initial(field.params.mu, n, seed)
    if isinstance(field, LinearVelocityField):
        values = _field_eta(field, ensemble.pairs[:, 0], ensemble.pairs[:, 1], t)
    else:
        x1, x2 = _positions_at(field, ensemble.pairs, t)
        values = _field_eta(field, x1, x2, t)
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))


def build_eta_curve(scenario, params: PhysParams, t_end: float, dt: float, source: str = 'closed_form') -> EtaCurve:
    """Sample eta on 0..t_end.

    Args:
        source: 'closed_form' for the analytic expression, 'engine' for the
                moment propagator
    """
    scenario = Scenario.parse(scenario)
    params = params.for_scenario(scenario)
    times = time_grid(t_end, dt)
    if source == 'closed_form':
        func = closed_form_eta(scenario, params)
        values = np.asarray(func(times), dtype=float) * np.ones_like(times)
    elif source == 'engine':
        field = EngineField(scenario, params)
        func = field.eta
        values = np.array([field.eta(t) for t in times])
    else:
        raise ParameterError(f"Unknown eta source: '{source}'. Available sources: closed_form, engine")
    return EtaCurve(times=times, values=values, scenario=scenario, params=params, func=func)


def _prominent_peaks(curve: EtaCurve, prominence: float):
    top = float(np.max(curve.values)) if len(curve.values) else 0.0
    if len(curve.values) < 3:
        raise NoPeakError("curve needs at least three points to have an interior peak")
    if top <= 0:
        raise NoPeakError("curve vanishes identically; there is no peak")
    idx, props = signal.find_peaks(curve.values, prominence=prominence * top)
    return idx, props['prominences'], prominence * top


def _refine(curve: EtaCurve, i: int) -> Peak:
    """Refine the grid maximum at index i to sub-grid accuracy."""
    t, v = curve.times, curve.values
    a, b, c = t[i - 1], t[i], t[i + 1]
    if curve.func is None:
        # vertex of the parabola through the three samples
        ya, yb, yc = v[i - 1], v[i], v[i + 1]
        den = (a - b) * (a - c) * (b - c)
        p2 = (c * (yb - ya) + b * (ya - yc) + a * (yc - yb)) / den
        p1 = (c * c * (ya - yb) + b * b * (yc - ya) + a * a * (yb - yc)) / den
        if p2 >= 0:
            return Peak(float(b), float(yb))
        tp = -p1 / (2.0 * p2)
        p0 = yb - p2 * b * b - p1 * b
        return Peak(float(tp), float(p2 * tp * tp + p1 * tp + p0))

    def neg(x):
        return -float(curve.func(x))

    try:
        res = optimize.minimize_scalar(neg, bracket=(a, b, c), method='golden', tol=PEAK_XTOL)
        if not a <= res.x <= c:
            raise ValueError("golden search left the bracket")
    except ValueError:
        res = optimize.minimize_scalar(neg, bounds=(a, c), method='bounded', options={'xatol': PEAK_XTOL})
    return Peak(float(res.x), -float(res.fun))


def find_peak(curve: EtaCurve, prominence: float = REVIVAL_PROMINENCE) -> Peak:
    """Primary peak: the first interior maximum above the prominence threshold.

    Raises:
        NoPeakError: If the curve is flat zero or its maximum sits on the boundary
    """
    idx, _prom, _thr = _prominent_peaks(curve, prominence)
    if len(idx) == 0:
        raise NoPeakError("no interior maximum; the peak lies on the boundary of the time window")
    return _refine(curve, int(idx[0]))


def _crossing(curve: EtaCurve, lo: int, hi: int, half: float) -> float:
    a, b = curve.times[lo], curve.times[hi]
    if curve.func is None:
        ya, yb = curve.values[lo], curve.values[hi]
        return float(a + (half - ya) * (b - a) / (yb - ya))
    return float(optimize.bisect(lambda x: float(curve.func(x)) - half, a, b, xtol=CROSSING_XTOL))


def fwhm(curve: EtaCurve, peak: Optional[Peak] = None) -> Fwhm:
    """Full width at half maximum of the primary peak.

    Raises:
        NoPeakError: If there is no primary peak
        WindowError: If a half-maximum crossing is not inside the time window
    """
    peak = peak or find_peak(curve)
    half = peak.value / 2.0
    v = curve.values
    i_peak = int(np.searchsorted(curve.times, peak.t))
    i_peak = min(max(i_peak, 0), len(v) - 1)

    below_left = np.nonzero(v[:i_peak] <= half)[0]
    if len(below_left) == 0:
        raise WindowError('left')
    lo = int(below_left[-1])
    t_left = _crossing(curve, lo, lo + 1, half)

    below_right = np.nonzero(v[i_peak:] <= half)[0]
    if len(below_right) == 0:
        raise WindowError('right')
    hi = i_peak + int(below_right[0])
    t_right = _crossing(curve, hi - 1, hi, half)
    return Fwhm(t_right - t_left, t_left, t_right, half)


def find_revivals(curve: EtaCurve, prominence: float = REVIVAL_PROMINENCE) -> RevivalReport:
    """Maxima after the primary peak whose prominence exceeds prominence * global maximum."""
    try:
        idx, proms, threshold = _prominent_peaks(curve, prominence)
    except NoPeakError:
        return RevivalReport()
    revivals = []
    for i, prom in zip(idx[1:], proms[1:]):
        t, value = _refine(curve, int(i))
        revivals.append(Revival(t, value, float(prom)))
    return RevivalReport(tuple(revivals), threshold)


def first_revival(report: RevivalReport) -> Optional[Revival]:
    return report.revivals[0] if report.revivals else None


def analyze(curve: EtaCurve, prominence: float = REVIVAL_PROMINENCE) -> EtaCurve:
    """Return the curve with peak, FWHM and revivals attached.

    Raises:
        NoPeakError, WindowError: As find_peak and fwhm
    """
    peak = find_peak(curve, prominence)
    width = fwhm(curve, peak)
    report = find_revivals(curve, prominence)
    return replace(curve, analytics=CurveAnalytics(peak.t, peak.value, width.width, report.revivals))


def eta_sch_peak_table(mus) -> List[Tuple[float, float, float]]:
    """(mu, t_max, eta_max) for each mu < 1; mu = 1 rows are skipped with a warning."""
    rows = []
    for mu in mus:
        try:
            rows.append((float(mu),) + cf.eta_sch_peak(mu))
        except DegenerateError:
            logger.warning("Skipping mu=%g: eta vanishes identically", mu)
    return rows
