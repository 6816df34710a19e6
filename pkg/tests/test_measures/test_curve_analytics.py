"""Tests for peak, FWHM and revival detection on sampled curves."""
import numpy as np
import pytest

from core import NoPeakError, ParameterError, WindowError
from measures import EtaCurve, analyze, find_peak, find_revivals, first_revival, fwhm


def _curve(func, t_end=4.0, n=401, analytic=True):
    times = np.linspace(0.0, t_end, n)
    return EtaCurve(times=times, values=func(times), func=func if analytic else None)


def _two_bumps(t):
    return np.exp(-((t - 1.0) / 0.2) ** 2) + 0.3 * np.exp(-((t - 3.0) / 0.2) ** 2)


@pytest.mark.unit
class TestEtaCurve:
    """Test curve construction."""

    def test_rejects_negative_values(self):
        """Test that eta is a magnitude and cannot be negative."""
        with pytest.raises(ParameterError, match="non-negative"):
            EtaCurve(times=[0.0, 1.0], values=[0.1, -0.1])

    def test_rejects_unordered_times(self):
        """Test that times must increase strictly."""
        with pytest.raises(ParameterError, match="increasing"):
            EtaCurve(times=[0.0, 1.0, 1.0], values=[0.0, 0.1, 0.2])

    def test_rejects_shape_mismatch(self):
        """Test that times and values pair up."""
        with pytest.raises(ParameterError):
            EtaCurve(times=[0.0, 1.0], values=[0.0])

    def test_call_interpolates_without_function(self, triangle_curve):
        """Test that a sampled curve is linearly interpolated."""
        assert triangle_curve(1.875) == pytest.approx(0.75)

    def test_call_uses_function_when_present(self):
        """Test that an analytic curve is evaluated exactly."""
        curve = _curve(lambda t: np.asarray(t) ** 2)
        assert curve(0.123) == pytest.approx(0.123 ** 2)


@pytest.mark.unit
class TestFindPeak:
    """Test primary peak detection."""

    def test_triangle_peak(self, triangle_curve):
        """Test the vertex of a symmetric triangle."""
        peak = find_peak(triangle_curve)
        assert peak.t == pytest.approx(2.0)
        assert peak.value == pytest.approx(1.0)

    def test_refined_beyond_grid(self):
        """Test that the analytic maximum is located far below the grid spacing."""
        curve = _curve(lambda t: np.exp(-((np.asarray(t) - 1.23456) / 0.5) ** 2))
        peak = find_peak(curve)
        assert peak.t == pytest.approx(1.23456, abs=1e-6)
        assert peak.value == pytest.approx(1.0, abs=1e-10)

    def test_parabolic_refinement_without_function(self):
        """Test the three-point vertex on a sampled parabola."""
        curve = _curve(lambda t: np.maximum(0.0, 1.0 - (t - 2.013) ** 2), analytic=False)
        peak = find_peak(curve)
        assert peak.t == pytest.approx(2.013, abs=1e-9)
        assert peak.value == pytest.approx(1.0, abs=1e-9)

    def test_first_prominent_peak_is_primary(self):
        """Test that a smaller early peak wins over a later taller one."""
        curve = _curve(lambda t: 0.4 * np.exp(-((t - 1.0) / 0.2) ** 2) + np.exp(-((t - 3.0) / 0.2) ** 2))
        assert find_peak(curve).t == pytest.approx(1.0, abs=1e-3)

    def test_zero_curve_has_no_peak(self):
        """Test that an identically zero curve is a NoPeakError."""
        with pytest.raises(NoPeakError, match="vanishes"):
            find_peak(_curve(lambda t: np.zeros_like(t)))

    def test_boundary_maximum_is_not_a_peak(self):
        """Test that a monotone curve has no interior peak."""
        with pytest.raises(NoPeakError, match="boundary"):
            find_peak(_curve(lambda t: np.asarray(t) * 0.1))

    def test_too_short(self):
        """Test that two samples cannot hold an interior maximum."""
        with pytest.raises(NoPeakError):
            find_peak(EtaCurve(times=[0.0, 1.0], values=[0.0, 1.0]))


@pytest.mark.unit
class TestFwhm:
    """Test full width at half maximum."""

    def test_triangle_width(self, triangle_curve):
        """Test the half-height width of the triangle."""
        width = fwhm(triangle_curve)
        assert width.width == pytest.approx(0.5)
        assert width.t_left == pytest.approx(1.75)
        assert width.t_right == pytest.approx(2.25)
        assert width.half == pytest.approx(0.5)

    def test_gaussian_width(self):
        """Test the exact FWHM 2*sqrt(ln 2)*w of a Gaussian bump, by bisection."""
        w = 0.3
        curve = _curve(lambda t: np.exp(-((np.asarray(t) - 2.0) / w) ** 2))
        assert fwhm(curve).width == pytest.approx(2.0 * np.sqrt(np.log(2.0)) * w, abs=1e-9)

    @pytest.mark.parametrize("analytic", [True, False])
    def test_width_invariant_under_vertical_scaling(self, analytic):
        """Test that multiplying the curve by a constant leaves the FWHM unchanged."""
        def bump(t):
            return np.exp(-((np.asarray(t) - 1.7) / 0.4) ** 2)

        def scaled(t):
            return 3.7 * bump(t)

        base = fwhm(_curve(bump, analytic=analytic))
        tall = fwhm(_curve(scaled, analytic=analytic))
        assert tall.width == pytest.approx(base.width, abs=1e-9)
        assert tall.half == pytest.approx(3.7 * base.half)

    def test_left_crossing_outside_window(self):
        """Test a peak whose left half-maximum lies before t = 0."""
        curve = _curve(lambda t: np.exp(-(np.asarray(t) - 0.3) ** 2))
        with pytest.raises(WindowError) as excinfo:
            fwhm(curve)
        assert excinfo.value.side == 'left'

    def test_right_crossing_outside_window(self):
        """Test a peak whose right half-maximum lies after t_end."""
        curve = _curve(lambda t: np.exp(-(np.asarray(t) - 3.7) ** 2))
        with pytest.raises(WindowError) as excinfo:
            fwhm(curve)
        assert excinfo.value.side == 'right'


@pytest.mark.unit
class TestRevivals:
    """Test revival detection."""

    def test_second_bump_is_a_revival(self):
        """Test that a later maximum above the threshold is reported."""
        report = find_revivals(_curve(_two_bumps))
        assert len(report) == 1
        revival = first_revival(report)
        assert revival.t == pytest.approx(3.0, abs=1e-3)
        assert revival.value == pytest.approx(0.3, abs=1e-3)
        assert report.threshold == pytest.approx(0.05)

    def test_threshold_filters_small_bumps(self):
        """Test that a stricter prominence suppresses the revival."""
        report = find_revivals(_curve(_two_bumps), prominence=0.5)
        assert len(report) == 0
        assert first_revival(report) is None

    def test_single_peak_has_no_revivals(self, triangle_curve):
        """Test that a single bump has no revivals."""
        assert len(find_revivals(triangle_curve)) == 0

    def test_zero_curve_has_no_revivals(self):
        """Test that revivals of a flat curve are empty rather than an error."""
        assert len(find_revivals(_curve(lambda t: np.zeros_like(t)))) == 0

    def test_analyze_attaches_everything(self):
        """Test that analyze fills peak, width and revivals."""
        curve = analyze(_curve(_two_bumps))
        assert curve.analytics.peak_time == pytest.approx(1.0, abs=1e-6)
        assert curve.analytics.fwhm == pytest.approx(2.0 * np.sqrt(np.log(2.0)) * 0.2, abs=1e-4)
        assert len(curve.analytics.revivals) == 1
