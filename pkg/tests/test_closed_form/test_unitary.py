"""Tests for the analytic unitary expressions."""
import numpy as np
from scipy.integrate import trapezoid
import pytest

import closed_form as cf
from core import ConfigPoint, DegenerateError, ParameterError

H = 1e-4


def _density(x1, x2, t, mu):
    return np.abs(cf.psi_sch(ConfigPoint(x1, x2, t), mu)) ** 2


@pytest.mark.unit
class TestWavefunction:
    """Test psi_sch."""

    @pytest.mark.parametrize("t", [0.0, 0.7, 3.0])
    def test_normalised(self, t):
        """Test that |psi|^2 integrates to one at several times."""
        xs = np.linspace(-20.0, 20.0, 801)
        x1, x2 = np.meshgrid(xs, xs, indexing='ij')
        density = _density(x1, x2, t, 0.5)
        total = trapezoid(trapezoid(density, xs, axis=1), xs)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_initial_position_variance(self):
        """Test that Var(x1) = (1/mu + mu)/4 at t = 0."""
        mu = 0.5
        xs = np.linspace(-10.0, 10.0, 401)
        x1, x2 = np.meshgrid(xs, xs, indexing='ij')
        density = _density(x1, x2, 0.0, mu)
        second = trapezoid(trapezoid(density * x1 * x1, xs, axis=1), xs)
        assert second == pytest.approx((1.0 / mu + mu) / 4.0, rel=1e-6)

    def test_exchange_symmetric(self):
        """Test psi(x1, x2) = psi(x2, x1)."""
        p = ConfigPoint(0.3, -1.1, 0.8)
        assert cf.psi_sch(p, 0.4) == pytest.approx(cf.psi_sch(p.swapped(), 0.4))

    def test_velocity_is_phase_gradient(self):
        """Test that v_sch equals Im(d psi/dx / psi) by central differences."""
        mu, x1, x2, t = 0.3, 0.6, -0.9, 1.1
        psi = cf.psi_sch(ConfigPoint(x1, x2, t), mu)
        d1 = (cf.psi_sch(ConfigPoint(x1 + H, x2, t), mu) - cf.psi_sch(ConfigPoint(x1 - H, x2, t), mu)) / (2 * H)
        d2 = (cf.psi_sch(ConfigPoint(x1, x2 + H, t), mu) - cf.psi_sch(ConfigPoint(x1, x2 - H, t), mu)) / (2 * H)
        v = cf.v_sch(ConfigPoint(x1, x2, t), mu)
        assert v.v1 == pytest.approx((d1 / psi).imag, abs=1e-7)
        assert v.v2 == pytest.approx((d2 / psi).imag, abs=1e-7)


@pytest.mark.unit
class TestTrajectories:
    """Test traj_sch and its derivatives."""

    def test_starts_at_initial_point(self):
        """Test that the trajectory passes through (x10, x20) at t = 0."""
        assert cf.traj_sch(0.0, 1.3, -0.4, 0.5) == pytest.approx((1.3, -0.4))

    def test_velocity_along_is_time_derivative(self):
        """Test v_sch_along against a central difference of traj_sch."""
        mu, x10, x20, t = 0.5, 1.2, 0.3, 0.9
        plus = np.array(cf.traj_sch(t + H, x10, x20, mu))
        minus = np.array(cf.traj_sch(t - H, x10, x20, mu))
        assert tuple(cf.v_sch_along(t, x10, x20, mu)) == pytest.approx(tuple((plus - minus) / (2 * H)), abs=1e-7)

    def test_velocity_along_matches_field(self):
        """Test that the field evaluated on the trajectory gives the same velocity."""
        mu, x10, x20, t = 0.2, -0.7, 1.6, 2.4
        x1, x2 = cf.traj_sch(t, x10, x20, mu)
        v = cf.v_sch(ConfigPoint(x1, x2, t), mu)
        assert tuple(v) == pytest.approx(tuple(cf.v_sch_along(t, x10, x20, mu)), rel=1e-12)

    def test_force_along_is_acceleration(self):
        """Test Newton's law: the quantum force equals the acceleration under free evolution."""
        mu, x10, x20, t = 0.5, 1.2, 0.3, 0.9
        plus = np.array(cf.v_sch_along(t + H, x10, x20, mu))
        minus = np.array(cf.v_sch_along(t - H, x10, x20, mu))
        assert tuple(cf.f_qm_sch_along(t, x10, x20, mu)) == pytest.approx(tuple((plus - minus) / (2 * H)),
                                                                           abs=1e-7)

    def test_force_along_matches_field(self):
        """Test that the force field on the trajectory equals the along-trajectory force."""
        mu, x10, x20, t = 0.4, 0.5, -1.5, 1.7
        x1, x2 = cf.traj_sch(t, x10, x20, mu)
        assert tuple(cf.f_qm_sch(ConfigPoint(x1, x2, t), mu)) == pytest.approx(
            tuple(cf.f_qm_sch_along(t, x10, x20, mu)), rel=1e-10)

    def test_vectorised_over_starts(self):
        """Test that arrays of initial points give arrays of positions."""
        x1, x2 = cf.traj_sch(1.0, np.array([0.0, 1.0]), np.array([0.0, 0.0]), 0.5)
        assert x1.shape == (2,)
        assert x1[0] == 0.0


@pytest.mark.unit
class TestQuantumPotential:
    """Test q_sch and f_qm_sch."""

    def test_force_is_minus_gradient(self):
        """Test f = -grad Q by central differences."""
        mu, x1, x2, t = 0.5, 0.8, -0.3, 0.6
        dq1 = (cf.q_sch(ConfigPoint(x1 + H, x2, t), mu) - cf.q_sch(ConfigPoint(x1 - H, x2, t), mu)) / (2 * H)
        dq2 = (cf.q_sch(ConfigPoint(x1, x2 + H, t), mu) - cf.q_sch(ConfigPoint(x1, x2 - H, t), mu)) / (2 * H)
        f = cf.f_qm_sch(ConfigPoint(x1, x2, t), mu)
        assert f.f1 == pytest.approx(-dq1, abs=1e-7)
        assert f.f2 == pytest.approx(-dq2, abs=1e-7)

    def test_potential_from_amplitude(self):
        """Test Q = -(1/2) laplacian(R)/R with R = |psi|."""
        mu, x1, x2, t = 0.5, 0.4, 0.9, 1.3
        h = 1e-3

        def amp(a, b):
            return np.sqrt(_density(a, b, t, mu))

        centre = amp(x1, x2)
        lap = (amp(x1 + h, x2) + amp(x1 - h, x2) + amp(x1, x2 + h) + amp(x1, x2 - h) - 4 * centre) / (h * h)
        assert cf.q_sch(ConfigPoint(x1, x2, t), mu) == pytest.approx(-0.5 * lap / centre, abs=1e-5)

    def test_potential_along_matches_field(self):
        """Test q_sch_along against q_sch at the trajectory point."""
        mu, x10, x20, t = 0.5, 1.0, 0.2, 2.0
        x1, x2 = cf.traj_sch(t, x10, x20, mu)
        assert cf.q_sch_along(t, x10, x20, mu) == pytest.approx(cf.q_sch(ConfigPoint(x1, x2, t), mu), rel=1e-12)


@pytest.mark.unit
class TestEtaSch:
    """Test the unitary nonlocality measure."""

    def test_known_value(self):
        """Test eta at mu = 0.5, t = 1, where both widths equal 1.25."""
        assert cf.eta_sch(1.0, 0.5) == pytest.approx(0.3, rel=1e-14)

    def test_vanishes_at_start_and_for_unsqueezed(self):
        """Test eta(0) = 0 and eta = 0 for mu = 1."""
        assert cf.eta_sch(0.0, 0.5) == 0.0
        np.testing.assert_array_equal(cf.eta_sch(np.linspace(0, 5, 11), 1.0), 0.0)

    def test_equals_velocity_cross_derivative(self):
        """Test eta = |dv1/dx2|."""
        v_plus = cf.v_sch(ConfigPoint(0.0, 1.0, 0.7), 0.3).v1
        v_zero = cf.v_sch(ConfigPoint(0.0, 0.0, 0.7), 0.3).v1
        assert cf.eta_sch(0.7, 0.3) == pytest.approx(abs(v_plus - v_zero), rel=1e-12)

    def test_peak_reference_value(self):
        """Test the peak time and height at mu = 0.5."""
        t_max, eta_max = cf.eta_sch_peak(0.5)
        assert t_max == pytest.approx(0.45331, abs=1e-5)
        assert eta_max == pytest.approx(0.44371, abs=1e-5)

    @pytest.mark.parametrize("mu", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_peak_is_stationary(self, mu):
        """Test that the closed-form peak time is a maximum of eta."""
        t_max, eta_max = cf.eta_sch_peak(mu)
        assert cf.eta_sch(t_max * 1.01, mu) < eta_max
        assert cf.eta_sch(t_max * 0.99, mu) < eta_max

    def test_peak_undefined_for_mu_one(self):
        """Test that mu = 1 has no peak."""
        with pytest.raises(DegenerateError):
            cf.eta_sch_peak(1.0)

    def test_max_curve_decreasing(self):
        """Test that the peak height falls as mu rises."""
        rows = cf.eta_sch_max_curve([0.1, 0.4, 0.8])
        heights = [row[2] for row in rows]
        assert heights == sorted(heights, reverse=True)
        assert rows[0][0] == 0.1

    def test_invalid_mu_raises(self):
        """Test that mu outside (0, 1] is rejected."""
        with pytest.raises(ParameterError):
            cf.eta_sch(1.0, 0.0)
