"""Tests for the RK4 integrators."""
import math

import numpy as np
import pytest

from core import NumericalError, ParameterError
from integrators import integrate_converged, integrate_fixed, runge_kutta4


@pytest.mark.unit
class TestRungeKutta:
    """Test single steps and fixed-step integration."""

    def test_single_step_exponential(self):
        """Test one step of dy/dt = y against exp(dt)."""
        y = runge_kutta4(np.array([1.0]), 0.0, 0.1, lambda y, t: y)
        assert y[0] == pytest.approx(math.exp(0.1), abs=1e-6)

    def test_time_dependent_rhs_is_exact_for_cubic(self):
        """Test that RK4 integrates dy/dt = 3t^2 exactly."""
        y = runge_kutta4(np.array([0.0]), 0.0, 2.0, lambda y, t: np.array([3.0 * t * t]))
        assert y[0] == pytest.approx(8.0)

    def test_fixed_harmonic_oscillator(self):
        """Test a full period of the harmonic oscillator."""
        def rhs(y, t):
            return np.array([y[1], -y[0]])

        y = integrate_fixed(rhs, np.array([1.0, 0.0]), 0.0, 2.0 * math.pi, 400)
        np.testing.assert_allclose(y, [1.0, 0.0], atol=1e-8)

    def test_fixed_needs_a_step(self):
        """Test that zero steps is a parameter error."""
        with pytest.raises(ParameterError):
            integrate_fixed(lambda y, t: y, np.array([1.0]), 0.0, 1.0, 0)


@pytest.mark.unit
class TestIntegrateConverged:
    """Test RK4 with step halving."""

    def test_decay_converges(self):
        """Test that dy/dt = -y reaches exp(-2) to the requested tolerance."""
        y = integrate_converged(lambda y, t: -y, np.array([1.0]), 0.0, 2.0)
        assert y[0] == pytest.approx(math.exp(-2.0), abs=1e-9)

    def test_zero_span_returns_copy(self):
        """Test that no integration happens for t1 == t0."""
        y0 = np.array([1.0, 2.0])
        y = integrate_converged(lambda y, t: y, y0, 1.0, 1.0)
        np.testing.assert_array_equal(y, y0)
        assert y is not y0

    def test_backwards_raises(self):
        """Test that integrating backwards is rejected."""
        with pytest.raises(ParameterError, match="precedes"):
            integrate_converged(lambda y, t: y, np.array([1.0]), 1.0, 0.5)

    def test_blow_up_raises_numerical_error(self):
        """Test that a solution with a finite-time singularity is reported."""
        with np.errstate(over='ignore', invalid='ignore'):
            with pytest.raises(NumericalError):
                integrate_converged(lambda y, t: y * y, np.array([1.0]), 0.0, 2.0, max_halvings=4)

    def test_halving_budget_exhausted(self):
        """Test that an unattainable tolerance is reported rather than silently accepted."""
        with pytest.raises(NumericalError, match="did not converge"):
            integrate_converged(lambda y, t: np.cos(40.0 * t) * np.ones_like(y), np.array([0.0]), 0.0, 1.0,
                                initial_step=0.5, rtol=0.0, max_halvings=2)
