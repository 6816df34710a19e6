"""Tests for the engine-backed velocity field."""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

import closed_form as cf
from core import ConfigPoint, ParameterError, Scenario, make_params
from providers import CommonBathField, EngineField
from providers import engine as engine_module


@pytest.mark.unit
class TestEngineField:
    """Test EngineField caching and agreement with the analytic fields."""

    def test_matches_common_bath_field(self, bath_params):
        """Test the engine against the analytic common-bath matrix."""
        engine = EngineField('common', bath_params)
        exact = CommonBathField(bath_params)
        for t in (0.1, 0.5, 1.0, 2.0):
            np.testing.assert_allclose(engine.matrix(t), exact.matrix(t), atol=1e-9)

    def test_eta_matches_distinct_closed_form(self, bath_params):
        """Test engine eta against eta_distinct at several times."""
        engine = EngineField(Scenario.DISTINCT_BATHS, bath_params)
        for t in (0.2, 0.376, 1.0, 3.0):
            assert engine.eta(t) == pytest.approx(float(cf.eta_distinct(t, bath_params)), abs=1e-8)

    def test_unitary_drops_bath(self, bath_params):
        """Test that the unitary engine ignores gamma and T."""
        engine = EngineField('sch', bath_params)
        assert engine.params.gamma == 0.0
        assert engine.eta(1.0) == pytest.approx(float(cf.eta_sch(1.0, 0.5)), abs=1e-9)

    def test_result_independent_of_request_order(self, bath_params):
        """Test that earlier requests do not change later results."""
        fresh = EngineField('distinct', bath_params)
        used = EngineField('distinct', bath_params)
        used.matrix(3.7)
        used.matrix(0.9)
        np.testing.assert_array_equal(fresh.matrix(1.23), used.matrix(1.23))

    def test_concurrent_callers_agree(self, bath_params):
        """Test that a shared field gives the same values from several threads."""
        times = [0.05 * k for k in range(1, 41)]
        reference = [EngineField('common', bath_params).eta(t) for t in times]
        shared = EngineField('common', bath_params)
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(shared.eta, reversed(times)))
        assert list(reversed(results)) == reference

    def test_moments_are_cached(self, bath_params, mocker):
        """Test that repeated requests for one time propagate only once."""
        field = EngineField('distinct', bath_params)
        field.moments(0.02)
        spy = mocker.spy(engine_module.ge, 'propagate')
        field.moments(0.02)
        assert spy.call_count == 0

    def test_cleanup_resets_cache(self, bath_params):
        """Test that cleanup drops everything but the initial moments."""
        field = EngineField('distinct', bath_params)
        before = field.matrix(0.8)
        field.cleanup()
        assert len(field._anchors) == 1
        assert not field._cache
        np.testing.assert_array_equal(field.matrix(0.8), before)

    def test_negative_time_raises(self, bath_params):
        """Test that the engine refuses times before preparation."""
        with pytest.raises(ParameterError):
            EngineField('common', bath_params).moments(-0.1)

    def test_quantum_force_is_linear(self, bath_params):
        """Test that the engine force is linear in the positions."""
        field = EngineField('distinct', bath_params)
        f_a = np.array(field.quantum_force(1.0, 0.0, 0.5))
        f_b = np.array(field.quantum_force(0.0, 1.0, 0.5))
        f_ab = np.array(field.quantum_force(2.0, -3.0, 0.5))
        np.testing.assert_allclose(f_ab, 2.0 * f_a - 3.0 * f_b, atol=1e-12)


@pytest.mark.unit
class TestFirstOrderForce:
    """Test the first-order common-bath force against the engine as gamma -> 0."""

    def test_extrapolated_slope_matches_first_order_correction(self):
        """Test (F(gamma) - F_sch)/gamma, extrapolated to gamma -> 0, against the first-order bracket."""
        p = ConfigPoint(0.5, 0.5, 1.0)
        mu, temp = 0.4, 10.0
        free = cf.f_qm_sch(p, mu).f1

        def slope(gamma):
            force = EngineField('common', make_params(gamma, temp, mu)).quantum_force(p.x1, p.x2, p.t).f1
            return (force - free) / gamma

        coarse, fine = slope(5e-3), slope(2.5e-3)
        extrapolated = 2.0 * fine - coarse
        predicted = (cf.f_qm_common_first_order(p, make_params(1e-2, temp, mu)).f1 - free) / 1e-2
        assert predicted == pytest.approx(22.45, abs=1e-2)
        assert extrapolated == pytest.approx(predicted, rel=3e-2)
