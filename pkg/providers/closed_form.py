"""Velocity fields backed by the analytic expressions."""
import numpy as np

import closed_form as cf
from closed_form import ForcePair
from core import ArrayLike, ConfigPoint, DomainError, PhysParams, Scenario, make_params

from .base import LinearVelocityField


def _columns(field_at, t: float) -> np.ndarray:
    """Assemble V(t) from the field at the unit positions (1, 0) and (0, 1)."""
    a = field_at(ConfigPoint(1.0, 0.0, t))
    b = field_at(ConfigPoint(0.0, 1.0, t))
    return np.array([[a[0], b[0]], [a[1], b[1]]], dtype=float)


class SchrodingerField(LinearVelocityField):
    """Unitary evolution; exact velocities and quantum forces."""

    scenario = Scenario.UNITARY

    def __init__(self, mu: float):
        self.params = make_params(0.0, 0.0, mu)

    def matrix(self, t: float) -> np.ndarray:
        return _columns(lambda p: cf.v_sch(p, self.params.mu), t)

    def quantum_force(self, x1: ArrayLike, x2: ArrayLike, t: float) -> ForcePair:
        return cf.f_qm_sch(ConfigPoint(x1, x2, t), self.params.mu)


class CommonBathField(LinearVelocityField):
    """Both particles coupled to one thermal bath."""

    scenario = Scenario.COMMON_BATH

    def __init__(self, params: PhysParams):
        if params.gamma <= 0:
            raise DomainError("CommonBathField needs gamma > 0")
        self.params = params

    def matrix(self, t: float) -> np.ndarray:
        return _columns(lambda p: cf.v_common(p, self.params), t)


class DistinctMu1Field(LinearVelocityField):
    """Unsqueezed state in two independent baths; the particles decouple."""

    scenario = Scenario.DISTINCT_BATHS

    def __init__(self, params: PhysParams):
        if params.mu != 1.0 or params.gamma <= 0:
            raise DomainError("DistinctMu1Field needs mu = 1 and gamma > 0")
        self.params = params

    def matrix(self, t: float) -> np.ndarray:
        c = float(cf.v_distinct_mu1(1.0, t, self.params))
        return np.array([[c, 0.0], [0.0, c]])
