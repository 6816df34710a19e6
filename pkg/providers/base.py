"""Base classes for velocity-field providers."""
from abc import ABC, abstractmethod

import numpy as np

from closed_form import ForcePair, VelocityPair
from core import ArrayLike, PhysParams, Scenario


class VelocityField(ABC):
    """Abstract Bohmian velocity field (x1, x2, t) -> (v1, v2).

    All providers must inherit from this class and implement velocity. The
    trajectory integrator and the nonlocality measures only rely on this
    interface, so analytic and numerical backends are interchangeable.
    """

    scenario: Scenario
    params: PhysParams

    @abstractmethod
    def velocity(self, x1: ArrayLike, x2: ArrayLike, t: float) -> VelocityPair:
        """Evaluate the velocity field.

        Args:
            x1: Position(s) of particle 1
            x2: Position(s) of particle 2, broadcastable against x1
            t: Time, >= 0

        Returns:
            VelocityPair of arrays shaped like the broadcast positions

        Raises:
            NumericalError: If the field cannot be evaluated at t
        """

    def quantum_force(self, x1: ArrayLike, x2: ArrayLike, t: float) -> ForcePair:
        """Quantum forces at (x1, x2, t).

        Providers without an exact force leave this unimplemented.
        """
        raise NotImplementedError(f"{type(self).__name__} does not provide quantum forces")

    def cleanup(self):
        """Release cached state. Subclasses override when they keep any."""


class LinearVelocityField(VelocityField):
    """Velocity field of the form (v1, v2) = V(t) @ (x1, x2)."""

    @abstractmethod
    def matrix(self, t: float) -> np.ndarray:
        """2x2 coefficient matrix V(t)."""

    def velocity(self, x1: ArrayLike, x2: ArrayLike, t: float) -> VelocityPair:
        v = self.matrix(t)
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return VelocityPair(v[0, 0] * x1 + v[0, 1] * x2, v[1, 0] * x1 + v[1, 1] * x2)

    def eta(self, t: float) -> float:
        """|dv1/dx2| at time t; position independent for a linear field."""
        return abs(float(self.matrix(t)[0, 1]))
