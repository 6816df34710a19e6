"""Parameter model, scenario taxonomy and error types shared by every module.

All quantities are dimensionless (m = hbar = k_B = 1). Positions are measured
in units of the initial packet width, times in units of m*sigma0^2/hbar.
"""
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


class BohmflowError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(BohmflowError, ValueError):
    """Raised when a physical or numerical parameter is outside its domain."""


class DomainError(BohmflowError, ValueError):
    """Raised when an operation is requested outside the case it applies to."""


class DegenerateError(BohmflowError):
    """Raised when a quantity is undefined because the curve vanishes identically."""


class NumericalError(BohmflowError, ArithmeticError):
    """Raised on underflowing denominators, ill-conditioning or lost positivity."""


class NoPeakError(BohmflowError):
    """Raised when a sampled curve has no interior maximum."""


class WindowError(BohmflowError):
    """Raised when a half-maximum crossing is not bracketed by the time window.

    Attributes:
        side: 'left' or 'right'
    """

    def __init__(self, side: str, message: str = ""):
        self.side = side
        super().__init__(message or f"half-maximum crossing on the {side} side is not inside the time window")


class Scenario(Enum):
    """Environment coupling of the two particles."""
    UNITARY = 'sch'
    DISTINCT_BATHS = 'distinct'
    COMMON_BATH = 'common'

    @classmethod
    def parse(cls, value: Union[str, 'Scenario']) -> 'Scenario':
        """Accept either a Scenario or its command-line name."""
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ', '.join(s.value for s in cls)
            raise ParameterError(f"Unknown scenario: '{value}'. Available scenarios: {names}") from None


@dataclass(frozen=True)
class PhysParams:
    """Relaxation rate, bath temperature and squeezing decay factor.

    Use make_params() to construct validated instances. The diffusion
    coefficient is derived, never stored.
    """
    gamma: float
    temperature: float
    mu: float

    @property
    def diffusion(self) -> float:
        return 2.0 * self.gamma * self.temperature

    def for_scenario(self, scenario: Scenario) -> 'PhysParams':
        """Return the parameters a scenario actually runs with (unitary drops the bath)."""
        if Scenario.parse(scenario) is Scenario.UNITARY:
            return replace(self, gamma=0.0, temperature=0.0)
        return self


@dataclass(frozen=True)
class ConfigPoint:
    """Positions of both particles at time t (scalars or broadcastable arrays)."""
    x1: ArrayLike
    x2: ArrayLike
    t: ArrayLike

    def __post_init__(self):
        if np.any(np.asarray(self.t) < 0):
            raise ParameterError(f"time must be non-negative, got t={self.t}")

    def swapped(self) -> 'ConfigPoint':
        return ConfigPoint(self.x2, self.x1, self.t)


def _check_finite(name: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value}")
    return value


def check_mu(mu) -> float:
    """Validate the squeezing decay factor and return it as a float."""
    mu = _check_finite('mu', mu)
    if not 0.0 < mu <= 1.0:
        raise ParameterError(f"mu must lie in (0, 1], got {mu}")
    return mu


def check_time(t) -> float:
    t = _check_finite('t', t)
    if t < 0:
        raise ParameterError(f"time must be non-negative, got t={t}")
    return t


def make_params(gamma: float, temperature: float, mu: float) -> PhysParams:
    """Build validated physical parameters.

    Args:
        gamma: Relaxation rate, >= 0
        temperature: Bath temperature, >= 0
        mu: Squeezing decay factor in (0, 1]

    Returns:
        PhysParams with diffusion = 2*gamma*temperature

    Raises:
        ParameterError: If any value is outside its domain
    """
    gamma = _check_finite('gamma', gamma)
    temperature = _check_finite('temperature', temperature)
    if gamma < 0:
        raise ParameterError(f"gamma must be non-negative, got {gamma}")
    if temperature < 0:
        raise ParameterError(f"temperature must be non-negative, got {temperature}")
    return PhysParams(gamma=gamma, temperature=temperature, mu=check_mu(mu))


def mu_from_squeezing(s: float) -> float:
    """Squeezing decay factor mu = exp(-2s) for a squeezing parameter s >= 0."""
    s = _check_finite('s', s)
    if s < 0:
        raise ParameterError(f"squeezing parameter must be non-negative, got s={s}")
    return math.exp(-2.0 * s)


def squeezing_from_mu(mu: float) -> float:
    return -0.5 * math.log(check_mu(mu))


def relative_width(mu: float) -> float:
    """Width of the relative mode (x1 - x2)/sqrt(2) over the unsqueezed width, exp(-s) = sqrt(mu)."""
    return math.sqrt(check_mu(mu))


def make_params_from_squeezing(gamma: float, temperature: float, s: float) -> PhysParams:
    return make_params(gamma, temperature, mu_from_squeezing(s))
