"""Velocity-field provider package."""
from core import DomainError, PhysParams, Scenario

from .base import LinearVelocityField, VelocityField
from .closed_form import CommonBathField, DistinctMu1Field, SchrodingerField
from .engine import EngineField, check_backend

__all__ = ['VelocityField', 'LinearVelocityField', 'SchrodingerField', 'CommonBathField',
           'DistinctMu1Field', 'EngineField', 'create_provider', 'has_closed_form']


def has_closed_form(scenario: Scenario, params: PhysParams) -> bool:
    """Whether an analytic velocity field exists for this scenario and mu."""
    scenario = Scenario.parse(scenario)
    if scenario is Scenario.UNITARY or params.gamma == 0:
        return True
    if scenario is Scenario.COMMON_BATH:
        return True
    return params.mu == 1.0


def create_provider(scenario, params: PhysParams, backend: str = 'auto') -> VelocityField:
    """Create a velocity field for a scenario.

    Args:
        scenario: Scenario or its name ('sch', 'distinct', 'common')
        params: Physical parameters; the unitary scenario ignores the bath
        backend: 'closed_form', 'engine', or 'auto' (analytic when available,
                 otherwise the moment engine)

    Returns:
        VelocityField instance

    Raises:
        ParameterError: If scenario or backend is not recognized
        DomainError: If 'closed_form' is requested where no analytic field exists
    """
    scenario = Scenario.parse(scenario)
    backend = check_backend(backend)
    params = params.for_scenario(scenario)

    if backend == 'engine':
        return EngineField(scenario, params)
    if not has_closed_form(scenario, params):
        if backend == 'closed_form':
            raise DomainError(
                f"No closed-form velocity field for scenario '{scenario.value}' with mu={params.mu}. "
                f"Available backends for this case: engine"
            )
        return EngineField(scenario, params)

    if scenario is Scenario.UNITARY or params.gamma == 0:
        return SchrodingerField(params.mu)
    if scenario is Scenario.COMMON_BATH:
        return CommonBathField(params)
    return DistinctMu1Field(params)
