# Run configuration: documented defaults, config-file loading and validation
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from dotenv import dotenv_values

from core import ParameterError, Scenario

# Documented defaults. Anything not listed here (mu in particular) must be
# given on the command line or in the config file.
DEFAULTS = {
    'scenario': 'sch',
    'gamma': '0.1',
    'temp': '10',
    't-end': '6',
    'seed': '12345',
    'workers': '1',
    'backend': 'auto',
    'prominence': '0.05',
}

# Step sizes differ per subcommand: trajectories need a finer grid than eta curves
TRAJ_DT = 0.001
ETA_DT = 0.01

# Fan of initial points used by `traj` when none are given
DEFAULT_FAN_X10 = [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5]
DEFAULT_FAN_X20 = [0.0]

CONFIG_KEYS = ('scenario', 'gamma', 'temp', 'mu', 't-end', 'dt', 'seed', 'n', 'x10', 'x20', 'out', 'svg',
               'csv', 'workers', 'backend', 'prominence')


def _get_float(values: Mapping[str, str], key: str, min_val: float = None, max_val: float = None,
               allow_equal_min: bool = True) -> Optional[float]:
    """Get a float setting with range validation; None when absent."""
    raw = values.get(key)
    if raw is None:
        return None
    try:
        value = float(raw)
    except (ValueError, TypeError):
        raise ParameterError(f"Invalid {key} value: '{raw}' is not a number") from None
    if min_val is not None and (value < min_val or (value == min_val and not allow_equal_min)):
        raise ParameterError(f"{key}={value} is below minimum {min_val}")
    if max_val is not None and value > max_val:
        raise ParameterError(f"{key}={value} is above maximum {max_val}")
    return value


def _get_int(values: Mapping[str, str], key: str, min_val: int = None) -> Optional[int]:
    """Get an integer setting with a lower bound; None when absent."""
    raw = values.get(key)
    if raw is None:
        return None
    try:
        value = int(raw)
    except (ValueError, TypeError):
        raise ParameterError(f"Invalid {key} value: '{raw}' is not an integer") from None
    if min_val is not None and value < min_val:
        raise ParameterError(f"{key}={value} is below minimum {min_val}")
    return value


def _get_str(values: Mapping[str, str], key: str) -> Optional[str]:
    raw = values.get(key)
    if raw is None:
        return None
    if not raw.strip():
        raise ParameterError(f"{key} is empty")
    return raw.strip()


def _get_float_list(values: Mapping[str, str], key: str) -> Optional[List[float]]:
    """Comma-separated floats, e.g. '10,15,20'."""
    raw = values.get(key)
    if raw is None:
        return None
    items = [item.strip() for item in raw.split(',') if item.strip()]
    try:
        return [float(item) for item in items]
    except ValueError:
        raise ParameterError(f"Invalid {key} value: '{raw}' is not a comma-separated list of numbers") from None


def load_config_file(path) -> Dict[str, str]:
    """Read a flat key=value file. Keys are the long flag names; '_' is accepted for '-'.

    The environment is never consulted: values are parsed without interpolation.
    """
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"Config file not found: {path}")
    raw = dotenv_values(path, interpolate=False)
    values = {}
    for key, value in raw.items():
        name = key.strip().lower().replace('_', '-')
        if name not in CONFIG_KEYS:
            raise ParameterError(f"Unknown key '{key}' in {path}. Available keys: {', '.join(CONFIG_KEYS)}")
        if value is None:
            raise ParameterError(f"Key '{key}' in {path} has no value")
        values[name] = value
    return values


@dataclass
class RunConfig:
    """Fully resolved settings for one CLI invocation."""
    scenario: Scenario
    gammas: List[float]
    temps: List[float]
    mus: List[float]
    t_end: float
    dt: Optional[float]
    seed: int
    n: Optional[int] = None
    x10: List[float] = field(default_factory=list)
    x20: List[float] = field(default_factory=list)
    out: Optional[str] = None
    svg: Optional[str] = None
    csv: Optional[str] = None
    workers: int = 1
    backend: str = 'auto'
    prominence: float = 0.05

    def single(self, name: str) -> float:
        """The one value of a parameter grid; eta and traj take no sweeps."""
        values = getattr(self, name)
        if len(values) != 1:
            raise ParameterError(f"expected a single value for {name.rstrip('s')}, got {len(values)}")
        return values[0]

    def step(self, default: float) -> float:
        return self.dt if self.dt is not None else default


def resolve(flags: Mapping[str, Optional[str]], config_path: Optional[str] = None,
            require_mu: bool = True) -> RunConfig:
    """Merge flags over config-file keys over DEFAULTS.

    Args:
        flags: Raw flag strings keyed by long flag name; None means not given
        config_path: Optional flat key=value config file
        require_mu: Whether a missing mu is a usage error

    Raises:
        ParameterError: On unknown keys, malformed values or a missing mu
    """
    values = dict(DEFAULTS)
    if config_path:
        values.update(load_config_file(config_path))
    values.update({k: v for k, v in flags.items() if v is not None})

    mus = _get_float_list(values, 'mu')
    if require_mu and not mus:
        raise ParameterError("--mu is required (on the command line or in the config file)")

    return RunConfig(
        scenario=Scenario.parse(_get_str(values, 'scenario')),
        gammas=_get_float_list(values, 'gamma') or [],
        temps=_get_float_list(values, 'temp') or [],
        mus=mus or [],
        t_end=_get_float(values, 't-end', min_val=0.0),
        dt=_get_float(values, 'dt', min_val=0.0, allow_equal_min=False),
        seed=_get_int(values, 'seed', min_val=0),
        n=_get_int(values, 'n', min_val=1),
        x10=_get_float_list(values, 'x10') or [],
        x20=_get_float_list(values, 'x20') or [],
        out=_get_str(values, 'out'),
        svg=_get_str(values, 'svg'),
        csv=_get_str(values, 'csv'),
        workers=_get_int(values, 'workers', min_val=1),
        backend=_get_str(values, 'backend').lower(),
        prominence=_get_float(values, 'prominence', min_val=0.0, max_val=1.0),
    )
