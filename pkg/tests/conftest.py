"""Shared fixtures and utilities for tests."""
import tempfile
from pathlib import Path
from typing import Generator

import numpy as np
import pytest

from core import PhysParams, make_params
from measures import EtaCurve


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def bath_params() -> PhysParams:
    """Reference bath parameters: gamma=0.1, T=10, mu=0.5 (D=2)."""
    return make_params(0.1, 10.0, 0.5)


@pytest.fixture
def unsqueezed_params() -> PhysParams:
    """Bath parameters for a separable (mu=1) initial state."""
    return make_params(0.1, 10.0, 1.0)


@pytest.fixture
def tiny_bath_params() -> PhysParams:
    """Bath so weak that every expression should sit on its unitary limit."""
    return make_params(1e-8, 1e-8, 0.5)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for random test points."""
    return np.random.default_rng(20240601)


@pytest.fixture
def triangle_curve() -> EtaCurve:
    """Symmetric triangle of height 1 centred at t=2 with half-width 0.5 at its base."""
    times = np.linspace(0.0, 4.0, 401)
    values = np.maximum(0.0, 1.0 - np.abs(times - 2.0) / 0.5)
    return EtaCurve(times=times, values=values)


@pytest.fixture
def config_file(temp_dir: Path) -> Path:
    """Flat key=value run configuration."""
    path = temp_dir / "run.conf"
    path.write_text("# reference run\nscenario=distinct\nmu=0.5\ntemp=15\nt-end=4\n")
    return path


@pytest.fixture(autouse=True)
def no_env_dependence(monkeypatch):
    """Poison environment variables a careless implementation might read."""
    for key in ('MU', 'GAMMA', 'TEMP', 'T_END', 'DT', 'SCENARIO', 'SEED'):
        monkeypatch.setenv(key, 'garbage')
    yield
