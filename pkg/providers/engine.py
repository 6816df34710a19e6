"""Velocity field reconstructed from propagated Wigner moments."""
import logging
import math
import threading
from typing import Dict, List

import numpy as np

import gaussian_engine as ge
from closed_form import ForcePair
from core import ArrayLike, ParameterError, PhysParams, Scenario, check_time

from .base import LinearVelocityField

logger = logging.getLogger(__name__)

ANCHOR_STEP = 0.05
MAX_CACHED = 200_000


class EngineField(LinearVelocityField):
    """Any scenario and any mu, served by the Gaussian moment propagator.

    Moments at time t are propagated from the anchor k*ANCHOR_STEP just below
    t; anchors are built in order from t = 0. The result therefore does not
    depend on which times were requested before, so concurrent callers get
    bit-identical values. The cache is guarded by a lock.
    """

    def __init__(self, scenario: Scenario, params: PhysParams):
        self.scenario = Scenario.parse(scenario)
        self.params = params.for_scenario(self.scenario)
        self.dd = ge.drift_diffusion(self.params, self.scenario)
        self._lock = threading.Lock()
        self._anchors: List[ge.WignerMoments] = [ge.initial_moments(self.params.mu)]
        self._cache: Dict[float, ge.WignerMoments] = {}

    def _anchor_below(self, t: float) -> ge.WignerMoments:
        k = int(math.floor(t / ANCHOR_STEP))
        while len(self._anchors) <= k:
            self._anchors.append(ge.propagate(self._anchors[-1], self.dd, len(self._anchors) * ANCHOR_STEP))
        while self._anchors[k].t > t:
            k -= 1
        return self._anchors[k]

    def moments(self, t: float) -> ge.WignerMoments:
        """Wigner moments at time t."""
        t = check_time(t)
        with self._lock:
            cached = self._cache.get(t)
            if cached is not None:
                return cached
            m = ge.propagate(self._anchor_below(t), self.dd, t)
            if len(self._cache) >= MAX_CACHED:
                self._cache.clear()
            self._cache[t] = m
            return m

    def matrix(self, t: float) -> np.ndarray:
        return ge.velocity_coeffs(self.moments(t)).matrix

    def kernel(self, t: float) -> ge.GaussianKernel:
        return ge.kernel_from_moments(self.moments(t))

    def quantum_force(self, x1: ArrayLike, x2: ArrayLike, t: float) -> ForcePair:
        g = ge.force_matrix(self.kernel(t))
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return ForcePair(g[0, 0] * x1 + g[0, 1] * x2, g[1, 0] * x1 + g[1, 1] * x2)

    def cleanup(self):
        """Drop cached moments, keeping only t = 0."""
        with self._lock:
            self._anchors = self._anchors[:1]
            self._cache.clear()
        logger.debug("Cleared moment cache for scenario '%s'", self.scenario.value)


def check_backend(name: str) -> str:
    name = (name or 'auto').lower()
    if name not in ('auto', 'closed_form', 'engine'):
        raise ParameterError(f"Unknown backend: '{name}'. Available backends: auto, closed_form, engine")
    return name
