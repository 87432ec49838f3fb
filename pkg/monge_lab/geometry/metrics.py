# SPDX-License-Identifier: MIT
"""
Modelos de métricas de Kähler con potencial, métrica y curvatura cerrados.

Convención: ``metric(z)[i, j] = g_{i j̄}`` y
``curvature(z)[i, j, k, l] = R_{i j̄ k l̄}``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Sequence, Tuple

import numpy as np

from ..errors import ChartDomainError, UnknownMetricError

logger = logging.getLogger(__name__)


class MetricKind(str, Enum):
    FLAT = "flat"
    FUBINI_STUDY = "fubini-study"
    HYPERBOLIC = "hyperbolic"
    PRODUCT = "product"


@dataclass(frozen=True)
class MetricModel:
    """Métrica de Kähler en una carta de C^m.

    Los modelos producto combinan factores sobre bloques consecutivos de
    coordenadas.
    """

    name: str
    kind: MetricKind
    m: int
    obc_expected: bool = True
    factors: Tuple["MetricModel", ...] = ()

    # ------------------------------------------------------------------
    def _point(self, z: Sequence[complex]) -> np.ndarray:
        point = np.asarray(z, dtype=complex).reshape(-1)
        if point.size != self.m:
            raise ChartDomainError(f"Se esperaban {self.m} coordenadas, se recibieron {point.size}")
        if not self.contains(point):
            raise ChartDomainError(f"El punto {point} está fuera de la carta de {self.name}")
        return point

    def contains(self, z: Sequence[complex]) -> bool:
        point = np.asarray(z, dtype=complex).reshape(-1)
        if self.kind is MetricKind.HYPERBOLIC:
            return bool(np.sum(np.abs(point) ** 2) < 1.0)
        if self.kind is MetricKind.PRODUCT:
            return all(factor.contains(part) for factor, part in self._split(point))
        return bool(np.all(np.isfinite(point)))

    def _split(self, point: np.ndarray):
        offset = 0
        for factor in self.factors:
            yield factor, point[offset : offset + factor.m]
            offset += factor.m

    # ------------------------------------------------------------------
    def potential(self, z: Sequence[complex]) -> float:
        """Potencial de Kähler real en ``z``."""
        point = self._point(z)
        norm2 = float(np.sum(np.abs(point) ** 2))
        if self.kind is MetricKind.FLAT:
            return norm2
        if self.kind is MetricKind.FUBINI_STUDY:
            return float(np.log1p(norm2))
        if self.kind is MetricKind.HYPERBOLIC:
            return float(-np.log1p(-norm2))
        return float(sum(factor.potential(part) for factor, part in self._split(point)))

    def metric(self, z: Sequence[complex]) -> np.ndarray:
        point = self._point(z)
        if self.kind is MetricKind.PRODUCT:
            g = np.zeros((self.m, self.m), dtype=complex)
            offset = 0
            for factor, part in self._split(point):
                block = slice(offset, offset + factor.m)
                g[block, block] = factor.metric(part)
                offset += factor.m
            return g
        eye = np.eye(self.m, dtype=complex)
        if self.kind is MetricKind.FLAT:
            return eye
        outer = np.outer(np.conj(point), point)
        norm2 = float(np.sum(np.abs(point) ** 2))
        if self.kind is MetricKind.FUBINI_STUDY:
            sigma = 1.0 + norm2
            return eye / sigma - outer / sigma**2
        sigma = 1.0 - norm2
        return eye / sigma + outer / sigma**2

    def curvature(self, z: Sequence[complex]) -> np.ndarray:
        point = self._point(z)
        m = self.m
        if self.kind is MetricKind.FLAT:
            return np.zeros((m, m, m, m), dtype=complex)
        if self.kind is MetricKind.PRODUCT:
            tensor = np.zeros((m, m, m, m), dtype=complex)
            offset = 0
            for factor, part in self._split(point):
                block = slice(offset, offset + factor.m)
                tensor[block, block, block, block] = factor.curvature(part)
                offset += factor.m
            return tensor
        g = self.metric(point)
        constant_form = np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g)
        if self.kind is MetricKind.FUBINI_STUDY:
            return constant_form
        return -constant_form


def _flat(m: int) -> MetricModel:
    return MetricModel(f"flat-{m}", MetricKind.FLAT, m)


def _fubini_study(m: int) -> MetricModel:
    return MetricModel(f"fubini-study-{m}", MetricKind.FUBINI_STUDY, m)


def _flat_times_fubini_study() -> MetricModel:
    factors = (_flat(1), _fubini_study(1))
    return MetricModel("flat-x-fubini-study", MetricKind.PRODUCT, 2, True, factors)


def _hyperbolic(m: int) -> MetricModel:
    name = "poincare-disk" if m == 1 else f"complex-hyperbolic-{m}"
    return MetricModel(name, MetricKind.HYPERBOLIC, m, obc_expected=False)


METRIC_FACTORIES: Dict[str, Callable[[], MetricModel]] = {
    "flat": lambda: _flat(2),
    "flat-1": lambda: _flat(1),
    "flat-2": lambda: _flat(2),
    "fubini-study-1": lambda: _fubini_study(1),
    "fubini-study-2": lambda: _fubini_study(2),
    "flat-x-fubini-study": _flat_times_fubini_study,
    "poincare-disk": lambda: _hyperbolic(1),
    "complex-hyperbolic-2": lambda: _hyperbolic(2),
}


def available_metrics() -> Tuple[str, ...]:
    return tuple(sorted(METRIC_FACTORIES))


def get_metric(name: str) -> MetricModel:
    """Devuelve el modelo registrado con ``name``."""
    try:
        factory = METRIC_FACTORIES[name]
    except KeyError:
        raise UnknownMetricError(
            f"Métrica desconocida '{name}'. Disponibles: {', '.join(available_metrics())}"
        ) from None
    return factory()


def sample_points(model: MetricModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Muestra ``count`` puntos dentro de la carta del modelo."""
    radius = 0.9 if model.kind is MetricKind.HYPERBOLIC else 1.5
    if model.kind is MetricKind.PRODUCT and any(
        f.kind is MetricKind.HYPERBOLIC for f in model.factors
    ):
        radius = 0.9
    raw = rng.standard_normal((count, model.m)) + 1j * rng.standard_normal((count, model.m))
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    scale = radius * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / (2 * model.m))
    return raw / np.where(norms == 0, 1.0, norms) * scale
