# SPDX-License-Identifier: MIT
"""
Solución exacta del problema de Dirichlet radial en la bola.

Para u(z) = v(s) con s = |z|², (s v')^m derivado respecto de s vale
m s^{m-1} f, de donde s v'(s) = (m ∫_0^s t^{m-1} f(t) dt)^{1/m} y
v(R²) = 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ..errors import DomainError
from ..grid.domain import DomainShape, GridDomain
from ..grid.fields import ScalarField

logger = logging.getLogger(__name__)

QUAD_OPTIONS = {"epsabs": 1e-13, "epsrel": 1e-12, "limit": 200}


@dataclass(frozen=True)
class RadialProfile:
    """Perfil v(s) de la solución radial con densidad f(s)."""

    m: int
    radius: float
    density: Callable[[float], float]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("m debe ser positivo")
        if self.radius <= 0:
            raise DomainError("El radio debe ser positivo")
        samples = [self._density(s) for s in np.linspace(0.0, self.radius**2, 129)]
        if any(value < 0 for value in samples):
            raise DomainError("La densidad radial debe ser no negativa")

    def _density(self, s: float) -> float:
        value = float(self.density(s))
        if value < 0:
            raise DomainError(f"Densidad radial negativa en s={s:.4g}")
        return value

    def mass(self, s: float) -> float:
        """∫_0^s t^{m-1} f(t) dt."""
        if s <= 0:
            return 0.0
        value, _ = integrate.quad(
            lambda t: t ** (self.m - 1) * self._density(t), 0.0, s, **QUAD_OPTIONS
        )
        return value

    def derivative(self, s: float) -> float:
        """v'(s); en s = 0 vale f(0)^{1/m}."""
        if s <= 0:
            return self._density(0.0) ** (1.0 / self.m)
        return (self.m * self.mass(s)) ** (1.0 / self.m) / s

    def value(self, s: float) -> float:
        upper = self.radius**2
        if s >= upper:
            return 0.0
        integral, _ = integrate.quad(self.derivative, s, upper, **QUAD_OPTIONS)
        return -integral

    def __call__(self, s) -> np.ndarray:
        values = np.asarray(s, dtype=float)
        unique, inverse = np.unique(values, return_inverse=True)
        evaluated = np.array([self.value(float(item)) for item in unique])
        return evaluated[inverse].reshape(values.shape)

    def on_domain(self, domain: GridDomain) -> ScalarField:
        """Evalúa u(z) = v(|z - c|²) en los nodos no exteriores de una bola."""
        if domain.shape is not DomainShape.BALL or domain.m != self.m:
            raise DomainError("El perfil radial se evalúa sobre una bola de la misma dimensión")
        if not np.isclose(domain.extent, self.radius):
            raise DomainError("El radio del dominio no coincide con el del perfil")
        known = ~domain.exterior_mask
        values = np.full(domain.grid_shape, np.nan)
        values[known] = self(domain.squared_radius[known])
        logger.debug("Oráculo radial evaluado en %d nodos", int(np.count_nonzero(known)))
        return ScalarField(domain, values, "radial_oracle")


def radial_oracle(density: Callable[[float], float], m: int, radius: float = 1.0) -> RadialProfile:
    """Perfil exacto para una densidad radial f(s), s = |z|²."""
    return RadialProfile(m, float(radius), density)
