# SPDX-License-Identifier: MIT
"""
Opciones del solver de Newton amortiguado.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from ..errors import DomainError


class Initializer(str, Enum):
    """Iterado inicial del solve de Dirichlet."""

    BARRIER = "barrier"
    ZERO = "zero"
    SUPPLIED = "supplied"


@dataclass(frozen=True)
class SolveOptions:
    """Parámetros del Newton amortiguado con búsqueda lineal.

    El paso se reduce por ``shrink`` hasta ``min_step``; un paso solo se
    acepta si el autovalor mínimo del hessiano supera ``positivity_floor``
    y el residuo en norma del supremo decrece estrictamente.
    """

    max_iterations: int = 50
    tolerance: float = 1e-10
    shrink: float = 0.5
    min_step: float = 1e-6
    positivity_floor: float = 1e-10
    initializer: Initializer = Initializer.BARRIER
    max_continuation_steps: int = 24

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise DomainError("max_iterations debe ser positivo")
        if not self.tolerance > 0:
            raise DomainError("tolerance debe ser positiva")
        if not 0.0 < self.shrink < 1.0:
            raise DomainError("shrink debe estar en (0, 1)")
        if not 0.0 < self.min_step <= 1.0:
            raise DomainError("min_step debe estar en (0, 1]")
        if self.positivity_floor < 0:
            raise DomainError("positivity_floor no puede ser negativo")
        object.__setattr__(self, "initializer", Initializer(self.initializer))

    def with_updates(self, **changes) -> "SolveOptions":
        return replace(self, **changes)
