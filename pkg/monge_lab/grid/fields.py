# SPDX-License-Identifier: MIT
"""
Campos escalares y campos de matrices hermíticas sobre un dominio discreto.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from ..constants import HERMITIAN_RTOL
from ..errors import DomainError
from .domain import GridDomain


class Positivity(str, Enum):
    """Etiqueta de positividad de un campo hermítico."""

    NONE = "none"
    SEMIDEFINITE = "semidefinite"
    DEFINITE = "definite"


def _readonly(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Valores reales en todos los nodos de la malla.

    Los nodos exteriores llevan NaN; los interiores deben ser finitos.
    """

    domain: GridDomain
    values: np.ndarray
    name: str = ""

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != self.domain.grid_shape:
            raise DomainError(
                f"Forma {values.shape} incompatible con la malla {self.domain.grid_shape}"
            )
        if not np.all(np.isfinite(values[self.domain.interior_mask])):
            raise DomainError(f"El campo '{self.name}' no es finito en el interior")
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def from_function(
        cls,
        domain: GridDomain,
        func: Callable[..., np.ndarray],
        name: str = "",
    ) -> "ScalarField":
        """Evalúa ``func(x1, y1, ...)`` en los nodos no exteriores."""
        raw = np.broadcast_to(np.asarray(func(*domain.coordinates), dtype=float), domain.grid_shape)
        values = np.where(domain.exterior_mask, np.nan, raw)
        return cls(domain, values, name)

    @classmethod
    def constant(cls, domain: GridDomain, value: float, name: str = "") -> "ScalarField":
        values = np.where(domain.exterior_mask, np.nan, float(value))
        return cls(domain, values, name)

    @classmethod
    def from_interior(
        cls,
        domain: GridDomain,
        interior_values: np.ndarray,
        boundary: Optional[np.ndarray] = None,
        name: str = "",
    ) -> "ScalarField":
        """Construye el campo a partir de los valores interiores (orden C).

        ``boundary`` es un arreglo de la malla completa del que se toman los
        valores de banda; por defecto, cero.
        """
        values = np.full(domain.grid_shape, np.nan)
        values[domain.band_mask] = 0.0 if boundary is None else boundary[domain.band_mask]
        values.reshape(-1)[domain.interior_index] = interior_values
        return cls(domain, values, name)

    def interior_values(self) -> np.ndarray:
        return self.values.reshape(-1)[self.domain.interior_index]

    def with_values(self, values: np.ndarray, name: Optional[str] = None) -> "ScalarField":
        return ScalarField(self.domain, values, self.name if name is None else name)

    def value_at(self, node: Sequence[int]) -> float:
        return float(self.values[tuple(node)])

    def sup(self) -> float:
        return float(np.max(self.interior_values()))

    def inf(self) -> float:
        return float(np.min(self.interior_values()))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.interior_values())))


@dataclass(frozen=True, eq=False)
class HermitianField:
    """Una matriz hermítica m x m por nodo interior (orden C)."""

    domain: GridDomain
    matrices: np.ndarray
    positivity: Positivity = Positivity.NONE

    def __post_init__(self) -> None:
        matrices = np.array(self.matrices, dtype=complex)
        m = self.domain.m
        expected = (self.domain.num_interior, m, m)
        if matrices.shape != expected:
            raise DomainError(f"Forma {matrices.shape} distinta de {expected}")
        scale = max(1.0, float(np.max(np.abs(matrices), initial=0.0)))
        defect = np.max(np.abs(matrices - np.conj(np.swapaxes(matrices, -1, -2))), initial=0.0)
        if not defect <= HERMITIAN_RTOL * scale:
            raise DomainError(f"Campo no hermítico (defecto {defect:.3e})")
        object.__setattr__(self, "matrices", _readonly(matrices))
        if self.positivity is Positivity.DEFINITE and not np.all(self.min_eigenvalue() > 0):
            raise DomainError("Campo etiquetado como definido positivo con autovalores <= 0")
        if self.positivity is Positivity.SEMIDEFINITE and not np.all(
            self.min_eigenvalue() >= -HERMITIAN_RTOL * scale
        ):
            raise DomainError("Campo etiquetado como semidefinido con autovalores negativos")

    @classmethod
    def identity(cls, domain: GridDomain) -> "HermitianField":
        shape = (domain.num_interior, domain.m, domain.m)
        eye = np.broadcast_to(np.eye(domain.m, dtype=complex), shape)
        return cls(domain, eye.copy(), Positivity.DEFINITE)

    def trace(self) -> np.ndarray:
        return np.real(np.trace(self.matrices, axis1=-2, axis2=-1))

    def min_eigenvalue(self) -> np.ndarray:
        from .hermitian import min_eigenvalue_array

        return min_eigenvalue_array(self.matrices)

    def classify(self) -> Positivity:
        smallest = self.min_eigenvalue()
        if np.all(smallest > 0):
            return Positivity.DEFINITE
        if np.all(smallest >= 0):
            return Positivity.SEMIDEFINITE
        return Positivity.NONE

    def labelled(self) -> "HermitianField":
        """Devuelve una copia con la etiqueta de positividad calculada."""
        return HermitianField(self.domain, self.matrices, self.classify())

    def at_node(self, node: Sequence[int]) -> np.ndarray:
        flat = int(np.ravel_multi_index(tuple(node), self.domain.grid_shape))
        position = int(self.domain.interior_position[flat])
        if position < 0:
            raise DomainError(f"El nodo {tuple(node)} no es interior")
        return self.matrices[position]
