# SPDX-License-Identifier: MIT
"""
Dominios discretos uniformes en C^m identificado con R^{2m}.

Los ejes se ordenan (x1, y1, x2, y2, ...): el eje 2j es la parte real de
z_{j+1} y el eje 2j+1 su parte imaginaria.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum, IntEnum
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ..errors import DomainError

MIN_NODES_PER_AXIS = 5
SUPPORTED_DIMENSIONS = (1, 2)


class DomainShape(str, Enum):
    """Geometrías de dominio soportadas."""

    BALL = "ball"
    BOX = "box"
    TORUS = "torus"


class NodeClass(IntEnum):
    """Clasificación de cada nodo de la malla."""

    INTERIOR = 0
    BAND = 1
    EXTERIOR = 2


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Malla uniforme con nodos clasificados en interior, banda y exterior.

    ``extent`` es el radio de la bola, el semiancho de la caja o el periodo
    del toro según ``shape``.
    """

    m: int
    shape: DomainShape
    n: int
    extent: float
    center: Tuple[float, ...]

    def __post_init__(self) -> None:
        if self.m not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"Dimensión compleja no soportada: m={self.m}")
        if self.n < MIN_NODES_PER_AXIS:
            raise DomainError(f"Se requieren al menos {MIN_NODES_PER_AXIS} nodos por eje")
        if not self.extent > 0:
            raise DomainError("La extensión del dominio debe ser positiva")
        if len(self.center) != 2 * self.m:
            raise DomainError("El centro debe tener 2m coordenadas reales")
        if not np.any(self.classes == NodeClass.INTERIOR):
            raise DomainError("La malla no contiene nodos interiores")

    @classmethod
    def ball(
        cls, m: int, n: int, radius: float = 1.0, center: Optional[Sequence[float]] = None
    ) -> "GridDomain":
        """Bola de radio ``radius`` discretizada en la caja [c-R, c+R]^{2m}."""
        return cls(m, DomainShape.BALL, n, float(radius), _center(m, center))

    @classmethod
    def box(
        cls, m: int, n: int, half_width: float = 1.0, center: Optional[Sequence[float]] = None
    ) -> "GridDomain":
        return cls(m, DomainShape.BOX, n, float(half_width), _center(m, center))

    @classmethod
    def torus(cls, m: int, n: int, period: float = 1.0) -> "GridDomain":
        """Toro plano R^{2m} / (period Z)^{2m}."""
        return cls(m, DomainShape.TORUS, n, float(period), (0.0,) * (2 * m))

    # ------------------------------------------------------------------
    # Geometría básica
    # ------------------------------------------------------------------
    @property
    def dim(self) -> int:
        return 2 * self.m

    @property
    def is_periodic(self) -> bool:
        return self.shape is DomainShape.TORUS

    @property
    def grid_shape(self) -> Tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def h(self) -> float:
        if self.is_periodic:
            return self.extent / self.n
        return 2.0 * self.extent / (self.n - 1)

    @cached_property
    def axes(self) -> Tuple[np.ndarray, ...]:
        """Coordenadas 1D de cada eje."""
        steps = np.arange(self.n, dtype=float) * self.h
        if self.is_periodic:
            return tuple(steps.copy() for _ in range(self.dim))
        return tuple(c - self.extent + steps for c in self.center)

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Coordenadas reales de cada nodo (indexación matricial)."""
        grids = np.meshgrid(*self.axes, indexing="ij")
        for grid in grids:
            grid.setflags(write=False)
        return tuple(grids)

    @cached_property
    def squared_radius(self) -> np.ndarray:
        """|z - c|^2 en cada nodo."""
        total = np.zeros(self.grid_shape)
        for coord, c in zip(self.coordinates, self.center):
            total += (coord - c) ** 2
        total.setflags(write=False)
        return total

    def complex_coordinates(self) -> List[np.ndarray]:
        """z_j = x_j + i y_j en cada nodo."""
        coords = self.coordinates
        return [coords[2 * j] + 1j * coords[2 * j + 1] for j in range(self.m)]

    # ------------------------------------------------------------------
    # Clasificación de nodos
    # ------------------------------------------------------------------
    @cached_property
    def classes(self) -> np.ndarray:
        classes = np.full(self.grid_shape, NodeClass.EXTERIOR, dtype=np.int8)
        if self.is_periodic:
            classes[...] = NodeClass.INTERIOR
        elif self.shape is DomainShape.BOX:
            classes[...] = NodeClass.BAND
            inner = (slice(1, self.n - 1),) * self.dim
            classes[inner] = NodeClass.INTERIOR
        else:
            interior = np.sqrt(self.squared_radius) < self.extent - self.h
            band = _stencil_dilation(interior) & ~interior
            classes[interior] = NodeClass.INTERIOR
            classes[band] = NodeClass.BAND
        classes.setflags(write=False)
        return classes

    @cached_property
    def interior_mask(self) -> np.ndarray:
        return self.classes == NodeClass.INTERIOR

    @cached_property
    def band_mask(self) -> np.ndarray:
        return self.classes == NodeClass.BAND

    @cached_property
    def exterior_mask(self) -> np.ndarray:
        return self.classes == NodeClass.EXTERIOR

    @cached_property
    def interior_index(self) -> np.ndarray:
        """Índices planos (orden C) de los nodos interiores."""
        return np.flatnonzero(self.interior_mask)

    @cached_property
    def interior_position(self) -> np.ndarray:
        """Posición de cada nodo en la numeración interior (-1 si no es interior)."""
        positions = np.full(self.size, -1, dtype=np.int64)
        positions[self.interior_index] = np.arange(self.interior_index.size)
        return positions

    @property
    def num_interior(self) -> int:
        return int(self.interior_index.size)

    @cached_property
    def band_anchors(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Extensión de los datos nulos sobre la esfera a la banda de la bola.

        Cada nodo de banda b se ancla al nodo interior p más profundo de su
        entorno cúbico y toma u_b = w_b u_p con
        w_b = (s_b - R²) / (s_p - R²), s = |z - c|². La regla reproduce
        exactamente a (|z - c|² - R²) y tiene error O(h²) para datos suaves
        que se anulan en la esfera. En cajas la banda está sobre la
        frontera y lleva cero, así que no hay anclas.
        """
        if self.shape is not DomainShape.BALL:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        band = np.flatnonzero(self.band_mask)
        nodes = np.stack(np.unravel_index(band, self.grid_shape), axis=-1)
        offsets = np.array(list(itertools.product((-1, 0, 1), repeat=self.dim)))
        candidates = nodes[:, None, :] + offsets[None, :, :]
        inside = np.all((candidates >= 0) & (candidates < self.n), axis=-1)
        clipped = np.clip(candidates, 0, self.n - 1)
        flat = np.ravel_multi_index(tuple(np.moveaxis(clipped, -1, 0)), self.grid_shape)
        admissible = inside & self.interior_mask.reshape(-1)[flat]

        s = self.squared_radius.reshape(-1)
        depth = np.where(admissible, s[flat], np.inf)
        anchors = flat[np.arange(band.size), np.argmin(depth, axis=1)]
        r2 = self.extent**2
        weights = (s[band] - r2) / (s[anchors] - r2)
        return band, anchors, weights

    def inner_mask(self, depth: int) -> np.ndarray:
        """Nodos interiores cuyo entorno cúbico de radio ``depth`` es interior."""
        if depth <= 0 or self.is_periodic:
            return self.interior_mask.copy()
        structure = np.ones((3,) * self.dim, dtype=bool)
        return ndimage.binary_erosion(
            self.interior_mask, structure=structure, iterations=depth, border_value=0
        )

    def node_of(self, flat_index: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(flat_index, self.grid_shape))

    def describe(self) -> dict:
        return {
            "m": self.m,
            "shape": self.shape.value,
            "n": self.n,
            "h": self.h,
            "extent": self.extent,
            "center": list(self.center),
            "interior_nodes": self.num_interior,
        }

    def compatible_with(self, other: "GridDomain") -> bool:
        return (
            self.m == other.m
            and self.shape is other.shape
            and self.n == other.n
            and np.isclose(self.extent, other.extent)
            and np.allclose(self.center, other.center)
        )


def _center(m: int, center: Optional[Sequence[float]]) -> Tuple[float, ...]:
    if center is None:
        return (0.0,) * (2 * m)
    return tuple(float(value) for value in center)


def _stencil_dilation(mask: np.ndarray) -> np.ndarray:
    structure = np.ones((3,) * mask.ndim, dtype=bool)
    return ndimage.binary_dilation(mask, structure=structure)
