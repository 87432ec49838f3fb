# SPDX-License-Identifier: MIT
"""
Álgebra cerrada de matrices hermíticas 1x1 y 2x2 por nodo.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import DomainError
from .fields import HermitianField, Positivity, ScalarField

SINGULAR_RTOL = 1e-14


def det_array(matrices: np.ndarray) -> np.ndarray:
    """Determinante real de un lote de matrices hermíticas (..., m, m)."""
    m = matrices.shape[-1]
    if m == 1:
        return np.real(matrices[..., 0, 0])
    if m == 2:
        a = np.real(matrices[..., 0, 0])
        d = np.real(matrices[..., 1, 1])
        b = matrices[..., 0, 1]
        return a * d - np.abs(b) ** 2
    return np.real(np.linalg.det(matrices))


def inverse_array(matrices: np.ndarray, det: np.ndarray) -> np.ndarray:
    """Inversa por adjunta; el llamador garantiza det != 0."""
    m = matrices.shape[-1]
    if m == 1:
        return (1.0 / det)[..., None, None].astype(complex)
    if m == 2:
        inverse = np.empty_like(matrices)
        inverse[..., 0, 0] = matrices[..., 1, 1] / det
        inverse[..., 1, 1] = matrices[..., 0, 0] / det
        inverse[..., 0, 1] = -matrices[..., 0, 1] / det
        inverse[..., 1, 0] = -matrices[..., 1, 0] / det
        return inverse
    return np.linalg.inv(matrices)


def min_eigenvalue_array(matrices: np.ndarray) -> np.ndarray:
    """Autovalor mínimo; fórmula cerrada para m <= 2."""
    m = matrices.shape[-1]
    if m == 1:
        return np.real(matrices[..., 0, 0])
    if m == 2:
        a = np.real(matrices[..., 0, 0])
        d = np.real(matrices[..., 1, 1])
        b = np.abs(matrices[..., 0, 1])
        return 0.5 * (a + d) - np.sqrt((0.5 * (a - d)) ** 2 + b**2)
    return np.linalg.eigvalsh(matrices)[..., 0]


@dataclass(frozen=True)
class DeterminantResult:
    """Determinante e inversa de un campo hermítico.

    ``singular_nodes`` enumera los nodos donde no se calculó la inversa; allí
    la inversa vale cero.
    """

    det: ScalarField
    inverse: HermitianField
    singular_nodes: Tuple[Tuple[int, ...], ...]

    def __iter__(self):
        yield self.det
        yield self.inverse


def hermitian_det_inv(field: HermitianField) -> DeterminantResult:
    domain = field.domain
    if domain.m not in (1, 2):
        raise DomainError("Solo se admiten matrices 1x1 y 2x2")
    matrices = field.matrices
    det = det_array(matrices)
    scale = np.max(np.abs(matrices), axis=(-2, -1)) ** domain.m
    singular = np.abs(det) <= SINGULAR_RTOL * np.maximum(scale, np.finfo(float).tiny)

    safe_det = np.where(singular, 1.0, det)
    inverse = inverse_array(matrices, safe_det)
    inverse[singular] = 0.0

    det_values = np.full(domain.size, np.nan)
    det_values[domain.interior_index] = det
    det_field = ScalarField(domain, det_values.reshape(domain.grid_shape), "det")

    definite = field.positivity is Positivity.DEFINITE and not np.any(singular)
    positivity = Positivity.DEFINITE if definite else Positivity.NONE
    singular_nodes = tuple(domain.node_of(int(i)) for i in domain.interior_index[singular])
    return DeterminantResult(
        det_field, HermitianField(domain, inverse, positivity), singular_nodes
    )
