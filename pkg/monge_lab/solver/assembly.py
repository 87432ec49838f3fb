# SPDX-License-Identifier: MIT
"""
Matrices dispersas de los operadores de diferencias finitas y del
linealizado de log det.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from ..grid.domain import GridDomain
from ..grid.operators import assemble_complex_hessian

logger = logging.getLogger(__name__)


def _first_difference_1d(n: int, h: float, periodic: bool) -> sparse.csr_matrix:
    ones = np.ones(n)
    matrix = sparse.spdiags([-ones, ones], [-1, 1], n, n, format="lil")
    if periodic:
        matrix[0, n - 1] = -1.0
        matrix[n - 1, 0] = 1.0
    return (matrix.tocsr() / (2.0 * h)).tocsr()


def _second_difference_1d(n: int, h: float, periodic: bool) -> sparse.csr_matrix:
    ones = np.ones(n)
    matrix = sparse.spdiags([ones, -2.0 * ones, ones], [-1, 0, 1], n, n, format="lil")
    if periodic:
        matrix[0, n - 1] = 1.0
        matrix[n - 1, 0] = 1.0
    return (matrix.tocsr() / (h * h)).tocsr()


def band_extension(domain: GridDomain) -> sparse.csr_matrix:
    """Matriz E (malla completa x incógnitas) con u = E u_int.

    Identidad en los nodos interiores, pesos de ``GridDomain.band_anchors``
    en la banda y cero en el resto.
    """
    count = domain.num_interior
    band, anchors, weights = domain.band_anchors
    rows = np.concatenate([domain.interior_index, band])
    columns = np.concatenate([np.arange(count), domain.interior_position[anchors]])
    data = np.concatenate([np.ones(count), weights])
    return sparse.csr_matrix((data, (rows, columns)), shape=(domain.size, count))


def _on_axis(matrix: sparse.spmatrix, axis: int, n: int, dim: int) -> sparse.csr_matrix:
    """Extiende un operador 1D al eje ``axis`` de la malla (orden C)."""
    before = sparse.identity(n**axis, format="csr")
    after = sparse.identity(n ** (dim - axis - 1), format="csr")
    return sparse.kron(before, sparse.kron(matrix, after, format="csr"), format="csr")


class DiscreteOperators:
    """Operadores D_ab restringidos a las filas interiores.

    ``full[(a, b)]`` actúa sobre la malla completa (incluye la banda);
    ``interior[(a, b)]`` sobre las incógnitas interiores, con la banda
    extendida por ``extension``.
    """

    def __init__(self, domain: GridDomain) -> None:
        self.domain = domain
        n, dim, h = domain.n, domain.dim, domain.h
        periodic = domain.is_periodic
        rows = domain.interior_index
        self.extension = band_extension(domain)

        first = [_on_axis(_first_difference_1d(n, h, periodic), a, n, dim) for a in range(dim)]
        second_1d = _second_difference_1d(n, h, periodic)

        self.full: Dict[Tuple[int, int], sparse.csr_matrix] = {}
        self.interior: Dict[Tuple[int, int], sparse.csr_matrix] = {}
        for a in range(dim):
            for b in range(a, dim):
                if a == b:
                    operator = _on_axis(second_1d, a, n, dim)
                else:
                    operator = (first[a] @ first[b]).tocsr()
                restricted = operator[rows]
                self.full[(a, b)] = restricted.tocsr()
                self.interior[(a, b)] = (restricted @ self.extension).tocsr()
        logger.debug(
            "Operadores ensamblados: %d incógnitas, %d pares", rows.size, len(self.full)
        )

    @property
    def pairs(self):
        return tuple(self.full)

    def second_derivatives(self, full_values: np.ndarray) -> Dict[Tuple[int, int], np.ndarray]:
        flat = full_values.reshape(-1)
        return {pair: matrix @ flat for pair, matrix in self.full.items()}

    def complex_hessian(self, full_values: np.ndarray) -> np.ndarray:
        """Hessiano complejo (K, m, m) en los nodos interiores."""
        return assemble_complex_hessian(self.second_derivatives(full_values), self.domain.m)

    def laplacian(self) -> sparse.csr_matrix:
        """Laplaciano complejo sobre las incógnitas interiores."""
        total = sum(self.interior[(a, a)] for a in range(self.domain.dim))
        return (0.25 * total).tocsr()

    def extend(self, interior: np.ndarray, offset: Optional[np.ndarray] = None) -> np.ndarray:
        """Valores en la malla completa (plana): E u_int más un desplazamiento de banda."""
        values = self.extension @ interior
        if offset is not None:
            band = self.domain.band_mask.reshape(-1)
            values[band] += np.nan_to_num(offset.reshape(-1)[band])
        return values

    def laplacian_boundary_term(self, full_values: np.ndarray) -> np.ndarray:
        """Contribución de los valores de banda al laplaciano en el interior."""
        boundary = np.where(self.domain.interior_mask, 0.0, full_values).reshape(-1)
        boundary = np.nan_to_num(boundary)
        total = sum(self.full[(a, a)] @ boundary for a in range(self.domain.dim))
        return 0.25 * total

    def linearization(self, inverse: np.ndarray) -> sparse.csr_matrix:
        """Jacobiano de u -> log det(u_{jk̄}) dado A = H^{-1} por nodo.

        d log det = tr(A dH) = sum_ab C_ab D_ab u con coeficientes reales:
        C[2j,2k] = C[2j+1,2k+1] = Re A_kj / 4 y C[2j,2k+1] = -C[2j+1,2k] = -Im A_kj / 4.
        """
        coefficients = linearization_coefficients(inverse)
        dim = self.domain.dim
        jacobian = None
        for a in range(dim):
            for b in range(a, dim):
                weight = coefficients[:, a, b]
                if a != b:
                    weight = weight + coefficients[:, b, a]
                term = sparse.diags(weight) @ self.interior[(a, b)]
                jacobian = term if jacobian is None else jacobian + term
        return jacobian.tocsr()


def linearization_coefficients(inverse: np.ndarray) -> np.ndarray:
    """Coeficientes reales C (K, 2m, 2m) de tr(A dH)."""
    count, m, _ = inverse.shape
    coefficients = np.zeros((count, 2 * m, 2 * m))
    for j in range(m):
        for k in range(m):
            # tr(A dH) = sum_{jk} A_kj dH_jk
            value = 0.25 * inverse[:, k, j]
            coefficients[:, 2 * j, 2 * k] += value.real
            coefficients[:, 2 * j + 1, 2 * k + 1] += value.real
            coefficients[:, 2 * j, 2 * k + 1] -= value.imag
            coefficients[:, 2 * j + 1, 2 * k] += value.imag
    return coefficients


@lru_cache(maxsize=8)
def operators_for(domain: GridDomain) -> DiscreteOperators:
    return DiscreteOperators(domain)
