# SPDX-License-Identifier: MIT
"""
Operadores de diferencias finitas centradas sobre la malla.

Las funciones ``*_array`` trabajan sobre arreglos de la malla completa y son
válidas en los nodos interiores; las demás envuelven el resultado en campos.
"""

from __future__ import annotations

import logging
from typing import Dict, Tuple

import numpy as np

from ..errors import BoundaryDataMissingError
from .domain import GridDomain
from .fields import HermitianField, Positivity, ScalarField

logger = logging.getLogger(__name__)

SecondDerivatives = Dict[Tuple[int, int], np.ndarray]


def _shift(values: np.ndarray, axis: int, step: int) -> np.ndarray:
    """Valor en el nodo i + step a lo largo de ``axis``."""
    return np.roll(values, -step, axis=axis)


def first_derivative_array(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    return (_shift(values, axis, 1) - _shift(values, axis, -1)) / (2.0 * h)


def second_derivative_array(values: np.ndarray, a: int, b: int, h: float) -> np.ndarray:
    """Diferencia centrada de segundo orden; estencil de 4 esquinas si a != b."""
    if a == b:
        return (_shift(values, a, 1) - 2.0 * values + _shift(values, a, -1)) / (h * h)
    plus = _shift(values, a, 1)
    minus = _shift(values, a, -1)
    return (
        _shift(plus, b, 1) - _shift(plus, b, -1) - _shift(minus, b, 1) + _shift(minus, b, -1)
    ) / (4.0 * h * h)


def wirtinger_array(values: np.ndarray, j: int, h: float, conjugate: bool = False) -> np.ndarray:
    """d/dz_j (o d/dz̄_j) = (d/dx_j -/+ i d/dy_j) / 2."""
    dx = first_derivative_array(values, 2 * j, h)
    dy = first_derivative_array(values, 2 * j + 1, h)
    sign = 1.0 if conjugate else -1.0
    return 0.5 * (dx + sign * 1j * dy)


def second_derivatives_array(values: np.ndarray, m: int, h: float) -> SecondDerivatives:
    """Todas las derivadas D_ab con a <= b."""
    dim = 2 * m
    return {
        (a, b): second_derivative_array(values, a, b, h) for a in range(dim) for b in range(a, dim)
    }


def assemble_complex_hessian(second: SecondDerivatives, m: int) -> np.ndarray:
    """Ensambla u_{jk̄} a partir de las derivadas reales de segundo orden.

    u_{jk̄} = [(u_{x_j x_k} + u_{y_j y_k}) + i (u_{x_j y_k} - u_{y_j x_k})] / 4.
    Solo se calcula el triángulo superior; el inferior es su conjugado.
    """

    def d(a: int, b: int) -> np.ndarray:
        return second[(a, b)] if a <= b else second[(b, a)]

    sample = next(iter(second.values()))
    hessian = np.zeros(sample.shape + (m, m), dtype=complex)
    for j in range(m):
        hessian[..., j, j] = 0.25 * (d(2 * j, 2 * j) + d(2 * j + 1, 2 * j + 1))
        for k in range(j + 1, m):
            real = d(2 * j, 2 * k) + d(2 * j + 1, 2 * k + 1)
            imag = d(2 * j, 2 * k + 1) - d(2 * j + 1, 2 * k)
            hessian[..., j, k] = 0.25 * (real + 1j * imag)
            hessian[..., k, j] = np.conj(hessian[..., j, k])
    return hessian


def complex_hessian_array(values: np.ndarray, m: int, h: float) -> np.ndarray:
    return assemble_complex_hessian(second_derivatives_array(values, m, h), m)


def complex_laplacian_array(values: np.ndarray, m: int, h: float) -> np.ndarray:
    """Traza del hessiano complejo: (1/4) suma de las derivadas puras."""
    total = np.zeros(values.shape)
    for axis in range(2 * m):
        total += second_derivative_array(values, axis, axis, h)
    return 0.25 * total


def _require_boundary_data(field: ScalarField, result: np.ndarray) -> None:
    domain = field.domain
    missing = ~np.isfinite(result) & domain.interior_mask
    if np.any(missing):
        node = domain.node_of(int(np.flatnonzero(missing)[0]))
        logger.warning("Dato de frontera ausente cerca del nodo %s", node)
        raise BoundaryDataMissingError(node)


def complex_hessian(field: ScalarField) -> HermitianField:
    """Hessiano complejo discreto en cada nodo interior."""
    domain = field.domain
    full = complex_hessian_array(field.values, domain.m, domain.h)
    _require_boundary_data(field, np.sum(np.abs(full), axis=(-2, -1)))
    matrices = full.reshape((-1, domain.m, domain.m))[domain.interior_index]
    return HermitianField(domain, matrices, Positivity.NONE)


def complex_laplacian(field: ScalarField) -> ScalarField:
    """Laplaciano complejo (traza) con NaN fuera del interior."""
    domain = field.domain
    full = complex_laplacian_array(field.values, domain.m, domain.h)
    _require_boundary_data(field, full)
    values = np.where(domain.interior_mask, full, np.nan)
    return ScalarField(domain, values, f"lap({field.name})" if field.name else "lap")


def gradient_array(values: np.ndarray, h: float) -> np.ndarray:
    """Gradiente real (2m componentes) por diferencias centradas."""
    return np.stack([first_derivative_array(values, axis, h) for axis in range(values.ndim)])


def gradient_norm(field: ScalarField) -> ScalarField:
    """Norma euclídea del gradiente real en los nodos interiores."""
    domain = field.domain
    grad = gradient_array(field.values, domain.h)
    norm = np.sqrt(np.sum(grad**2, axis=0))
    _require_boundary_data(field, norm)
    return ScalarField(domain, np.where(domain.interior_mask, norm, np.nan), "grad")


# ----------------------------------------------------------------------
# Derivadas en un único nodo
# ----------------------------------------------------------------------
def _value_at(values: np.ndarray, node: Tuple[int, ...], offsets: Dict[int, int]) -> float:
    index = list(node)
    for axis, step in offsets.items():
        index[axis] = (index[axis] + step) % values.shape[axis]
    return values[tuple(index)]


def derivative_at(values: np.ndarray, node: Tuple[int, ...], axis: int, h: float) -> float:
    plus = _value_at(values, node, {axis: 1})
    minus = _value_at(values, node, {axis: -1})
    return (plus - minus) / (2.0 * h)


def wirtinger_at(values: np.ndarray, node: Tuple[int, ...], j: int, h: float) -> complex:
    """d/dz_j en un nodo."""
    dx = derivative_at(values, node, 2 * j, h)
    dy = derivative_at(values, node, 2 * j + 1, h)
    return 0.5 * (dx - 1j * dy)


def complex_hessian_at(values: np.ndarray, node: Tuple[int, ...], m: int, h: float) -> np.ndarray:
    """Hessiano complejo (m, m) de un arreglo en un nodo."""
    second: SecondDerivatives = {}
    for a in range(2 * m):
        center = values[tuple(node)]
        second[(a, a)] = np.asarray(
            (_value_at(values, node, {a: 1}) - 2.0 * center + _value_at(values, node, {a: -1}))
            / (h * h)
        )
        for b in range(a + 1, 2 * m):
            corners = (
                _value_at(values, node, {a: 1, b: 1})
                - _value_at(values, node, {a: 1, b: -1})
                - _value_at(values, node, {a: -1, b: 1})
                + _value_at(values, node, {a: -1, b: -1})
            )
            second[(a, b)] = np.asarray(corners / (4.0 * h * h))
    return assemble_complex_hessian(second, m)
