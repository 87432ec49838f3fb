# SPDX-License-Identifier: MIT
"""
Constantes de las hipótesis sobre la densidad del lado derecho.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from ..errors import DomainError, InvalidDensityError
from ..grid.domain import GridDomain
from ..grid.fields import ScalarField
from ..grid.operators import complex_laplacian_array, gradient_array
from ..reports.report_schema import ConditionReport

logger = logging.getLogger(__name__)


def lift_exponent(m: int) -> float:
    """Exponente p del levantamiento: 1/(m-1) si m >= 2 y 1 si m = 1."""
    if m < 1:
        raise DomainError(f"Dimensión inválida: m={m}")
    return 1.0 if m == 1 else 1.0 / (m - 1)


def estimation_mask(domain: GridDomain) -> np.ndarray:
    """Nodos interiores cuyo estencil no toca la banda (o todo el interior)."""
    mask = domain.inner_mask(1)
    return mask if np.any(mask) else domain.interior_mask


def _argmax_node(values: np.ndarray, mask: np.ndarray, domain: GridDomain) -> Tuple[int, ...]:
    masked = np.where(mask, values, -np.inf)
    return domain.node_of(int(np.argmax(masked)))


def _require_nonnegative(f: ScalarField) -> None:
    domain = f.domain
    known = ~domain.exterior_mask
    negative = known & (f.values < 0)
    if np.any(negative):
        node = domain.node_of(int(np.flatnonzero(negative)[0]))
        value = float(f.values[node])
        raise InvalidDensityError(f"Densidad negativa {value:.3e} en el nodo {node}", node)


def check_conditions(f: ScalarField, m: Optional[int] = None) -> ConditionReport:
    """Calcula sup f, A y A1 sobre la malla.

    A = max(0, -inf Δ f^p) y A1 = sup |∇ f^{1/m}| sobre los nodos alejados
    de la banda; lanza InvalidDensityError si f toma valores negativos.
    """
    domain = f.domain
    if m is not None and m != domain.m:
        raise DomainError(f"m={m} no coincide con la dimensión de la malla (m={domain.m})")
    m = domain.m
    _require_nonnegative(f)

    p = lift_exponent(m)
    mask = estimation_mask(domain)
    values = f.values

    lap = complex_laplacian_array(np.power(values, p), domain.m, domain.h)
    grad = gradient_array(np.power(values, 1.0 / m), domain.h)
    grad_norm = np.sqrt(np.sum(grad**2, axis=0))

    interior = f.interior_values()
    sup_node = _argmax_node(values, domain.interior_mask, domain)
    a_node = _argmax_node(-lap, mask, domain)
    a1_node = _argmax_node(grad_norm, mask, domain)

    report = ConditionReport(
        m=m,
        sup_f=float(np.max(interior)),
        inf_f=float(np.min(interior)),
        A=max(0.0, float(-lap[a_node])),
        A1=float(grad_norm[a1_node]),
        sup_f_node=sup_node,
        A_node=a_node,
        A1_node=a1_node,
        exponent=p,
        nonnegative=True,
        positive=bool(np.all(interior > 0)),
    )
    logger.debug("Condiciones: sup f=%.4g A=%.4g A1=%.4g", report.sup_f, report.A, report.A1)
    return report


def equivalence_identity_residual(f: ScalarField, m: int) -> ScalarField:
    """Residuo de Δ f^p = p f^{p-2} [f Δf - ((m-2)/(m-1)) |∇f|²] con p = 1/(m-1).

    |∇f|² = sum_k |∂_k f|² (un cuarto del cuadrado del gradiente real). Ambos
    lados usan los mismos estenciles; para m = 2 coinciden nodo a nodo.
    Requiere f > 0 y m >= 2.
    """
    if m < 2:
        raise DomainError("La identidad de equivalencia requiere m >= 2")
    domain = f.domain
    interior = f.interior_values()
    if np.any(interior <= 0):
        raise InvalidDensityError("La identidad de equivalencia requiere f > 0")
    p = 1.0 / (m - 1)
    values = f.values
    with np.errstate(invalid="ignore", divide="ignore"):
        lhs = complex_laplacian_array(np.power(values, p), domain.m, domain.h)
        lap_f = complex_laplacian_array(values, domain.m, domain.h)
        grad_sq = 0.25 * np.sum(gradient_array(values, domain.h) ** 2, axis=0)
        bracket = values * lap_f - (m - 2) / (m - 1) * grad_sq
        rhs = p * np.power(values, p - 2.0) * bracket
    residual = np.where(domain.interior_mask, lhs - rhs, np.nan)
    return ScalarField(domain, residual, "identity_residual")


def lipschitz_m2_bound(
    report: ConditionReport,
    alpha0: float,
    inf_bisectional: float = 0.0,
    scalar_curvature_sup: float = 0.0,
) -> float:
    """Cota de 2 + Δφ para m = 2 con hipótesis de Lipschitz sobre f^{1/2}.

    Raíz positiva de (α0 + inf R) x² - 2 α0 sup f x - (A + S sup f + A1²) = 0,
    donde A1² = 4 sup sum_k |∂_k f^{1/2}|².
    """
    if report.m != 2:
        raise DomainError("La cota de Lipschitz solo aplica a m = 2")
    a = alpha0 + inf_bisectional
    if a <= 0:
        raise DomainError("Se requiere α0 + inf R > 0")
    b = 2.0 * alpha0 * report.sup_f
    c = report.A + scalar_curvature_sup * report.sup_f + report.A1**2
    return float((b + np.sqrt(b * b + 4.0 * a * c)) / (2.0 * a))
