# SPDX-License-Identifier: MIT
"""
Desigualdades algebraicas de la estimación de segundo orden.

Cada lema evalúa ambos lados y devuelve un ``LemmaOutcome``; los lotes
vectorizados (``*_batch``) alimentan la suite de ensayos aleatorios.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import LEMMA_RTOL
from ..errors import DomainError, InvalidDensityError
from ..grid.fields import HermitianField, ScalarField
from ..grid.hermitian import det_array, inverse_array
from ..grid.operators import complex_hessian_array, wirtinger_array, wirtinger_at
from .config import TestFunctionConfig


@dataclass(frozen=True)
class LemmaOutcome:
    """lhs, rhs y holgura en el sentido de la desigualdad (>= 0 si se cumple)."""

    lhs: float
    rhs: float
    ok: bool
    slack: float


@dataclass(frozen=True)
class CaseSplitOutcome:
    case: int
    value: float
    ok: bool


def _scale(*values: float) -> float:
    return max(1.0, *(abs(v) for v in values))


# ----------------------------------------------------------------------
# Desigualdad de tipo Newton
# ----------------------------------------------------------------------
def newton_inequality_batch(b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(sum 1/B_i)^{m-1} y sum B_i / prod B_i por fila."""
    m = b.shape[-1]
    lhs = np.sum(1.0 / b, axis=-1) ** (m - 1)
    rhs = np.sum(b, axis=-1) / np.prod(b, axis=-1)
    return lhs, rhs


def lemma_newton_inequality(b: Sequence[float]) -> LemmaOutcome:
    """(sum 1/B_i)^{m-1} >= sum B_i / prod B_i para B_i > 0."""
    values = np.asarray(b, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise DomainError("Se requieren al menos dos valores B_i")
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise DomainError("Todos los B_i deben ser positivos")
    lhs, rhs = (float(x) for x in newton_inequality_batch(values))
    tolerance = LEMMA_RTOL * _scale(lhs, rhs)
    return LemmaOutcome(lhs, rhs, lhs >= rhs - tolerance, lhs - rhs)


# ----------------------------------------------------------------------
# Separación en casos
# ----------------------------------------------------------------------
def case_split_value(a: np.ndarray, m: int) -> np.ndarray:
    """(1/(m-1)) (sum a)² - sum a² por fila."""
    return np.sum(a, axis=-1) ** 2 / (m - 1) - np.sum(a**2, axis=-1)


def lemma_case_split(
    a: Sequence[float], m: int, majorant: Optional[float] = None
) -> CaseSplitOutcome:
    """Caso 1 (signos mixtos): el valor es <= 0. Caso 2: se compara con ``majorant``."""
    if m < 2:
        raise DomainError("La separación en casos requiere m >= 2")
    values = np.asarray(a, dtype=float)
    value = float(case_split_value(values, m))
    mixed = bool(np.any(values > 0) and np.any(values < 0))
    tolerance = LEMMA_RTOL * _scale(float(np.sum(values**2)))
    if mixed:
        return CaseSplitOutcome(1, value, value <= tolerance)
    ok = True if majorant is None else value <= majorant + tolerance
    return CaseSplitOutcome(2, value, ok)


# ----------------------------------------------------------------------
# Cota de tercer orden
# ----------------------------------------------------------------------
def third_order_sides(
    d: np.ndarray,
    t: np.ndarray,
    grad_sq: np.ndarray,
    lap: np.ndarray,
    alpha_prime: np.ndarray,
    m: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Ambos lados de la cota por lotes.

    lhs = (1/(m-1)) |sum_i d_i T_ii|² - sum_ij d_i d_j |T_ij|²
    rhs = (4m/(m-1)) α'² |∇φ|² (m + Δφ) sum_i d_i
    con |∇φ|² = sum_k |φ_k|² (derivadas complejas).
    """
    diagonal = np.einsum("...ii->...i", t)
    weighted = np.abs(np.sum(d * diagonal, axis=-1)) ** 2 / (m - 1)
    cross = np.einsum("...i,...j,...ij->...", d, d, np.abs(t) ** 2)
    lhs = weighted - cross
    rhs = 4.0 * m / (m - 1) * alpha_prime**2 * grad_sq * (m + lap) * np.sum(d, axis=-1)
    return lhs, rhs


def lemma_third_order_bound(
    g_diag: Sequence[float],
    third_order: np.ndarray,
    grad_phi: Sequence[complex],
    lap: float,
    cfg: TestFunctionConfig,
    phi_value: float,
    slack: float = 0.0,
) -> LemmaOutcome:
    """Cota de los términos de tercer orden en el marco donde g' es diagonal.

    ``g_diag`` son los autovalores de g' (d_i = 1/g_diag_i), ``third_order``
    la matriz T_ij = φ_{i j̄ k} para una dirección k y ``phi_value`` el valor
    trasladado de φ en el punto.
    """
    m = cfg.m
    if m < 2:
        raise DomainError("La cota de tercer orden requiere m >= 2")
    g = np.asarray(g_diag, dtype=float)
    if g.shape != (m,) or np.any(g <= 0):
        raise DomainError("La diagonal de g' debe ser positiva y de longitud m")
    t = np.asarray(third_order, dtype=complex).reshape(m, m)
    grad_sq = float(np.sum(np.abs(np.asarray(grad_phi, dtype=complex)) ** 2))
    lhs, rhs = third_order_sides(
        1.0 / g, t, np.asarray(grad_sq), np.asarray(lap), cfg.alpha_prime(phi_value), m
    )
    lhs_value, rhs_value = float(lhs), float(rhs)
    tolerance = slack + LEMMA_RTOL * _scale(lhs_value, rhs_value)
    return LemmaOutcome(
        lhs_value, rhs_value, lhs_value <= rhs_value + tolerance, rhs_value - lhs_value
    )


def synthetic_third_order(
    rng: np.random.Generator, m: int, count: int, cfg_lam: float, c0: float
) -> Tuple[np.ndarray, ...]:
    """Datos que cumplen la ecuación del gradiente con φ_{iīk} de un solo signo.

    T_ii = (λ_i / sum λ) (Δφ)_k con (Δφ)_k = α' φ_k (m + Δφ); los términos
    fuera de la diagonal son arbitrarios porque solo restan.
    """
    lam = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(count, m)))
    trace = np.sum(lam, axis=-1)
    lap = trace - m
    x = rng.uniform(2.0, cfg_lam, size=count)
    alpha_prime = 1.0 / (c0 * x)
    grad = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    grad_sq = np.sum(np.abs(grad) ** 2, axis=-1)
    lap_k = alpha_prime * grad[:, 0] * trace
    t = rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m))
    diagonal = (lam / trace[:, None]) * lap_k[:, None]
    idx = np.arange(m)
    t[:, idx, idx] = diagonal
    return 1.0 / lam, t, grad_sq, lap, alpha_prime


# ----------------------------------------------------------------------
# Desigualdad (m-1) y su forma matricial
# ----------------------------------------------------------------------
def eqm1_slack_batch(matrices: np.ndarray) -> np.ndarray:
    """sum g'^{iī} - ((m + Δφ) / det g')^{1/(m-1)} con m + Δφ = tr g' (base plana)."""
    m = matrices.shape[-1]
    if m < 2:
        raise DomainError("La desigualdad (m-1) requiere m >= 2")
    det = det_array(matrices)
    inverse_trace = np.real(np.trace(inverse_array(matrices, det), axis1=-2, axis2=-1))
    trace = np.real(np.trace(matrices, axis1=-2, axis2=-1))
    return inverse_trace - (trace / det) ** (1.0 / (m - 1))


def random_positive_hermitian(rng: np.random.Generator, m: int, count: int) -> np.ndarray:
    """Matrices definidas positivas U diag(λ) U^H con λ log-uniforme."""
    z = rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m))
    q, _ = np.linalg.qr(z)
    lam = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), size=(count, m)))
    return np.einsum("nij,nj,nkj->nik", q, lam, np.conj(q))


# ----------------------------------------------------------------------
# Identidad para m = 2 y tercer orden en soluciones
# ----------------------------------------------------------------------
def lemma_m2_identity(u: ScalarField, f: ScalarField) -> ScalarField:
    """Residuo de g'^{ij̄} φ_{ij̄k} = f^{-1} ∂_k f en una solución plana con m = 2.

    Con g = I y φ = u - |z|², g' = u_{jk̄} y φ_{ij̄k} = ∂_k u_{ij̄}; el campo
    devuelto es max_k del módulo del residuo en los nodos a dos capas de la
    banda (una capa en mallas demasiado gruesas); NaN en el resto.
    """
    domain = u.domain
    if domain.m != 2:
        raise DomainError("La identidad solo aplica a m = 2")
    if np.any(f.interior_values() <= 0):
        raise InvalidDensityError("La identidad requiere f > 0")
    h = domain.h
    hessian = complex_hessian_array(u.values, 2, h)
    det = det_array(hessian)
    with np.errstate(invalid="ignore", divide="ignore"):
        inverse = inverse_array(hessian, det)
        log_f = np.log(f.values)

    residual = np.zeros(domain.grid_shape)
    for k in range(2):
        derivative = np.empty_like(hessian)
        for i in range(2):
            for j in range(2):
                derivative[..., i, j] = wirtinger_array(hessian[..., i, j], k, h)
        contracted = np.einsum("...ji,...ij->...", inverse, derivative)
        rhs = wirtinger_array(log_f, k, h)
        residual = np.maximum(residual, np.abs(contracted - rhs))
    valid = domain.inner_mask(2)
    if not np.any(valid):
        valid = domain.inner_mask(1)
    values = np.where(valid, residual, np.nan)
    values = np.where(domain.interior_mask & ~valid, 0.0, values)
    return ScalarField(domain, values, "m2_identity_residual")


def third_order_at_max(
    phi: ScalarField,
    g_prime: HermitianField,
    cfg: TestFunctionConfig,
    node: Tuple[int, ...],
    phi_value: float,
    slack: float = 0.0,
) -> List[LemmaOutcome]:
    """Evalúa la cota de tercer orden en ``node`` para cada dirección k.

    Las derivadas φ_{ij̄k} se obtienen por diferencias centradas del
    hessiano complejo y se rotan al marco propio de g'(p).
    """
    domain = phi.domain
    m, h = domain.m, domain.h
    hessian = complex_hessian_array(phi.values, m, h)
    third = np.empty((m, m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            component = hessian[..., i, j]
            for k in range(m):
                third[i, j, k] = wirtinger_at(component, node, k, h)
    grad = np.array([wirtinger_at(phi.values, node, k, h) for k in range(m)])
    lap = float(np.real(np.trace(hessian[node])))

    eigenvalues, vectors = np.linalg.eigh(g_prime.at_node(node))
    rotated = np.einsum("ia,jb,kc,ijk->abc", np.conj(vectors), vectors, np.conj(vectors), third)
    rotated_grad = vectors.T.conj() @ grad
    return [
        lemma_third_order_bound(
            eigenvalues, rotated[:, :, c], rotated_grad, lap, cfg, phi_value, slack
        )
        for c in range(m)
    ]
