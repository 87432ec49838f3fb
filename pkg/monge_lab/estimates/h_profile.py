# SPDX-License-Identifier: MIT
"""
Función test H = (m + Δφ) e^{-α(φ)} y sus identidades en el máximo.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import DomainError
from ..grid.domain import GridDomain
from ..grid.fields import HermitianField, Positivity, ScalarField
from ..grid.operators import (
    complex_hessian,
    complex_hessian_at,
    complex_laplacian_array,
    wirtinger_at,
)
from .config import TestFunctionConfig

logger = logging.getLogger(__name__)

SEARCH_DEPTHS = (3, 2, 1)


class AdmissibilityError(DomainError):
    """m + Δφ no es positivo en algún nodo interior."""


@dataclass(frozen=True)
class HProfile:
    """H, su nodo máximo p y los diagnósticos evaluados en p."""

    H: ScalarField
    node: Tuple[int, ...]
    value: float
    shift: float
    trace_at_max: float
    grad_eq_residual: Tuple[complex, ...]
    max_principle_value: float
    max_principle_tolerance: float
    inverse_trace_at_max: float
    config: TestFunctionConfig

    @property
    def residual_norm(self) -> float:
        return float(max(abs(r) for r in self.grad_eq_residual)) if self.grad_eq_residual else 0.0

    @property
    def max_principle_ok(self) -> bool:
        return self.max_principle_value <= self.max_principle_tolerance


def search_region(domain: GridDomain) -> np.ndarray:
    """Nodos donde se busca el máximo de H: lejos de la banda si existe."""
    for depth in SEARCH_DEPTHS:
        mask = domain.inner_mask(depth)
        if np.any(mask):
            return mask
    return domain.interior_mask


def flat_metric(phi: ScalarField) -> HermitianField:
    """g' = I + φ_{jk̄} sobre una base plana."""
    hessian = complex_hessian(phi)
    matrices = hessian.matrices + np.eye(phi.domain.m)
    return HermitianField(phi.domain, matrices, Positivity.NONE)


def trace_field(phi: ScalarField) -> np.ndarray:
    """m + Δφ en la malla completa; lanza AdmissibilityError si no es positivo."""
    domain = phi.domain
    trace = domain.m + complex_laplacian_array(phi.values, domain.m, domain.h)
    interior = trace[domain.interior_mask]
    if not np.all(np.isfinite(interior)) or np.any(interior <= 0):
        bad = domain.interior_mask & ~(trace > 0)
        node = domain.node_of(int(np.flatnonzero(bad)[0]))
        raise AdmissibilityError(f"m + Δφ <= 0 en el nodo {node}")
    return trace


def profile_H(phi: ScalarField, g_prime: HermitianField, cfg: TestFunctionConfig) -> HProfile:
    """Evalúa H, su máximo discreto y la ecuación del gradiente en p.

    φ se traslada para que inf φ = 2; el residuo por dirección es
    r_γ = (Δφ)_γ - α'(φ) φ_γ (m + Δφ). Los empates en el máximo se resuelven
    por orden lexicográfico de nodos.
    """
    domain = phi.domain
    h = domain.h
    trace = trace_field(phi)

    shift = 2.0 - phi.inf()
    shifted = phi.values + shift
    if float(np.max(shifted[domain.interior_mask])) > cfg.lam * (1.0 + 1e-12):
        raise DomainError(f"El rango de φ trasladada excede [2, {cfg.lam:.6g}]")

    with np.errstate(invalid="ignore"):
        h_values = trace * np.exp(-cfg.alpha(np.where(shifted > 0, shifted, np.nan)))
    h_values = np.where(domain.interior_mask, h_values, np.nan)
    h_field = ScalarField(domain, h_values, "H")

    region = search_region(domain)
    masked = np.where(region, h_values, -np.inf)
    node = domain.node_of(int(np.argmax(masked)))

    alpha_p = float(cfg.alpha_prime(shifted[node]))
    lap = trace - domain.m
    residual = tuple(
        complex(
            wirtinger_at(lap, node, j, h)
            - alpha_p * wirtinger_at(phi.values, node, j, h) * trace[node]
        )
        for j in range(domain.m)
    )

    g_inverse = np.linalg.inv(g_prime.at_node(node))
    h_hessian = complex_hessian_at(h_values, node, domain.m, h)
    max_principle = float(np.real(np.trace(g_inverse @ h_hessian)))
    inverse_trace = float(np.real(np.trace(g_inverse)))
    tolerance = h * float(h_values[node]) * inverse_trace

    profile = HProfile(
        H=h_field,
        node=node,
        value=float(h_values[node]),
        shift=shift,
        trace_at_max=float(trace[node]),
        grad_eq_residual=residual,
        max_principle_value=max_principle,
        max_principle_tolerance=tolerance,
        inverse_trace_at_max=inverse_trace,
        config=cfg,
    )
    logger.debug(
        "Máximo de H en %s: H=%.6g, residuo=%.3e, Δ'H=%.3e (τ=%.3e)",
        node,
        profile.value,
        profile.residual_norm,
        max_principle,
        tolerance,
    )
    return profile
