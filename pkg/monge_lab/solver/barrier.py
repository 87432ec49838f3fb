# SPDX-License-Identifier: MIT
"""
Subsolución barrera, mayorante armónico y verificación del sándwich
ψ <= u <= w para el problema de Dirichlet.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage
from scipy.sparse.linalg import spsolve

from ..errors import DomainError
from ..grid.domain import DomainShape, GridDomain
from ..grid.fields import ScalarField
from .assembly import operators_for

logger = logging.getLogger(__name__)


def barrier_constant(sup_f: float, m: int) -> float:
    """K con K^m > sup f."""
    if sup_f < 0:
        raise DomainError("sup f no puede ser negativo")
    return float(sup_f ** (1.0 / m) + 1.0)


def enclosing_radius(domain: GridDomain) -> float:
    if domain.shape is DomainShape.BALL:
        return domain.extent
    if domain.shape is DomainShape.BOX:
        return domain.extent * np.sqrt(domain.dim)
    raise DomainError("El toro no admite barrera de Dirichlet")


def build_barrier(domain: GridDomain, sup_f: float) -> ScalarField:
    """ψ = K (|z - c|² - R²): estrictamente psh con det ψ_{jk̄} = K^m > sup f."""
    radius = enclosing_radius(domain)
    k = barrier_constant(sup_f, domain.m)
    values = k * (domain.squared_radius - radius**2)
    values = np.where(domain.exterior_mask, np.nan, values)
    return ScalarField(domain, values, "barrier")


def harmonic_majorant(domain: GridDomain, boundary: Optional[np.ndarray] = None) -> ScalarField:
    """Solución discreta de Δw = 0; ``boundary`` se suma a la extensión en la banda."""
    if domain.is_periodic:
        raise DomainError("El mayorante armónico requiere un dominio con frontera")
    operators = operators_for(domain)
    full = np.zeros(domain.grid_shape) if boundary is None else np.nan_to_num(boundary)
    rhs = -operators.laplacian_boundary_term(full)
    if np.allclose(rhs, 0.0):
        interior = np.zeros(domain.num_interior)
    else:
        interior = spsolve(operators.laplacian().tocsc(), rhs)
    values = operators.extend(interior, full).reshape(domain.grid_shape)
    return ScalarField.from_interior(domain, interior, values, "harmonic_majorant")


@dataclass(frozen=True)
class SandwichReport:
    """Violaciones de ψ <= u <= w y pendiente de u junto a la frontera."""

    lower_violation: float
    upper_violation: float
    boundary_slope: float
    boundary_slope_bound: float
    ok: bool


def _band_adjacent(domain: GridDomain) -> np.ndarray:
    structure = np.ones((3,) * domain.dim, dtype=bool)
    near_band = ndimage.binary_dilation(domain.band_mask, structure=structure)
    return near_band & domain.interior_mask


def sandwich_check(
    u: ScalarField,
    barrier: ScalarField,
    majorant: Optional[ScalarField] = None,
    tolerance: float = 1e-9,
) -> SandwichReport:
    """Comprueba ψ <= u <= w en el interior.

    Con datos de frontera nulos, el sándwich implica que la pendiente
    |u|/h en los nodos vecinos de la banda no supera max(|ψ|, |w|)/h.
    """
    domain = u.domain
    if majorant is None:
        majorant = harmonic_majorant(domain)
    mask = domain.interior_mask
    lower = float(np.max((barrier.values - u.values)[mask]))
    upper = float(np.max((u.values - majorant.values)[mask]))

    adjacent = _band_adjacent(domain)
    h = domain.h
    slope = float(np.max(np.abs(u.values[adjacent]), initial=0.0) / h)
    bound = float(
        np.max(
            np.maximum(np.abs(barrier.values[adjacent]), np.abs(majorant.values[adjacent])),
            initial=0.0,
        )
        / h
    )
    ok = lower <= tolerance and upper <= tolerance and slope <= bound + tolerance / h
    if not ok:
        logger.warning(
            "Sándwich violado: inferior %.3e, superior %.3e, pendiente %.3e > %.3e",
            lower,
            upper,
            slope,
            bound,
        )
    return SandwichReport(max(lower, 0.0), max(upper, 0.0), slope, bound, ok)
