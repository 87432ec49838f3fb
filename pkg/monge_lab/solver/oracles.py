# SPDX-License-Identifier: MIT
"""
Soluciones de referencia independientes del Newton: Poisson disperso para
m = 1 y solvers espectrales en el toro con el símbolo discreto.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import fft
from scipy.sparse.linalg import spsolve

from ..errors import DomainError
from ..grid.domain import GridDomain
from ..grid.fields import ScalarField
from ..grid.hermitian import det_array
from ..grid.operators import complex_hessian_array
from .assembly import operators_for

logger = logging.getLogger(__name__)


def poisson_dirichlet(
    rhs: ScalarField, boundary: Optional[np.ndarray] = None
) -> ScalarField:
    """Resuelve Δu = rhs (laplaciano complejo) con la banda de ``solve_dirichlet``.

    ``boundary`` se suma a la extensión en la banda. Con m = 1 es
    exactamente la ecuación de Monge-Ampère discreta.
    """
    domain = rhs.domain
    if domain.is_periodic:
        raise DomainError("poisson_dirichlet requiere un dominio con frontera")
    operators = operators_for(domain)
    full = np.zeros(domain.grid_shape) if boundary is None else np.nan_to_num(boundary)
    load = rhs.interior_values() - operators.laplacian_boundary_term(full)
    interior = spsolve(operators.laplacian().tocsc(), load)
    values = operators.extend(interior, full).reshape(domain.grid_shape)
    return ScalarField.from_interior(domain, interior, values, "poisson")


def laplacian_symbol(domain: GridDomain) -> np.ndarray:
    """Autovalores del laplaciano complejo discreto periódico en cada modo."""
    n, h = domain.n, domain.h
    frequencies = 2.0 * np.pi * np.fft.fftfreq(n)
    axis_symbol = (2.0 * np.cos(frequencies) - 2.0) / (h * h)
    symbol = np.zeros(domain.grid_shape)
    for axis in range(domain.dim):
        shape = [1] * domain.dim
        shape[axis] = n
        symbol = symbol + axis_symbol.reshape(shape)
    return 0.25 * symbol


def fourier_poisson_torus(rhs: np.ndarray, domain: GridDomain) -> np.ndarray:
    """φ de media nula con Δφ = rhs - media(rhs) en el toro."""
    if not domain.is_periodic:
        raise DomainError("El solver espectral requiere el toro")
    symbol = laplacian_symbol(domain)
    transformed = fft.fftn(rhs)
    transformed.flat[0] = 0.0
    symbol.flat[0] = 1.0
    return np.real(fft.ifftn(transformed / symbol))


def fourier_torus_m1(f: ScalarField) -> Tuple[ScalarField, float]:
    """Solución de 1 + Δφ = e^c f en el toro para m = 1: c = -log media(f)."""
    domain = f.domain
    if domain.m != 1:
        raise DomainError("fourier_torus_m1 solo aplica a m = 1")
    c = -float(np.log(np.mean(f.values)))
    phi = fourier_poisson_torus(np.exp(c) * f.values - 1.0, domain)
    return ScalarField(domain, phi, "phi_fourier"), c


def picard_torus(
    f: ScalarField,
    tolerance: float = 1e-12,
    max_iterations: int = 200,
) -> Tuple[ScalarField, float, int]:
    """Iteración de punto fijo para det(I + φ_{jk̄}) = e^c f con m = 2.

    Δφ_{k+1} = e^{c_k} f - 1 - det(φ_k{jk̄}), con c_k elegido para que el lado
    derecho tenga media nula. Converge para datos cercanos a constantes.
    """
    domain = f.domain
    if domain.m != 2:
        raise DomainError("picard_torus solo aplica a m = 2")
    mean_f = float(np.mean(f.values))
    phi = np.zeros(domain.grid_shape)
    c = -np.log(mean_f)
    for iteration in range(1, max_iterations + 1):
        det_phi = det_array(complex_hessian_array(phi, domain.m, domain.h))
        c = float(np.log((1.0 + np.mean(det_phi)) / mean_f))
        updated = fourier_poisson_torus(np.exp(c) * f.values - 1.0 - det_phi, domain)
        change = float(np.max(np.abs(updated - phi)))
        phi = updated
        if change <= tolerance:
            logger.debug("Picard convergido en %d iteraciones", iteration)
            return ScalarField(domain, phi, "phi_picard"), c, iteration
    logger.warning("Picard sin convergencia tras %d iteraciones", max_iterations)
    return ScalarField(domain, phi, "phi_picard"), c, max_iterations
