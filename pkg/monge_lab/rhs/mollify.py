# SPDX-License-Identifier: MIT
"""
Regularización de densidades degeneradas: desplazamiento por epsilon,
mollificación con un núcleo bump y levantamiento a la potencia m-1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage, signal

from ..errors import DomainError, KernelUnderresolvedError
from ..grid.domain import GridDomain
from ..grid.fields import ScalarField
from .conditions import lift_exponent

logger = logging.getLogger(__name__)

KERNEL_PROFILES = ("bump",)


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(later < earlier for earlier, later in zip(values, values[1:]))


@dataclass(frozen=True)
class RegularizationSchedule:
    """Sucesiones decrecientes de epsilon y rho.

    Las etapas recorren rho de mayor a menor dentro de cada epsilon, de mayor
    a menor.
    """

    epsilons: Tuple[float, ...]
    rhos: Tuple[float, ...]
    profile: str = "bump"

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        object.__setattr__(self, "rhos", tuple(float(r) for r in self.rhos))
        if not self.epsilons or not self.rhos:
            raise DomainError("El calendario necesita al menos un epsilon y un rho")
        if any(e <= 0 for e in self.epsilons) or any(r <= 0 for r in self.rhos):
            raise DomainError("Epsilon y rho deben ser positivos")
        if not _strictly_decreasing(self.epsilons) or not _strictly_decreasing(self.rhos):
            raise DomainError("Epsilon y rho deben ser estrictamente decrecientes")
        if self.profile not in KERNEL_PROFILES:
            raise DomainError(f"Perfil de núcleo desconocido: {self.profile}")

    @classmethod
    def geometric(
        cls,
        eps_start: float,
        eps_factor: float,
        eps_count: int,
        rho_start: float,
        rho_factor: float,
        rho_count: int,
    ) -> "RegularizationSchedule":
        epsilons = tuple(eps_start * eps_factor**k for k in range(eps_count))
        rhos = tuple(rho_start * rho_factor**k for k in range(rho_count))
        return cls(epsilons, rhos)

    @classmethod
    def default_for(cls, domain: GridDomain) -> "RegularizationSchedule":
        return cls((1e-1, 1e-2, 1e-3), (4.0 * domain.h, 2.0 * domain.h))

    def stages(self) -> List[Tuple[float, float]]:
        return [(eps, rho) for eps in self.epsilons for rho in self.rhos]


def mollifier_kernel(rho: float, h: float, dim: int) -> np.ndarray:
    """Núcleo bump exp(-1/(1-r²)) muestreado en los nodos con |k| h < rho.

    Normalizado a suma 1; con rho = h queda un delta discreto.
    """
    if rho < h * (1.0 - 1e-12):
        raise KernelUnderresolvedError(f"rho={rho:.3e} es menor que el paso h={h:.3e}")
    reach = int(np.ceil(rho / h))
    offsets = np.arange(-reach, reach + 1, dtype=float)
    grids = np.meshgrid(*([offsets] * dim), indexing="ij")
    radius = np.sqrt(sum(g**2 for g in grids)) * h / rho
    kernel = np.zeros_like(radius)
    inside = radius < 1.0
    kernel[inside] = np.exp(-1.0 / (1.0 - radius[inside] ** 2))
    return kernel / kernel.sum()


def extend_to_box(field: ScalarField) -> np.ndarray:
    """Extiende el campo a los nodos exteriores con el valor conocido más cercano."""
    domain = field.domain
    values = np.array(field.values)
    unknown = domain.exterior_mask
    if not np.any(unknown):
        return values
    indices = ndimage.distance_transform_edt(
        unknown, return_distances=False, return_indices=True
    )
    return values[tuple(indices)]


def mollify(values: np.ndarray, kernel: np.ndarray, periodic: bool) -> np.ndarray:
    """Convolución con extensión constante (o periódica) fuera de la caja."""
    if kernel.size == 1:
        return values * float(kernel.reshape(-1)[0])
    pad = kernel.shape[0] // 2
    padded = np.pad(values, pad, mode="wrap" if periodic else "edge")
    return signal.convolve(padded, kernel, mode="valid", method="auto")


def mollify_lift(
    f: ScalarField,
    epsilon: float,
    rho: float,
    schedule: Optional[RegularizationSchedule] = None,
) -> ScalarField:
    """h = ((f^p + epsilon) * γ_rho)^{m-1}, o (f + epsilon) * γ_rho si m = 1.

    Se cumple h >= epsilon^{m-1} (h >= epsilon para m = 1) en todos los nodos.
    """
    if schedule is not None and schedule.profile not in KERNEL_PROFILES:
        raise DomainError(f"Perfil de núcleo desconocido: {schedule.profile}")
    if epsilon <= 0:
        raise DomainError("epsilon debe ser positivo")
    domain = f.domain
    m = domain.m
    p = lift_exponent(m)
    extended = extend_to_box(f)
    if np.any(extended < 0):
        raise DomainError("La densidad a regularizar debe ser no negativa")

    kernel = mollifier_kernel(rho, domain.h, domain.dim)
    smoothed = np.maximum(mollify(np.power(extended, p), kernel, domain.is_periodic), 0.0)
    shifted = smoothed + epsilon
    lifted = shifted if m == 1 else np.power(shifted, m - 1)
    values = np.where(domain.exterior_mask, np.nan, lifted)
    logger.debug("Levantamiento eps=%.3g rho=%.3g: min h=%.4g", epsilon, rho, np.nanmin(values))
    return ScalarField(domain, values, f"h[eps={epsilon:g},rho={rho:g}]")
