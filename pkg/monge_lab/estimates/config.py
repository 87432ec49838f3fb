# SPDX-License-Identifier: MIT
"""
Parámetros de la función test α(x) = log(x) / C0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DomainError

LAMBDA_MARGIN = 1e-6


def default_c0(m: int) -> float:
    """C0 = 1 + 4m²/(m-1); para m = 1 se toma 1."""
    if m < 1:
        raise DomainError(f"Dimensión inválida: m={m}")
    return 1.0 if m == 1 else 1.0 + 4.0 * m * m / (m - 1)


@dataclass(frozen=True)
class TestFunctionConfig:
    """α con α' = 1/(C0 x) y α'' = -1/(C0 x²), de modo que α'' + C0 α'² = 0.

    ``lam`` es el extremo superior del rango [2, λ] al que se traslada φ.
    """

    __test__ = False

    m: int
    lam: float
    c0: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("m debe ser positivo")
        if not self.lam > 2.0:
            raise DomainError("λ debe ser mayor que 2")
        if self.c0 != default_c0(self.m):
            raise DomainError(f"C0 debe valer {default_c0(self.m)} para m={self.m}")

    @classmethod
    def for_dimension(cls, m: int, lam: float) -> "TestFunctionConfig":
        return cls(m, float(lam), default_c0(m))

    @classmethod
    def for_oscillation(
        cls, m: int, oscillation: float, margin: Optional[float] = None
    ) -> "TestFunctionConfig":
        """λ = 2 + osc + margen: el rango más ajustado que contiene φ trasladada."""
        extra = LAMBDA_MARGIN if margin is None else margin
        return cls.for_dimension(m, 2.0 + float(oscillation) + extra)

    def alpha(self, x):
        return np.log(x) / self.c0

    def alpha_prime(self, x):
        return 1.0 / (self.c0 * np.asarray(x, dtype=float))

    def alpha_second(self, x):
        return -1.0 / (self.c0 * np.asarray(x, dtype=float) ** 2)

    def identity_defect(self, x):
        """α'' + C0 α'² en x."""
        return self.alpha_second(x) + self.c0 * self.alpha_prime(x) ** 2
