# SPDX-License-Identifier: MIT
"""
Normas discretas de la estimación a priori.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..grid.fields import ScalarField
from ..grid.operators import complex_laplacian, gradient_norm


@dataclass(frozen=True)
class FieldNorms:
    osc: float
    sup_grad: float
    sup_lap: float
    min_trace: float


def norms(phi: ScalarField, m: Optional[int] = None) -> FieldNorms:
    """Oscilación, sup |∇φ|, sup |Δφ| y min (m + Δφ) sobre el interior."""
    m = phi.domain.m if m is None else m
    interior = phi.interior_values()
    lap = complex_laplacian(phi).interior_values()
    grad = gradient_norm(phi).interior_values()
    return FieldNorms(
        osc=float(np.max(interior) - np.min(interior)),
        sup_grad=float(np.max(grad)),
        sup_lap=float(np.max(np.abs(lap))),
        min_trace=float(m + np.min(lap)),
    )
