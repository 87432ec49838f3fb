# SPDX-License-Identifier: MIT
"""
Mallas uniformes, campos y operadores discretos.
"""

from .domain import DomainShape, GridDomain, NodeClass
from .fields import HermitianField, Positivity, ScalarField
from .hermitian import DeterminantResult, hermitian_det_inv
from .operators import complex_hessian, complex_laplacian, gradient_norm
from .snapshot import load_snapshot, save_snapshot

__all__ = [
    "DeterminantResult",
    "DomainShape",
    "GridDomain",
    "HermitianField",
    "NodeClass",
    "Positivity",
    "ScalarField",
    "complex_hessian",
    "complex_laplacian",
    "gradient_norm",
    "hermitian_det_inv",
    "load_snapshot",
    "save_snapshot",
]
