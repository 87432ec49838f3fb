# SPDX-License-Identifier: MIT
"""
Laboratorio numérico para la ecuación de Monge-Ampère compleja.
"""

from .constants import TOOL_VERSION
from .errors import (
    BoundaryDataMissingError,
    DomainError,
    InstanceError,
    InvalidDensityError,
    MongeLabError,
    PositivityBreakdownError,
)
from .grid import GridDomain, HermitianField, ScalarField
from .instance import InstanceSpec, load_instance
from .rhs import check_conditions, mollify_lift
from .settings import LabSettings, load_settings
from .solver import degenerate_pipeline, solve_dirichlet, solve_torus

__version__ = TOOL_VERSION

__all__ = [
    "BoundaryDataMissingError",
    "DomainError",
    "GridDomain",
    "HermitianField",
    "InstanceError",
    "InstanceSpec",
    "InvalidDensityError",
    "LabSettings",
    "MongeLabError",
    "PositivityBreakdownError",
    "ScalarField",
    "check_conditions",
    "degenerate_pipeline",
    "load_instance",
    "load_settings",
    "mollify_lift",
    "solve_dirichlet",
    "solve_torus",
    "__version__",
]
