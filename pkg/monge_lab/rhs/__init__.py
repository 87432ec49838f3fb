# SPDX-License-Identifier: MIT
"""
Hipótesis sobre la densidad y su regularización.
"""

from .conditions import (
    check_conditions,
    equivalence_identity_residual,
    lift_exponent,
    lipschitz_m2_bound,
)
from .mollify import RegularizationSchedule, mollifier_kernel, mollify_lift

__all__ = [
    "RegularizationSchedule",
    "check_conditions",
    "equivalence_identity_residual",
    "lift_exponent",
    "lipschitz_m2_bound",
    "mollifier_kernel",
    "mollify_lift",
]
