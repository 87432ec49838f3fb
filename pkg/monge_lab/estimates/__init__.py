# SPDX-License-Identifier: MIT
"""
Diagnósticos de la estimación a priori y suite de lemas.
"""

from .audit import (
    build_estimate_report,
    estimate_for_dirichlet,
    estimate_for_torus,
    final_bound_audit,
)
from .config import TestFunctionConfig, default_c0
from .h_profile import HProfile, profile_H
from .lemmas import (
    lemma_case_split,
    lemma_m2_identity,
    lemma_newton_inequality,
    lemma_third_order_bound,
)
from .norms import FieldNorms, norms
from .suite import LemmaSuiteConfig, run_lemma_suite

__all__ = [
    "FieldNorms",
    "HProfile",
    "LemmaSuiteConfig",
    "TestFunctionConfig",
    "build_estimate_report",
    "default_c0",
    "estimate_for_dirichlet",
    "estimate_for_torus",
    "final_bound_audit",
    "lemma_case_split",
    "lemma_m2_identity",
    "lemma_newton_inequality",
    "lemma_third_order_bound",
    "norms",
    "profile_H",
    "run_lemma_suite",
]
