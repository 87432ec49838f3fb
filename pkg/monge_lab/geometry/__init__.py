# SPDX-License-Identifier: MIT
"""
Modelos de métricas de Kähler y verificación de curvatura.
"""

from .curvature import (
    CurvatureSample,
    ObcResult,
    curvature_at,
    curvature_from_potential,
    obc_check,
    symmetry_defect,
)
from .metrics import MetricKind, MetricModel, available_metrics, get_metric, sample_points

__all__ = [
    "CurvatureSample",
    "MetricKind",
    "MetricModel",
    "ObcResult",
    "available_metrics",
    "curvature_at",
    "curvature_from_potential",
    "get_metric",
    "obc_check",
    "sample_points",
    "symmetry_defect",
]
