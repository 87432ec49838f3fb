# SPDX-License-Identifier: MIT
"""
Esquema de reportes y persistencia de ejecuciones.

``runner`` no se reexporta aquí: depende del solver, que a su vez usa este
esquema.
"""

from .report_schema import (
    AuditRecord,
    CheckStatus,
    ConditionReport,
    EstimateReport,
    LemmaRunResult,
    LemmaSuiteReport,
    LemmaSuiteSummary,
    RunManifest,
    SolveReport,
    StageRecord,
    report_to_dict,
    to_json_line,
)
from .storage import ManifestCheck, RunStore

__all__ = [
    "AuditRecord",
    "CheckStatus",
    "ConditionReport",
    "EstimateReport",
    "LemmaRunResult",
    "LemmaSuiteReport",
    "LemmaSuiteSummary",
    "ManifestCheck",
    "RunManifest",
    "RunStore",
    "SolveReport",
    "StageRecord",
    "report_to_dict",
    "to_json_line",
]
