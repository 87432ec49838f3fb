# SPDX-License-Identifier: MIT
"""
Esquema de datos de los reportes del laboratorio.

Los reportes son dataclasses inmutables serializables a JSON de forma
determinista: claves ordenadas y sin tiempos de reloj (esos solo viven en el
manifiesto).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, is_dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np


class CheckStatus(str, Enum):
    """Posibles estados de una verificación."""

    PASS = "pass"  # nosec B105 - etiqueta simbólica de estado, no credencial
    WARN = "warn"
    FAIL = "fail"
    SKIPPED = "skipped"
    ERROR = "error"


@dataclass(frozen=True)
class ConditionReport:
    """Constantes de las hipótesis sobre la densidad f.

    ``A`` acota por abajo el laplaciano de f^{1/(m-1)} (o de f si m = 1) y
    ``A1`` acota el gradiente de f^{1/m}.
    """

    m: int
    sup_f: float
    inf_f: float
    A: float
    A1: float
    sup_f_node: Tuple[int, ...]
    A_node: Tuple[int, ...]
    A1_node: Tuple[int, ...]
    exponent: float
    nonnegative: bool = True
    positive: bool = True


@dataclass(frozen=True)
class SolveReport:
    """Diagnóstico de un solve de Newton.

    ``residual_history`` corresponde a la última etapa de continuación; es no
    creciente a partir del primer paso aceptado.
    """

    converged: bool
    iterations: int
    residual_history: Tuple[float, ...]
    final_residual: float
    node_count: int
    min_eigenvalue: float
    continuation_steps: int = 0
    normalization: Optional[float] = None
    compatibility_defect: Optional[float] = None
    wall_time: float = 0.0
    message: str = ""


@dataclass(frozen=True)
class EstimateReport:
    """Diagnósticos a priori de una solución.

    ``c1``, ``c2`` y ``c3`` quedan en None hasta el ajuste de la cota final.
    """

    osc: float
    sup_grad: float
    sup_lap: float
    min_trace: float
    h_max_node: Optional[Tuple[int, ...]]
    h_max_value: Optional[float]
    trace_at_max: Optional[float]
    grad_eq_residual: Optional[float]
    eqm1_slack: Optional[float]
    lam: float
    c0: float
    max_principle_value: Optional[float] = None
    max_principle_tolerance: Optional[float] = None
    pos_bisec3_slack: Optional[float] = None
    third_order_slack: Optional[float] = None
    c1: Optional[float] = None
    c2: Optional[float] = None
    c3: Optional[float] = None


@dataclass(frozen=True)
class StageRecord:
    """Una etapa (epsilon, rho) del pipeline degenerado."""

    index: int
    epsilon: float
    rho: float
    solve: SolveReport
    lifted: ConditionReport
    c1_norm: float
    lap_sup: float
    running_max_lap: float
    estimate: Optional[EstimateReport] = None


@dataclass(frozen=True)
class AuditRecord:
    """Ajuste de x^{1+1/(m-1)} <= C1 x + C2 con x = m + Δφ(p) y su raíz C3.

    ``lsq_c2`` es la ordenada de mínimos cuadrados; ``c2`` la eleva hasta
    cubrir todas las muestras.
    """

    c1: float
    c2: float
    c3: float
    lsq_c2: float
    samples: int
    within_lsq: bool
    max_trace: float
    min_eqm1_slack: Optional[float] = None
    lipschitz_bound: Optional[float] = None


@dataclass(frozen=True)
class LemmaRunResult:
    """Resultado de un lema sobre sus ensayos aleatorios."""

    key: str
    name: str
    status: CheckStatus
    trials: int
    violations: int
    worst_slack: float
    counterexample: Optional[Dict[str, Any]] = None


@dataclass(frozen=True)
class LemmaSuiteSummary:
    overall_status: CheckStatus
    total_lemmas: int
    lemmas_passed: int
    lemmas_failed: int
    total_trials: int
    total_violations: int


@dataclass(frozen=True)
class LemmaSuiteReport:
    seed: int
    summary: LemmaSuiteSummary
    results: List[LemmaRunResult]
    fault_injection: bool = False


@dataclass(frozen=True)
class RunManifest:
    """Índice de una ejecución: artefactos, estado y tiempos."""

    command: str
    tool_version: str
    instance_hash: Optional[str]
    status: str
    exit_code: int
    artifacts: List[str]
    started_at: datetime
    finished_at: datetime
    wall_times: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)


VOLATILE_FIELDS = frozenset({"wall_time"})


def _serialize_value(value: Any, skip: frozenset = frozenset()) -> Any:
    if isinstance(value, datetime):
        return value.isoformat()
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        return {
            item.name: _serialize_value(getattr(value, item.name), skip)
            for item in fields(value)
            if item.name not in skip
        }
    if isinstance(value, (list, tuple)):
        return [_serialize_value(item, skip) for item in value]
    if isinstance(value, np.ndarray):
        return [_serialize_value(item, skip) for item in value.tolist()]
    if isinstance(value, dict):
        return {
            (key.value if isinstance(key, Enum) else str(key)): _serialize_value(item, skip)
            for key, item in value.items()
        }
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else None
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, Path):
        return str(value)
    return value


def report_to_dict(report: Any, *, deterministic: bool = False) -> Dict[str, Any]:
    """Serializa un reporte a un diccionario listo para JSON.

    Con ``deterministic`` se omiten los campos de tiempo de reloj.
    """
    data = _serialize_value(report, VOLATILE_FIELDS if deterministic else frozenset())
    if not isinstance(data, dict):
        raise TypeError("La serialización de un reporte debe producir un diccionario")
    return data


def to_json_line(report: Any) -> str:
    """Una línea JSON determinista (claves ordenadas, separadores compactos)."""
    payload = report_to_dict(report, deterministic=True)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _parse_datetime(value: str) -> datetime:
    if value.endswith("Z"):
        value = value.replace("Z", "+00:00")
    return datetime.fromisoformat(value)


def _optional_float(value: Any) -> Optional[float]:
    return None if value is None else float(value)


def _float_or_nan(value: Any) -> float:
    return float("nan") if value is None else float(value)


def solve_report_from_dict(data: Mapping[str, Any]) -> SolveReport:
    return SolveReport(
        converged=bool(data.get("converged", False)),
        iterations=int(data.get("iterations", 0)),
        residual_history=tuple(_float_or_nan(item) for item in data.get("residual_history", [])),
        final_residual=_float_or_nan(data.get("final_residual")),
        node_count=int(data.get("node_count", 0)),
        min_eigenvalue=_float_or_nan(data.get("min_eigenvalue")),
        continuation_steps=int(data.get("continuation_steps", 0)),
        normalization=_optional_float(data.get("normalization")),
        compatibility_defect=_optional_float(data.get("compatibility_defect")),
        wall_time=float(data.get("wall_time") or 0.0),
        message=str(data.get("message", "")),
    )


def manifest_from_dict(data: Mapping[str, Any]) -> RunManifest:
    """Reconstruye un RunManifest desde un diccionario serializado."""
    return RunManifest(
        command=str(data.get("command", "")),
        tool_version=str(data.get("tool_version", "")),
        instance_hash=data.get("instance_hash"),
        status=str(data.get("status", "")),
        exit_code=int(data.get("exit_code", 0)),
        artifacts=[str(item) for item in data.get("artifacts", [])],
        started_at=_parse_datetime(str(data["started_at"])),
        finished_at=_parse_datetime(str(data["finished_at"])),
        wall_times={str(k): float(v) for k, v in (data.get("wall_times") or {}).items()},
        notes=[str(item) for item in data.get("notes", [])],
    )
