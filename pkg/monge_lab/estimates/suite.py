# SPDX-License-Identifier: MIT
"""
Suite de ensayos aleatorios de los lemas algebraicos.

Cada lema recibe su propio generador derivado de la semilla raíz, de modo que
el resultado no depende del orden de ejecución ni del número de hilos.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from ..constants import DEFAULT_SEED, LEMMA_RTOL
from ..errors import DomainError
from ..reports.report_schema import (
    CheckStatus,
    LemmaRunResult,
    LemmaSuiteReport,
    LemmaSuiteSummary,
)
from .config import TestFunctionConfig, default_c0
from .lemmas import (
    case_split_value,
    eqm1_slack_batch,
    newton_inequality_batch,
    random_positive_hermitian,
    synthetic_third_order,
    third_order_sides,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LemmaSuiteConfig:
    """Parámetros de la suite: ensayos por lema, semilla raíz y lotes."""

    trials: int = 100_000
    seed: int = DEFAULT_SEED
    batch_size: int = 20_000
    max_workers: int = 1
    enabled: Optional[Set[str]] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError("Se requiere al menos un ensayo por lema")
        if self.batch_size < 1 or self.max_workers < 1:
            raise DomainError("batch_size y max_workers deben ser positivos")

    @staticmethod
    def from_names(names: Optional[Iterable[str]]) -> Optional[Set[str]]:
        if not names:
            return None
        normalized = {name.strip().lower() for name in names if name.strip()}
        return normalized or None


@dataclass(frozen=True)
class TrialBatch:
    """Holguras relativas (>= 0 si el lema se cumple) y las entradas de cada ensayo."""

    slack: np.ndarray
    inputs: Dict[str, np.ndarray]
    params: Dict[str, Any] = field(default_factory=dict)


TrialFunction = Callable[[np.random.Generator, int], List[TrialBatch]]


@dataclass(frozen=True)
class LemmaSpec:
    """Metadatos de un lema de la suite."""

    key: str
    name: str
    trials: TrialFunction
    tolerance: float = LEMMA_RTOL


def _split(count: int, dims: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """Reparte ``count`` ensayos entre las dimensiones, en orden."""
    base, extra = divmod(count, len(dims))
    shares = [(m, base + (1 if index < extra else 0)) for index, m in enumerate(dims)]
    return [(m, share) for m, share in shares if share > 0]


def _relative(difference: np.ndarray, *sides: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.max(np.abs(np.stack(sides)), axis=0))
    return difference / scale


def _newton_trials(rng: np.random.Generator, count: int) -> List[TrialBatch]:
    batches = []
    for m, share in _split(count, (2, 3, 4)):
        b = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(share, m)))
        lhs, rhs = newton_inequality_batch(b)
        batches.append(TrialBatch(_relative(lhs - rhs, lhs, rhs), {"B": b}, {"m": m}))
    return batches


def _case_split_trials(rng: np.random.Generator, count: int) -> List[TrialBatch]:
    batches = []
    for m, share in _split(count, (2, 3, 4, 5, 6)):
        a = rng.standard_normal((share, m)) * np.exp(rng.uniform(-3.0, 3.0, size=(share, 1)))
        a[:, 0] = np.abs(a[:, 0]) + 1e-300
        a[:, 1] = -np.abs(a[:, 1]) - 1e-300
        a = rng.permuted(a, axis=1)
        value = case_split_value(a, m)
        sq = np.sum(a**2, axis=-1)
        batches.append(TrialBatch(_relative(-value, sq), {"a": a}, {"m": m}))
    return batches


def _alpha_trials(rng: np.random.Generator, count: int) -> List[TrialBatch]:
    batches = []
    for m, share in _split(count, (1, 2, 3)):
        lam = 2.0 + rng.uniform(1e-6, 50.0, size=share)
        cfg = TestFunctionConfig.for_dimension(m, float(np.max(lam)))
        x = rng.uniform(2.0, lam)
        defect = np.abs(cfg.identity_defect(x)) / (cfg.c0 * cfg.alpha_prime(x) ** 2)
        batches.append(TrialBatch(-defect, {"x": x, "lam": lam}, {"m": m}))
    return batches


def _third_order_trials(rng: np.random.Generator, count: int) -> List[TrialBatch]:
    batches = []
    for m, share in _split(count, (2, 3)):
        c0 = default_c0(m)
        lam = 2.0 + rng.uniform(1e-6, 50.0)
        d, t, grad_sq, lap, alpha_prime = synthetic_third_order(rng, m, share, lam, c0)
        lhs, rhs = third_order_sides(d, t, grad_sq, lap, alpha_prime, m)
        batches.append(
            TrialBatch(
                _relative(rhs - lhs, lhs, rhs),
                {"d": d, "T": t, "grad_sq": grad_sq, "lap": lap},
                {"m": m, "lam": lam},
            )
        )
    return batches


def _eqm1_trials(rng: np.random.Generator, count: int) -> List[TrialBatch]:
    batches = []
    for m, share in _split(count, (2, 3)):
        matrices = random_positive_hermitian(rng, m, share)
        slack = eqm1_slack_batch(matrices)
        inverse_trace = np.real(np.trace(np.linalg.inv(matrices), axis1=-2, axis2=-1))
        batches.append(TrialBatch(_relative(slack, inverse_trace), {"G": matrices}, {"m": m}))
    return batches


LEMMA_SPECS: Tuple[LemmaSpec, ...] = (
    LemmaSpec("newton_inequality", "Desigualdad de tipo Newton", _newton_trials),
    LemmaSpec("case_split", "Separación en casos (signos mixtos)", _case_split_trials),
    LemmaSpec("alpha_identity", "Identidad α'' + C0 α'² = 0", _alpha_trials, tolerance=1e-14),
    LemmaSpec("third_order", "Cota de tercer orden (datos sintéticos)", _third_order_trials),
    LemmaSpec("eqm1", "Desigualdad (m-1) matricial", _eqm1_trials, tolerance=1e-9),
)


def lemma_keys() -> Tuple[str, ...]:
    return tuple(spec.key for spec in LEMMA_SPECS)


def _counterexample(batch: TrialBatch, index: int) -> Dict[str, Any]:
    example: Dict[str, Any] = dict(batch.params)
    for name, values in batch.inputs.items():
        value = values[index]
        if np.iscomplexobj(value):
            example[name] = {"re": np.real(value).tolist(), "im": np.imag(value).tolist()}
        else:
            example[name] = np.asarray(value).tolist()
    example["slack"] = float(batch.slack[index])
    return example


def _run_lemma(
    spec: LemmaSpec,
    rng: np.random.Generator,
    config: LemmaSuiteConfig,
    fault_injection: bool,
) -> LemmaRunResult:
    violations = 0
    worst = np.inf
    worst_example: Optional[Dict[str, Any]] = None
    remaining = config.trials
    while remaining > 0:
        count = min(config.batch_size, remaining)
        remaining -= count
        for batch in spec.trials(rng, count):
            slack = -batch.slack if fault_injection else batch.slack
            failed = slack < -spec.tolerance
            violations += int(np.count_nonzero(failed))
            index = int(np.argmin(slack))
            if slack[index] < worst:
                worst = float(slack[index])
                if failed[index]:
                    worst_example = _counterexample(
                        TrialBatch(slack, batch.inputs, batch.params), index
                    )
    status = CheckStatus.PASS if violations == 0 else CheckStatus.FAIL
    log = logger.info if violations == 0 else logger.warning
    log(
        "Lema %s: %d ensayos, %d violaciones, peor holgura %.3e",
        spec.key,
        config.trials,
        violations,
        worst,
    )
    return LemmaRunResult(
        key=spec.key,
        name=spec.name,
        status=status,
        trials=config.trials,
        violations=violations,
        worst_slack=worst,
        counterexample=worst_example,
    )


def _aggregate_summary(results: List[LemmaRunResult]) -> LemmaSuiteSummary:
    failed = sum(1 for item in results if item.status in {CheckStatus.FAIL, CheckStatus.ERROR})
    if failed:
        overall = CheckStatus.FAIL
    elif not results:
        overall = CheckStatus.SKIPPED
    else:
        overall = CheckStatus.PASS
    return LemmaSuiteSummary(
        overall_status=overall,
        total_lemmas=len(results),
        lemmas_passed=sum(1 for item in results if item.status == CheckStatus.PASS),
        lemmas_failed=failed,
        total_trials=sum(item.trials for item in results),
        total_violations=sum(item.violations for item in results),
    )


def run_lemma_suite(
    config: Optional[LemmaSuiteConfig] = None, fault_injection: bool = False
) -> LemmaSuiteReport:
    """Ejecuta todos los lemas habilitados y agrega el resultado.

    Con ``fault_injection`` se niega cada desigualdad (gancho de prueba): una
    suite sana debe fallar en ese modo.
    """
    config = config or LemmaSuiteConfig()
    streams = np.random.SeedSequence(config.seed).spawn(len(LEMMA_SPECS))
    jobs = [
        (spec, np.random.default_rng(stream))
        for spec, stream in zip(LEMMA_SPECS, streams)
        if config.enabled is None or spec.key in config.enabled
    ]
    if config.max_workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.max_workers) as pool:
            results = list(
                pool.map(lambda job: _run_lemma(job[0], job[1], config, fault_injection), jobs)
            )
    else:
        results = [_run_lemma(spec, rng, config, fault_injection) for spec, rng in jobs]
    summary = _aggregate_summary(results)
    return LemmaSuiteReport(
        seed=config.seed, summary=summary, results=results, fault_injection=fault_injection
    )
