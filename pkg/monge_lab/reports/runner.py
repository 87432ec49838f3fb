# SPDX-License-Identifier: MIT
"""
Orquestación de los comandos: cada función ejecuta un verbo, escribe sus
artefactos con ``RunStore`` y devuelve un ``RunOutcome`` con el código de
salida. Las excepciones de la biblioteca se traducen aquí.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import (
    AUDIT_FILENAME,
    CONDITIONS_FILENAME,
    COUNTEREXAMPLES_FILENAME,
    CURVATURE_FILENAME,
    ESTIMATES_FILENAME,
    LEMMAS_FILENAME,
    PROFILE_FILENAME,
    REPORTS_FILENAME,
    SOLUTION_FILENAME,
    STAGES_FILENAME,
)
from ..errors import (
    DomainError,
    InvalidDensityError,
    MongeLabError,
    PositivityBreakdownError,
    UnknownMetricError,
)
from ..estimates.audit import (
    estimate_for_dirichlet,
    estimate_for_torus,
    final_bound_audit,
    with_fit,
)
from ..estimates.norms import norms
from ..estimates.suite import LemmaSuiteConfig, run_lemma_suite
from ..geometry.curvature import obc_check
from ..geometry.metrics import get_metric, sample_points
from ..expression import compile_expression
from ..grid.domain import DomainShape, GridDomain
from ..grid.fields import ScalarField
from ..instance import InstanceSpec, build_density, build_domain, load_instance
from ..reports.report_schema import (
    ConditionReport,
    EstimateReport,
    RunManifest,
    SolveReport,
    StageRecord,
    report_to_dict,
    solve_report_from_dict,
)
from ..rhs.conditions import check_conditions
from ..settings import LabSettings
from ..solver.barrier import build_barrier, sandwich_check
from ..solver.newton import solve_dirichlet, solve_torus
from ..solver.pipeline import degenerate_pipeline, radial_error
from ..solver.radial import radial_oracle
from .storage import ManifestCheck, RunStore

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    CHECK_FAILED = 1
    INSTANCE = 2
    SOLVER = 3
    DENSITY = 4
    LEMMA = 5


@dataclass(frozen=True)
class RunOutcome:
    """Resultado de un comando: código de salida, mensaje y manifiesto."""

    exit_code: ExitCode
    message: str
    output_dir: Optional[Path] = None
    manifest: Optional[RunManifest] = None
    details: Dict[str, Any] = field(default_factory=dict)


STAGE_COLUMNS = (
    "index",
    "epsilon",
    "rho",
    "converged",
    "iterations",
    "continuation_steps",
    "final_residual",
    "lap_sup",
    "running_max_lap",
    "c1_norm",
    "sup_h",
    "A_h",
    "A1_h",
)

PROFILE_COLUMNS = ("stage", "iteration", "residual")


def _status(code: ExitCode) -> str:
    return "ok" if code is ExitCode.OK else code.name.lower()


def _resolve_output(
    spec: Optional[InstanceSpec],
    out: Optional[Path],
    settings: LabSettings,
    default_name: str,
    base_dir: Optional[Path] = None,
) -> Path:
    if out is not None:
        return Path(out)
    if spec is not None and spec.output_dir:
        target = Path(spec.output_dir)
        return target if target.is_absolute() or base_dir is None else base_dir / target
    name = spec.name if spec is not None else default_name
    return settings.output_root / name


def _load(instance_path: Path) -> Tuple[InstanceSpec, GridDomain, ScalarField]:
    spec = load_instance(instance_path)
    domain = build_domain(spec.domain)
    density = build_density(spec.density, domain, Path(instance_path).parent)
    return spec, domain, density


def _stage_row(stage: StageRecord) -> List[Any]:
    return [
        stage.index,
        stage.epsilon,
        stage.rho,
        stage.solve.converged,
        stage.solve.iterations,
        stage.solve.continuation_steps,
        stage.solve.final_residual,
        stage.lap_sup,
        stage.running_max_lap,
        stage.c1_norm,
        stage.lifted.sup_f,
        stage.lifted.A,
        stage.lifted.A1,
    ]


def _profile_rows(solves: Sequence[SolveReport]) -> Iterator[Tuple[int, int, float]]:
    for stage, report in enumerate(solves):
        for iteration, residual in enumerate(report.residual_history):
            yield stage, iteration, residual


def _write_stages(store: RunStore, stages: Sequence[StageRecord]) -> None:
    """CSV de etapas y de historial de residuos de Newton, también para un solve único."""
    store.write_csv(STAGES_FILENAME, STAGE_COLUMNS, (_stage_row(s) for s in stages))
    store.write_csv(PROFILE_FILENAME, PROFILE_COLUMNS, _profile_rows([s.solve for s in stages]))


def _single_stage(
    report: SolveReport,
    solution: ScalarField,
    conditions: ConditionReport,
    estimate: Optional[EstimateReport],
) -> StageRecord:
    # sin regularización: epsilon = rho = 0 y la densidad es la de la instancia
    field_norms = norms(solution)
    return StageRecord(
        index=0,
        epsilon=0.0,
        rho=0.0,
        solve=report,
        lifted=conditions,
        c1_norm=float(solution.max_abs() + field_norms.sup_grad),
        lap_sup=field_norms.sup_lap,
        running_max_lap=field_norms.sup_lap,
        estimate=estimate,
    )


def _radial_reference(
    spec: InstanceSpec, domain: GridDomain, solution: ScalarField
) -> Optional[float]:
    """Error relativo frente al oráculo radial si f solo depende de |z - c|² en una bola."""
    if domain.shape is not DomainShape.BALL or spec.density.expression is None:
        return None
    expression = compile_expression(spec.density.expression, domain.m)
    if not expression.is_radial:
        return None
    try:
        profile = radial_oracle(
            lambda s: expression.radial(s, domain.center), domain.m, domain.extent
        )
        exact = profile.on_domain(domain)
    except MongeLabError as exc:
        logger.warning("Oráculo radial omitido: %s", exc)
        return None
    error = radial_error(solution, exact.values)
    logger.info("Error relativo frente al oráculo radial: %.3e", error)
    return error


def _write_estimates(
    store: RunStore,
    estimates: List[EstimateReport],
    conditions: ConditionReport,
    extra: Dict[str, Any],
) -> None:
    """Escribe la auditoría y los reportes de estimación con C1, C2 y C3 ajustadas."""
    payload: Dict[str, Any] = dict(extra)
    if estimates:
        audit = final_bound_audit(estimates, conditions)
        payload["audit"] = report_to_dict(audit, deterministic=True)
        store.write_jsonl(ESTIMATES_FILENAME, [with_fit(e, audit) for e in estimates])
    store.write_json(AUDIT_FILENAME, payload)


def _solve_single(
    spec: InstanceSpec,
    domain: GridDomain,
    density: ScalarField,
    store: RunStore,
    conditions: ConditionReport,
) -> Tuple[ExitCode, str]:
    options = spec.solve.build()
    estimates: List[EstimateReport] = []
    candidate: Optional[EstimateReport] = None
    extra: Dict[str, Any] = {"domain": domain.describe()}
    if domain.is_periodic:
        solution, _, report = solve_torus(domain, density, options)
        if report.converged and spec.verifier.estimates:
            candidate = _estimate(lambda: estimate_for_torus(solution))
    else:
        solution, report = solve_dirichlet(domain, density, options)
        if report.converged:
            barrier = build_barrier(domain, conditions.sup_f)
            extra["sandwich"] = report_to_dict(sandwich_check(solution, barrier))
            extra["radial_error"] = _radial_reference(spec, domain, solution)
            if spec.verifier.estimates:
                candidate = _estimate(lambda: estimate_for_dirichlet(solution))
    if candidate is not None:
        estimates.append(candidate)
    store.write_jsonl(REPORTS_FILENAME, [report])
    _write_stages(store, [_single_stage(report, solution, conditions, candidate)])
    store.write_snapshot(SOLUTION_FILENAME, solution)
    _write_estimates(store, estimates, conditions, extra)
    if not report.converged:
        return ExitCode.SOLVER, f"El solve no convergió: {report.message}"
    return ExitCode.OK, f"Solve convergido en {report.iterations} iteraciones"


def _estimate(build) -> Optional[EstimateReport]:
    try:
        return build()
    except DomainError as exc:
        logger.warning("Estimación omitida: %s", exc)
        return None


def _solve_pipeline(
    spec: InstanceSpec,
    domain: GridDomain,
    density: ScalarField,
    store: RunStore,
    conditions: ConditionReport,
) -> Tuple[ExitCode, str]:
    assert spec.schedule is not None
    schedule = spec.schedule.build(domain.h)
    result = degenerate_pipeline(
        domain, density, schedule, spec.solve.build(), with_estimates=spec.verifier.estimates
    )
    solves: List[SolveReport] = [stage.solve for stage in result.stages]
    store.write_jsonl(REPORTS_FILENAME, solves)
    _write_stages(store, result.stages)
    estimates = [stage.estimate for stage in result.stages if stage.estimate is not None]
    extra: Dict[str, Any] = {
        "domain": domain.describe(),
        "tail_variation": result.tail_variation(),
    }
    if result.solution is not None:
        store.write_snapshot(SOLUTION_FILENAME, result.solution)
        if result.completed:
            extra["radial_error"] = _radial_reference(spec, domain, result.solution)
    _write_estimates(store, estimates, conditions, extra)
    if not result.completed:
        return ExitCode.SOLVER, f"Pipeline detenido: {result.failure}"
    return ExitCode.OK, f"Pipeline completado en {len(result.stages)} etapas"


def run_solve(
    instance_path: Path, settings: LabSettings, out: Optional[Path] = None
) -> RunOutcome:
    """check_conditions, luego pipeline o solve único, y reportes de estimación."""
    started = time.perf_counter()
    try:
        spec, domain, density = _load(instance_path)
    except MongeLabError as exc:
        return RunOutcome(ExitCode.INSTANCE, str(exc))

    output = _resolve_output(spec, out, settings, "solve", Path(instance_path).parent)
    store = RunStore(output)
    store.begin()
    notes: List[str] = []
    try:
        conditions = check_conditions(density)
        store.write_json(CONDITIONS_FILENAME, conditions)
        if spec.schedule is not None:
            code, message = _solve_pipeline(spec, domain, density, store, conditions)
        else:
            code, message = _solve_single(spec, domain, density, store, conditions)
    except InvalidDensityError as exc:
        code, message = ExitCode.DENSITY, f"Densidad inválida: {exc}"
    except PositivityBreakdownError as exc:
        code, message = ExitCode.SOLVER, str(exc)
    except MongeLabError as exc:
        code, message = ExitCode.SOLVER, f"Fallo del solver: {exc}"
    notes.append(message)
    manifest = store.finish(
        "solve",
        _status(code),
        int(code),
        spec.instance_hash(),
        {"solve": time.perf_counter() - started},
        notes,
    )
    return RunOutcome(code, message, output, manifest)


def run_conditions(
    instance_path: Path, settings: LabSettings, out: Optional[Path] = None
) -> RunOutcome:
    """Calcula sup f, A y A1 de la densidad de la instancia."""
    started = time.perf_counter()
    try:
        spec, _, density = _load(instance_path)
    except MongeLabError as exc:
        return RunOutcome(ExitCode.INSTANCE, str(exc))
    output = _resolve_output(spec, out, settings, "conditions", Path(instance_path).parent)
    store = RunStore(output)
    store.begin()
    details: Dict[str, Any] = {}
    try:
        conditions = check_conditions(density)
    except InvalidDensityError as exc:
        code, message = ExitCode.DENSITY, f"Densidad inválida: {exc}"
    else:
        store.write_json(CONDITIONS_FILENAME, conditions)
        details = report_to_dict(conditions)
        code = ExitCode.OK
        message = f"sup f={conditions.sup_f:.6g} A={conditions.A:.6g} A1={conditions.A1:.6g}"
    manifest = store.finish(
        "conditions",
        _status(code),
        int(code),
        spec.instance_hash(),
        {"conditions": time.perf_counter() - started},
        [message],
    )
    return RunOutcome(code, message, output, manifest, details)


def run_lemmas(
    settings: LabSettings,
    seed: Optional[int] = None,
    trials: int = 100_000,
    out: Optional[Path] = None,
    fault_injection: bool = False,
) -> RunOutcome:
    """Ejecuta la suite de lemas; sale con 5 si hay violaciones."""
    started = time.perf_counter()
    config = LemmaSuiteConfig(
        trials=trials,
        seed=settings.seed if seed is None else seed,
        max_workers=settings.max_workers,
    )
    output = _resolve_output(None, out, settings, "lemmas")
    store = RunStore(output)
    store.begin()
    report = run_lemma_suite(config, fault_injection=fault_injection)
    store.write_csv(
        LEMMAS_FILENAME,
        ("key", "name", "status", "trials", "violations", "worst_slack"),
        (
            (r.key, r.name, r.status.value, r.trials, r.violations, r.worst_slack)
            for r in report.results
        ),
    )
    failing = [r for r in report.results if r.violations]
    if failing:
        store.write_json(
            COUNTEREXAMPLES_FILENAME,
            {r.key: r.counterexample for r in failing},
        )
        code = ExitCode.LEMMA
        message = f"{report.summary.total_violations} violaciones en {len(failing)} lemas"
    else:
        code = ExitCode.OK
        message = f"{report.summary.total_lemmas} lemas sin violaciones ({trials} ensayos cada uno)"
    manifest = store.finish(
        "lemmas",
        _status(code),
        int(code),
        None,
        {"lemmas": time.perf_counter() - started},
        [message],
    )
    return RunOutcome(code, message, output, manifest, {"summary": report_to_dict(report.summary)})


def run_curvature(
    metric: str,
    settings: LabSettings,
    samples: int = 20,
    frames: int = 100,
    seed: Optional[int] = None,
    out: Optional[Path] = None,
) -> RunOutcome:
    """Curvatura escalar y mínimo OBC por punto muestreado."""
    started = time.perf_counter()
    try:
        model = get_metric(metric)
    except UnknownMetricError as exc:
        return RunOutcome(ExitCode.INSTANCE, str(exc))
    root_seed = settings.seed if seed is None else seed
    rng = np.random.default_rng(np.random.SeedSequence(root_seed))
    points = sample_points(model, samples, rng)
    result = obc_check(model, points, frames_per_point=frames, seed=root_seed)

    output = _resolve_output(None, out, settings, f"curvature-{metric}")
    store = RunStore(output)
    store.begin()
    header = ["index"]
    for j in range(model.m):
        header.extend((f"re_z{j + 1}", f"im_z{j + 1}"))
    header.extend(("S", "obc_min"))
    rows = []
    for index, (sample, minimum) in enumerate(zip(result.samples, result.point_minima)):
        row: List[Any] = [index]
        for z in sample.point:
            row.extend((float(np.real(z)), float(np.imag(z))))
        row.extend((sample.scalar, minimum))
        rows.append(row)
    store.write_csv(CURVATURE_FILENAME, header, rows)

    violates = not result.passed
    if violates and model.obc_expected:
        code = ExitCode.CHECK_FAILED
        message = f"{model.name}: violación inesperada de OBC (mínimo {result.obc_min:.3e})"
    elif violates:
        code = ExitCode.OK
        message = f"{model.name}: violates-OBC (control negativo, mínimo {result.obc_min:.3e})"
    else:
        code = ExitCode.OK
        message = f"{model.name}: OBC satisfecha (mínimo {result.obc_min:.3e})"
    manifest = store.finish(
        "curvature",
        _status(code),
        int(code),
        None,
        {"curvature": time.perf_counter() - started},
        [message],
    )
    return RunOutcome(
        code,
        message,
        output,
        manifest,
        {"violates_obc": violates, "obc_min": result.obc_min, "passed": result.passed},
    )


@dataclass(frozen=True)
class RunView:
    """Contenido de un directorio de ejecución ya existente."""

    manifest: RunManifest
    check: ManifestCheck
    solves: List[SolveReport]
    stages: List[Dict[str, str]]
    estimates: List[Dict[str, Any]]


def read_report(run_dir: Path) -> Tuple[RunOutcome, Optional[RunView]]:
    """Valida el manifiesto frente al disco y carga etapas y estimaciones."""
    store = RunStore(run_dir)
    manifest = store.load_manifest()
    if manifest is None:
        return RunOutcome(ExitCode.INSTANCE, f"No hay manifiesto en {store.root}"), None
    check = store.verify_manifest(manifest)
    view = RunView(
        manifest=manifest,
        check=check,
        solves=[solve_report_from_dict(row) for row in store.read_jsonl(REPORTS_FILENAME)],
        stages=store.read_csv(STAGES_FILENAME),
        estimates=store.read_jsonl(ESTIMATES_FILENAME),
    )
    if not check.consistent:
        message = f"Manifiesto inconsistente: faltan {check.missing}, sobran {check.orphans}"
        return RunOutcome(ExitCode.CHECK_FAILED, message, store.root, manifest), view
    message = f"{manifest.command}: {manifest.status} ({len(manifest.artifacts)} artefactos)"
    return RunOutcome(ExitCode.OK, message, store.root, manifest), view
