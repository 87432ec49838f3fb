# SPDX-License-Identifier: MIT
"""
CLI principal del laboratorio de Monge-Ampère complejo.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer

from .geometry.metrics import available_metrics
from .reports.runner import ExitCode, RunOutcome, RunView, read_report, run_conditions
from .reports.runner import run_curvature, run_lemmas, run_solve
from .settings import LOG_LEVELS, LabSettings, load_settings

app = typer.Typer(
    help="Solver, verificador de estimaciones y chequeos de curvatura.",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)

LOG_FORMAT = "%(levelname)s %(name)s %(message)s"

STAGE_TABLE = ("index", "epsilon", "rho", "converged", "iterations", "lap_sup", "A1_h")
ESTIMATE_TABLE = (
    "h_max_value",
    "trace_at_max",
    "eqm1_slack",
    "pos_bisec3_slack",
    "third_order_slack",
)


def _configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT)
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))


def _settings(ctx: typer.Context) -> LabSettings:
    settings = ctx.obj
    if isinstance(settings, LabSettings):
        return settings
    return load_settings()


def _finish(outcome: RunOutcome) -> None:
    """Imprime el resultado y sale con su código."""
    colour = typer.colors.GREEN if outcome.exit_code is ExitCode.OK else typer.colors.RED
    typer.secho(outcome.message, fg=colour)
    if outcome.output_dir is not None:
        typer.echo(f"Artefactos en {outcome.output_dir}")
    raise typer.Exit(code=int(outcome.exit_code))


def _cell(value: Any) -> str:
    if value is None or value == "":
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    try:
        return f"{float(value):.6g}"
    except (TypeError, ValueError):
        return str(value)


def _print_table(columns: tuple, rows: List[Dict[str, Any]]) -> None:
    typer.echo("  ".join(f"{name:>12}" for name in columns))
    for row in rows:
        typer.echo("  ".join(f"{_cell(row.get(name)):>12}" for name in columns))


def _print_view(view: RunView) -> None:
    manifest = view.manifest
    typer.echo(
        f"Comando: {manifest.command}  estado: {manifest.status}  salida: {manifest.exit_code}"
    )
    if manifest.instance_hash:
        typer.echo(f"Instancia: {manifest.instance_hash}")
    for note in manifest.notes:
        typer.echo(f"  {note}")
    if view.solves:
        converged = sum(1 for solve in view.solves if solve.converged)
        typer.echo(f"Solves: {converged}/{len(view.solves)} convergidos")
    if view.stages:
        typer.echo("")
        _print_table(STAGE_TABLE, view.stages)
    if view.estimates:
        typer.echo("")
        _print_table(ESTIMATE_TABLE, view.estimates)


@app.callback()
def main_callback(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(
        None,
        "--log-level",
        help=f"Nivel de log ({'/'.join(LOG_LEVELS)}). Env: MONGE_LAB_LOG_LEVEL",
        case_sensitive=False,
    ),
) -> None:
    """Configura el logging y la configuración efectiva de la invocación."""
    if log_level is not None and log_level.upper() not in LOG_LEVELS:
        raise typer.BadParameter(f"Nivel desconocido: {log_level}", param_hint="--log-level")
    settings = load_settings().with_updates(log_level=log_level)
    _configure_logging(settings.log_level)
    ctx.obj = settings


@app.command()
def solve(
    ctx: typer.Context,
    instance: Path = typer.Option(..., "--instance", "-i", help="Archivo de instancia JSON."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida."),
) -> None:
    """Comprueba la densidad y resuelve la instancia (solve único o pipeline)."""
    _finish(run_solve(instance, _settings(ctx), out))


@app.command()
def conditions(
    ctx: typer.Context,
    instance: Path = typer.Option(..., "--instance", "-i", help="Archivo de instancia JSON."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida."),
) -> None:
    """Calcula sup f, A y A1 de la densidad."""
    _finish(run_conditions(instance, _settings(ctx), out))


@app.command()
def lemmas(
    ctx: typer.Context,
    seed: Optional[int] = typer.Option(None, "--seed", help="Semilla raíz. Env: MONGE_LAB_SEED"),
    trials: int = typer.Option(100_000, "--trials", min=1, help="Ensayos por lema."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida."),
    inject_fault: bool = typer.Option(False, "--inject-fault", hidden=True),
) -> None:
    """Ejecuta la suite aleatoria de lemas algebraicos."""
    _finish(run_lemmas(_settings(ctx), seed, trials, out, fault_injection=inject_fault))


@app.command()
def curvature(
    ctx: typer.Context,
    metric: str = typer.Option(
        ..., "--metric", "-m", help=f"Modelo de métrica: {', '.join(available_metrics())}."
    ),
    samples: int = typer.Option(20, "--samples", min=1, help="Puntos muestreados."),
    frames: int = typer.Option(100, "--frames", min=1, help="Marcos unitarios por punto."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Semilla raíz."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Directorio de salida."),
) -> None:
    """Curvatura escalar y condición OBC sobre puntos muestreados."""
    _finish(run_curvature(metric, _settings(ctx), samples, frames, seed, out))


@app.command()
def report(
    out: Path = typer.Option(..., "--out", "-o", help="Directorio de una ejecución previa."),
) -> None:
    """Valida el manifiesto de una ejecución y muestra etapas y estimaciones."""
    outcome, view = read_report(out)
    if view is not None:
        _print_view(view)
    _finish(outcome)


def main() -> None:
    """Punto de entrada para `python -m monge_lab`."""
    app()


if __name__ == "__main__":  # pragma: no cover - ejecución directa
    main()
