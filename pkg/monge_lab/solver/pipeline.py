# SPDX-License-Identifier: MIT
"""
Pipeline degenerado: para cada (ε, ρ) del calendario se regulariza f, se
resuelve el problema de Dirichlet partiendo de la etapa anterior y se
registran las normas de la solución.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..errors import DomainError, MongeLabError
from ..estimates.audit import estimate_for_dirichlet
from ..estimates.norms import norms
from ..grid.domain import GridDomain
from ..grid.fields import ScalarField
from ..reports.report_schema import ConditionReport, StageRecord
from ..rhs.conditions import check_conditions
from ..rhs.mollify import RegularizationSchedule, mollify_lift
from .newton import solve_dirichlet
from .options import Initializer, SolveOptions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineResult:
    """Historial de etapas y candidata al límite degenerado."""

    conditions: ConditionReport
    stages: Tuple[StageRecord, ...]
    solution: Optional[ScalarField]
    completed: bool
    failure: Optional[str] = None

    @property
    def lap_history(self) -> List[float]:
        return [stage.lap_sup for stage in self.stages]

    def tail_variation(self) -> float:
        """Variación relativa de sup |Δu| en la mitad final del calendario."""
        history = self.lap_history
        if not history:
            return float("nan")
        tail = history[len(history) // 2 :]
        top = max(tail)
        return 0.0 if top == 0.0 else (top - min(tail)) / top


def degenerate_pipeline(
    domain: GridDomain,
    f: ScalarField,
    schedule: Optional[RegularizationSchedule] = None,
    options: Optional[SolveOptions] = None,
    with_estimates: bool = True,
) -> PipelineResult:
    """Recorre el calendario (ρ interior, ε exterior) con arranque en caliente.

    Si un solve falla, el pipeline se detiene y devuelve el historial parcial
    con la etapa fallida incluida.
    """
    if domain.is_periodic:
        raise DomainError("El pipeline degenerado requiere un dominio con frontera")
    conditions = check_conditions(f)
    schedule = schedule or RegularizationSchedule.default_for(domain)
    options = options or SolveOptions()

    stages: List[StageRecord] = []
    previous: Optional[ScalarField] = None
    running_max = 0.0
    for index, (epsilon, rho) in enumerate(schedule.stages()):
        lifted = mollify_lift(f, epsilon, rho, schedule)
        lifted_conditions = check_conditions(lifted)
        stage_options = (
            options if previous is None else options.with_updates(initializer=Initializer.SUPPLIED)
        )
        try:
            u, report = solve_dirichlet(domain, lifted, stage_options, initial=previous)
        except MongeLabError as exc:
            logger.warning("Etapa %d (eps=%.3g, rho=%.3g) abortada: %s", index, epsilon, rho, exc)
            return PipelineResult(conditions, tuple(stages), previous, False, str(exc))

        field_norms = norms(u)
        running_max = max(running_max, field_norms.sup_lap)
        estimate = None
        if with_estimates and report.converged:
            try:
                estimate = estimate_for_dirichlet(u)
            except DomainError as exc:
                logger.warning("Sin estimación en la etapa %d: %s", index, exc)
        stages.append(
            StageRecord(
                index=index,
                epsilon=epsilon,
                rho=rho,
                solve=report,
                lifted=lifted_conditions,
                c1_norm=float(u.max_abs() + field_norms.sup_grad),
                lap_sup=field_norms.sup_lap,
                running_max_lap=running_max,
                estimate=estimate,
            )
        )
        if not report.converged:
            message = f"la etapa {index} no convergió: {report.message}"
            logger.warning("Pipeline detenido: %s", message)
            return PipelineResult(conditions, tuple(stages), u, False, message)
        logger.info(
            "Etapa %d eps=%.3g rho=%.3g: %d iteraciones, sup|Δu|=%.5g",
            index,
            epsilon,
            rho,
            report.iterations,
            field_norms.sup_lap,
        )
        previous = u

    return PipelineResult(conditions, tuple(stages), previous, True)


def radial_error(solution: ScalarField, exact: np.ndarray) -> float:
    """Error relativo en norma del supremo frente a un perfil exacto sobre la malla."""
    interior = solution.domain.interior_mask
    scale = float(np.max(np.abs(exact[interior])))
    error = float(np.max(np.abs(solution.values[interior] - exact[interior])))
    return error / scale if scale > 0 else error
