# SPDX-License-Identifier: MIT
"""
Newton amortiguado para la ecuación de Monge-Ampère compleja discreta.

Se resuelve log det(u_{jk̄}) = log f en los nodos interiores; la búsqueda
lineal solo acepta iterados estrictamente plurisubarmónicos con residuo en
norma del supremo estrictamente menor.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from ..constants import CONTINUATION_ATOL
from ..errors import DomainError, InvalidDensityError, PositivityBreakdownError
from ..grid.domain import GridDomain
from ..grid.fields import ScalarField
from ..grid.hermitian import det_array, inverse_array, min_eigenvalue_array
from ..reports.report_schema import SolveReport
from .assembly import DiscreteOperators, operators_for
from .barrier import build_barrier
from .options import Initializer, SolveOptions

logger = logging.getLogger(__name__)


@dataclass
class _Evaluation:
    """Hessiano, residuo y autovalor mínimo de un iterado."""

    hessian: np.ndarray
    min_eigenvalues: np.ndarray
    residual: Optional[np.ndarray] = None

    @property
    def min_eigenvalue(self) -> float:
        return float(np.min(self.min_eigenvalues))

    @property
    def sup_residual(self) -> float:
        return float(np.max(np.abs(self.residual))) if self.residual is not None else np.inf


@dataclass
class _StageOutcome:
    interior: np.ndarray
    converged: bool
    iterations: int
    history: List[float] = field(default_factory=list)
    min_eigenvalue: float = float("nan")
    message: str = ""


def _positive_interior(domain: GridDomain, f: ScalarField) -> np.ndarray:
    if not f.domain.compatible_with(domain):
        raise DomainError("La densidad está definida sobre otra malla")
    values = f.interior_values()
    if np.any(values <= 0):
        position = int(np.flatnonzero(values <= 0)[0])
        node = domain.node_of(int(domain.interior_index[position]))
        raise InvalidDensityError(
            f"El solve no degenerado requiere f > 0 (f={values[position]:.3e} en {node})", node
        )
    return values


class _DirichletProblem:
    """log det(u_{jk̄}) - log f con la banda extendida desde el interior.

    ``offset`` se suma a la extensión en la banda durante la continuación
    de los datos de frontera; vale cero en el problema final.
    """

    def __init__(self, domain: GridDomain, log_f: np.ndarray, options: SolveOptions) -> None:
        self.domain = domain
        self.operators: DiscreteOperators = operators_for(domain)
        self.log_f = log_f
        self.options = options
        self.offset = np.zeros(domain.size)

    def set_offset(self, offset: np.ndarray) -> None:
        values = np.zeros(self.domain.size)
        band = self.domain.band_mask.reshape(-1)
        values[band] = offset.reshape(-1)[band]
        self.offset = values

    def full(self, interior: np.ndarray) -> np.ndarray:
        return self.operators.extend(interior, self.offset)

    def evaluate(self, interior: np.ndarray) -> _Evaluation:
        hessian = self.operators.complex_hessian(self.full(interior))
        smallest = min_eigenvalue_array(hessian)
        evaluation = _Evaluation(hessian, smallest)
        if np.all(smallest >= self.options.positivity_floor):
            evaluation.residual = np.log(det_array(hessian)) - self.log_f
        return evaluation

    def newton_step(self, evaluation: _Evaluation) -> np.ndarray:
        inverse = inverse_array(evaluation.hessian, det_array(evaluation.hessian))
        jacobian = self.operators.linearization(inverse)
        return spsolve(jacobian.tocsc(), -evaluation.residual)

    def first_failure(self, evaluation: _Evaluation) -> Tuple[Tuple[int, ...], float]:
        position = int(np.argmin(evaluation.min_eigenvalues))
        node = self.domain.node_of(int(self.domain.interior_index[position]))
        return node, float(evaluation.min_eigenvalues[position])


def _damped_newton(
    problem,
    interior: np.ndarray,
    options: SolveOptions,
) -> _StageOutcome:
    """Bucle de Newton con búsqueda lineal por reducción del paso."""
    evaluation = problem.evaluate(interior)
    if evaluation.residual is None:
        node, value = problem.first_failure(evaluation)
        raise PositivityBreakdownError(node, value)

    history = [evaluation.sup_residual]
    iterations = 0
    while True:
        if history[-1] <= options.tolerance:
            return _StageOutcome(interior, True, iterations, history, evaluation.min_eigenvalue)
        if iterations >= options.max_iterations:
            return _StageOutcome(
                interior,
                False,
                iterations,
                history,
                evaluation.min_eigenvalue,
                message="máximo de iteraciones alcanzado",
            )

        direction = problem.newton_step(evaluation)
        if not np.all(np.isfinite(direction)):
            return _StageOutcome(
                interior,
                False,
                iterations,
                history,
                evaluation.min_eigenvalue,
                message="sistema lineal singular",
            )

        step = 1.0
        accepted: Optional[Tuple[np.ndarray, _Evaluation]] = None
        positive_seen = False
        last_failure: Optional[_Evaluation] = None
        while step >= options.min_step:
            trial = interior + step * direction
            trial_eval = problem.evaluate(trial)
            if trial_eval.residual is None:
                last_failure = trial_eval
            else:
                positive_seen = True
                if trial_eval.sup_residual < history[-1]:
                    accepted = (trial, trial_eval)
                    break
            step *= options.shrink
        iterations += 1

        if accepted is None:
            if not positive_seen and last_failure is not None:
                node, value = problem.first_failure(last_failure)
                logger.warning("Pérdida de positividad con paso mínimo en %s", node)
                raise PositivityBreakdownError(node, value)
            logger.warning("Newton estancado con residuo %.3e", history[-1])
            return _StageOutcome(
                interior,
                False,
                iterations,
                history,
                evaluation.min_eigenvalue,
                message="estancamiento de la búsqueda lineal",
            )

        interior, evaluation = accepted
        history.append(evaluation.sup_residual)
        logger.debug(
            "Newton it=%d paso=%.3g residuo=%.3e lambda_min=%.3e",
            iterations,
            step,
            history[-1],
            evaluation.min_eigenvalue,
        )


def _initial_state(
    domain: GridDomain,
    f: ScalarField,
    options: SolveOptions,
    initial: Optional[ScalarField],
) -> Tuple[np.ndarray, np.ndarray]:
    """Valores interiores iniciales y valores de malla de los que parte la continuación."""
    if options.initializer is Initializer.SUPPLIED or initial is not None:
        if initial is None:
            raise DomainError("El inicializador 'supplied' necesita un campo inicial")
        return initial.interior_values().copy(), np.nan_to_num(initial.values)
    if options.initializer is Initializer.ZERO:
        return np.zeros(domain.num_interior), np.zeros(domain.grid_shape)
    barrier = build_barrier(domain, f.sup())
    return barrier.interior_values().copy(), np.nan_to_num(barrier.values)


def solve_dirichlet(
    domain: GridDomain,
    f: ScalarField,
    options: Optional[SolveOptions] = None,
    initial: Optional[ScalarField] = None,
) -> Tuple[ScalarField, SolveReport]:
    """Resuelve det(u_{jk̄}) = f en el interior con u = 0 en la frontera.

    En la bola la banda se extiende desde el interior (``band_anchors``);
    en la caja vale cero. Si los valores de banda del iterado inicial no
    siguen esa regla, la diferencia se deforma de forma continua hasta cero.
    """
    if domain.is_periodic:
        raise DomainError("solve_dirichlet requiere un dominio con frontera")
    options = options or SolveOptions()
    started = time.perf_counter()
    log_f = np.log(_positive_interior(domain, f))
    problem = _DirichletProblem(domain, log_f, options)

    interior, start = _initial_state(domain, f, options, initial)
    band = domain.band_mask.reshape(-1)
    start_offset = np.zeros(domain.size)
    start_offset[band] = (start.reshape(-1) - problem.operators.extend(interior))[band]
    scale = max(1.0, float(np.max(np.abs(start), initial=0.0)))
    needs_continuation = bool(np.any(np.abs(start_offset) > CONTINUATION_ATOL * scale))

    t_done = 0.0 if needs_continuation else None
    total_iterations = 0
    continuation_steps = 0
    step = 1.0
    outcome: Optional[_StageOutcome] = None
    if needs_continuation:
        problem.set_offset(start_offset)
        outcome = _damped_newton(problem, interior, options)
        total_iterations += outcome.iterations
        interior = outcome.interior
        if not outcome.converged:
            return _finish(domain, problem, outcome, total_iterations, 0, started)

    while t_done is not None and t_done < 1.0:
        if continuation_steps >= options.max_continuation_steps:
            outcome = _StageOutcome(
                interior,
                False,
                0,
                outcome.history if outcome else [],
                message="continuación de los datos de frontera agotada",
            )
            return _finish(domain, problem, outcome, total_iterations, continuation_steps, started)
        t = min(1.0, t_done + step)
        problem.set_offset((1.0 - t) * start_offset)
        continuation_steps += 1
        try:
            trial = _damped_newton(problem, interior, options)
        except PositivityBreakdownError:
            trial = None
        if trial is None or not trial.converged:
            step *= 0.5
            logger.info("Continuación: paso reducido a %.3g en t=%.3g", step, t_done)
            if trial is not None:
                total_iterations += trial.iterations
            continue
        total_iterations += trial.iterations
        interior, outcome, t_done = trial.interior, trial, t
        step = min(1.0 - t_done, 2.0 * step) if t_done < 1.0 else step

    if not needs_continuation:
        outcome = _damped_newton(problem, interior, options)
        total_iterations += outcome.iterations

    assert outcome is not None
    return _finish(domain, problem, outcome, total_iterations, continuation_steps, started)


def _finish(
    domain: GridDomain,
    problem: _DirichletProblem,
    outcome: _StageOutcome,
    iterations: int,
    continuation_steps: int,
    started: float,
) -> Tuple[ScalarField, SolveReport]:
    full = problem.full(outcome.interior).reshape(domain.grid_shape)
    solution = ScalarField.from_interior(domain, outcome.interior, full, "u")
    report = SolveReport(
        converged=outcome.converged,
        iterations=iterations,
        residual_history=tuple(outcome.history),
        final_residual=outcome.history[-1] if outcome.history else float("nan"),
        node_count=domain.num_interior,
        min_eigenvalue=outcome.min_eigenvalue,
        continuation_steps=continuation_steps,
        wall_time=time.perf_counter() - started,
        message=outcome.message,
    )
    log = logger.info if outcome.converged else logger.warning
    log(
        "Solve de Dirichlet %s: %d iteraciones, residuo %.3e",
        "convergido" if outcome.converged else "sin convergencia",
        iterations,
        report.final_residual,
    )
    return solution, report


# ----------------------------------------------------------------------
# Toro plano
# ----------------------------------------------------------------------
class _TorusProblem:
    """log det(I + φ_{jk̄}) - log f - c con la restricción media(φ) = 0."""

    def __init__(self, domain: GridDomain, log_f: np.ndarray, options: SolveOptions) -> None:
        self.domain = domain
        self.operators = operators_for(domain)
        self.log_f = log_f
        self.options = options
        self.eye = np.eye(domain.m)

    def evaluate(self, state: np.ndarray) -> _Evaluation:
        phi, c = state[:-1], state[-1]
        hessian = self.operators.complex_hessian(phi) + self.eye
        smallest = min_eigenvalue_array(hessian)
        evaluation = _Evaluation(hessian, smallest)
        if np.all(smallest >= self.options.positivity_floor):
            node_residual = np.log(det_array(hessian)) - self.log_f - c
            evaluation.residual = np.append(node_residual, np.mean(phi))
        return evaluation

    def newton_step(self, evaluation: _Evaluation) -> np.ndarray:
        size = self.domain.size
        inverse = inverse_array(evaluation.hessian, det_array(evaluation.hessian))
        block = self.operators.linearization(inverse)
        column = sparse.csr_matrix(-np.ones((size, 1)))
        row = sparse.csr_matrix(np.full((1, size), 1.0 / size))
        jacobian = sparse.bmat([[block, column], [row, None]], format="csc")
        return spsolve(jacobian, -evaluation.residual)

    def first_failure(self, evaluation: _Evaluation) -> Tuple[Tuple[int, ...], float]:
        position = int(np.argmin(evaluation.min_eigenvalues))
        return self.domain.node_of(position), float(evaluation.min_eigenvalues[position])


def solve_torus(
    domain: GridDomain,
    f: ScalarField,
    options: Optional[SolveOptions] = None,
) -> Tuple[ScalarField, float, SolveReport]:
    """Resuelve det(I + φ_{jk̄}) = e^c f en el toro con media(φ) = 0.

    Devuelve (φ, c, reporte); el reporte incluye la constante de
    normalización y el defecto de compatibilidad media(det(I + φ)) - 1.
    """
    if not domain.is_periodic:
        raise DomainError("solve_torus requiere un dominio periódico")
    options = options or SolveOptions()
    started = time.perf_counter()
    log_f = np.log(_positive_interior(domain, f))
    problem = _TorusProblem(domain, log_f, options)

    state = np.zeros(domain.size + 1)
    outcome = _damped_newton(problem, state, options)
    phi_values = outcome.interior[:-1].reshape(domain.grid_shape)
    c = float(outcome.interior[-1])
    phi = ScalarField(domain, phi_values, "phi")

    hessian = problem.operators.complex_hessian(outcome.interior[:-1]) + problem.eye
    defect = float(np.mean(det_array(hessian)) - 1.0)
    report = SolveReport(
        converged=outcome.converged,
        iterations=outcome.iterations,
        residual_history=tuple(outcome.history),
        final_residual=outcome.history[-1],
        node_count=domain.size,
        min_eigenvalue=outcome.min_eigenvalue,
        normalization=c,
        compatibility_defect=defect,
        wall_time=time.perf_counter() - started,
        message=outcome.message,
    )
    logger.info(
        "Solve en el toro: %d iteraciones, c=%.6g, defecto de compatibilidad %.3e",
        outcome.iterations,
        c,
        defect,
    )
    return phi, c, report

