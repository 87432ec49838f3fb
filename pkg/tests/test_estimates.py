import math
from dataclasses import replace

import numpy as np
import pytest

from monge_lab.errors import DomainError, IncompleteReportError
from monge_lab.estimates import (
    TestFunctionConfig,
    default_c0,
    estimate_for_dirichlet,
    estimate_for_torus,
    final_bound_audit,
    lemma_third_order_bound,
    norms,
    profile_H,
)
from monge_lab.estimates.audit import with_fit
from monge_lab.estimates.h_profile import AdmissibilityError, flat_metric
from monge_lab.estimates.lemmas import eqm1_slack_batch
from monge_lab.grid import GridDomain, ScalarField
from monge_lab.grid.operators import complex_hessian
from monge_lab.reports.report_schema import EstimateReport
from monge_lab.rhs import check_conditions, mollify_lift
from monge_lab.solver import solve_dirichlet, solve_torus


def estimate(trace: float, eqm1: float = 0.0) -> EstimateReport:
    return EstimateReport(
        osc=1.0,
        sup_grad=0.0,
        sup_lap=0.0,
        min_trace=trace,
        h_max_node=(1, 1, 1, 1),
        h_max_value=1.0,
        trace_at_max=trace,
        grad_eq_residual=0.0,
        eqm1_slack=eqm1,
        lam=3.0,
        c0=default_c0(2),
    )


def test_default_c0_values() -> None:
    assert default_c0(1) == 1.0
    assert default_c0(2) == 17.0
    assert default_c0(3) == 19.0
    with pytest.raises(DomainError):
        default_c0(0)


def test_config_validation_and_identity() -> None:
    cfg = TestFunctionConfig.for_oscillation(2, 1.5)
    assert cfg.lam == pytest.approx(3.5 + 1e-6)

    xs = np.linspace(2.0, cfg.lam, 17)
    assert np.allclose(cfg.identity_defect(xs), 0.0, atol=1e-15)
    assert np.allclose(cfg.alpha_prime(xs), 1.0 / (17.0 * xs))

    with pytest.raises(DomainError):
        TestFunctionConfig(2, 3.0, 5.0)
    with pytest.raises(DomainError):
        TestFunctionConfig.for_dimension(2, 2.0)


def test_norms_of_quadratic() -> None:
    domain = GridDomain.ball(1, 17)
    field = ScalarField.from_function(domain, lambda *_: domain.squared_radius)
    result = norms(field)

    assert result.sup_lap == pytest.approx(1.0)
    assert result.min_trace == pytest.approx(2.0)
    assert 0.0 < result.osc < 1.0
    assert result.sup_grad <= 2.0


def test_profile_of_constant_potential() -> None:
    domain = GridDomain.torus(1, 8)
    phi = ScalarField.constant(domain, 0.0, "phi")
    cfg = TestFunctionConfig.for_oscillation(1, 0.0)
    profile = profile_H(phi, flat_metric(phi), cfg)

    # H = 1 · e^{-log 2}; los empates se resuelven lexicográficamente
    assert profile.node == (0, 0)
    assert profile.value == pytest.approx(0.5)
    assert profile.shift == pytest.approx(2.0)
    assert profile.residual_norm == pytest.approx(0.0, abs=1e-12)
    assert profile.max_principle_ok


def test_profile_rejects_inadmissible_potential() -> None:
    domain = GridDomain.box(1, 9)
    phi = ScalarField.from_function(domain, lambda *_: -domain.squared_radius)
    cfg = TestFunctionConfig.for_oscillation(1, 2.0)

    with pytest.raises(AdmissibilityError):
        profile_H(phi, flat_metric(phi), cfg)


def test_estimate_for_m2_solution() -> None:
    domain = GridDomain.ball(2, 9)
    u, report = solve_dirichlet(domain, ScalarField.constant(domain, 1.0))
    assert report.converged

    result = estimate_for_dirichlet(u)
    assert result.c0 == 17.0
    assert result.h_max_node is not None
    assert result.trace_at_max > 0
    # con m = 2 la relación tr(A⁻¹) = tr A / det A es exacta
    assert abs(result.eqm1_slack) < 1e-8
    assert result.pos_bisec3_slack is not None and math.isfinite(result.pos_bisec3_slack)
    assert result.third_order_slack is not None and math.isfinite(result.third_order_slack)


def test_estimate_for_m1_omits_higher_dimension_slacks() -> None:
    domain = GridDomain.ball(1, 17)
    u, _ = solve_dirichlet(domain, ScalarField.constant(domain, 1.0))
    result = estimate_for_dirichlet(u)

    assert result.eqm1_slack is None
    assert result.pos_bisec3_slack is None
    assert result.third_order_slack is None
    assert result.c1 is None


def test_estimate_for_flat_torus_potential() -> None:
    domain = GridDomain.torus(2, 4)
    result = estimate_for_torus(ScalarField.constant(domain, 0.0, "phi"))

    assert result.osc == 0.0
    assert result.trace_at_max == pytest.approx(2.0)
    assert result.eqm1_slack == pytest.approx(0.0, abs=1e-12)


def test_final_bound_audit_quadratic_case() -> None:
    # x² <= C1 x + C2 con x = 2, 3, 4: recta de mínimos cuadrados de pendiente 6
    reports = [estimate(2.0), estimate(3.0), estimate(4.0, eqm1=-1e-3)]
    audit = final_bound_audit(reports, cfg=TestFunctionConfig.for_dimension(2, 3.0))

    assert audit.samples == 3
    assert audit.c1 == pytest.approx(6.0)
    assert audit.lsq_c2 == pytest.approx(-25.0 / 3.0)
    assert audit.c2 == pytest.approx(-8.0)
    assert audit.c3 == pytest.approx(4.0)
    assert audit.c3 >= audit.max_trace - 1e-12
    assert not audit.within_lsq
    assert audit.min_eqm1_slack == pytest.approx(-1e-3)
    assert audit.lipschitz_bound is None


def test_final_bound_audit_single_report_with_conditions() -> None:
    domain = GridDomain.ball(2, 9)
    cond = check_conditions(ScalarField.constant(domain, 1.0))
    audit = final_bound_audit(estimate(3.0), cond=cond)

    assert audit.c1 == pytest.approx(3.0)
    assert audit.c2 == pytest.approx(0.0)
    assert audit.c3 == pytest.approx(3.0)
    assert audit.lipschitz_bound is not None and audit.lipschitz_bound > 0

    fitted = with_fit(estimate(3.0), audit)
    assert (fitted.c1, fitted.c2, fitted.c3) == (audit.c1, audit.c2, audit.c3)


def test_final_bound_audit_requires_complete_input() -> None:
    incomplete = replace(estimate(2.0), h_max_node=None)
    cfg = TestFunctionConfig.for_dimension(2, 3.0)

    with pytest.raises(IncompleteReportError):
        final_bound_audit([], cfg=cfg)
    with pytest.raises(IncompleteReportError):
        final_bound_audit([incomplete], cfg=cfg)
    with pytest.raises(IncompleteReportError):
        final_bound_audit([estimate(2.0)])


@pytest.mark.parametrize(
    "func",
    [
        lambda x1, y1, x2, y2: x1**2 + y1**2 + x2**2 + y2**2,
        lambda x1, y1, x2, y2: 1.0 + 0.5 * np.sin(x1),
    ],
)
def test_lifted_density_keeps_its_constants(func) -> None:
    domain = GridDomain.ball(2, 9)
    f = ScalarField.from_function(domain, func, "f")
    lifted = mollify_lift(f, 1e-2, 2.0 * domain.h)
    original, regularized = check_conditions(f), check_conditions(lifted)

    assert regularized.A1 <= 2.0 * original.A1 + 1e-3
    assert regularized.A <= original.A + 1e-3
    assert regularized.inf_f >= 1e-2


def test_gradient_equation_residual_vanishes_at_first_order() -> None:
    # con n = 4k + 1 el máximo de H (x = 1/4) queda a h/4 del nodo más cercano
    sizes = (17, 33, 65)
    residuals = []
    for n in sizes:
        domain = GridDomain.torus(1, n)
        f = ScalarField.from_function(domain, lambda x, y: 1.0 + 0.5 * np.sin(2.0 * np.pi * x))
        phi, _, report = solve_torus(domain, f)
        assert report.converged
        residuals.append(estimate_for_torus(phi).grad_eq_residual)

    assert all(later < earlier for earlier, later in zip(residuals, residuals[1:]))
    slope = np.polyfit(np.log([1.0 / n for n in sizes]), np.log(residuals), 1)[0]
    assert slope >= 0.8


def test_solved_fields_satisfy_inverse_trace_inequality() -> None:
    domain = GridDomain.ball(2, 9)
    f = ScalarField.from_function(
        domain, lambda x1, y1, x2, y2: 1.0 + 0.5 * np.sin(x1) * np.cos(y2), "f"
    )
    u, report = solve_dirichlet(domain, f)
    assert report.converged

    matrices = complex_hessian(u).matrices
    inverse_trace = np.real(np.trace(np.linalg.inv(matrices), axis1=-2, axis2=-1))
    trace = np.real(np.trace(matrices, axis1=-2, axis2=-1))
    bound = trace / f.interior_values()
    assert np.all(inverse_trace >= bound - 1e-8 * np.maximum(1.0, bound))
    assert float(np.min(eqm1_slack_batch(matrices))) >= -1e-8


def third_order_data(cfg: TestFunctionConfig, phi_value: float):
    lam = np.array([1.0, 3.0])
    grad = np.array([0.7 + 0.2j, -0.4j])
    lap = float(lam.sum()) - 2.0
    lap_k = cfg.alpha_prime(phi_value) * grad[0] * lam.sum()
    t = np.full((2, 2), 0.3 + 0.1j)
    t[0, 0], t[1, 1] = lam / lam.sum() * lap_k
    return lam, t, grad, lap


def test_third_order_bound_on_gradient_equation_data() -> None:
    cfg = TestFunctionConfig.for_oscillation(2, 1.0)
    lam, t, grad, lap = third_order_data(cfg, 2.5)
    outcome = lemma_third_order_bound(lam, t, grad, lap, cfg, 2.5)

    assert outcome.ok
    assert outcome.slack == pytest.approx(outcome.rhs - outcome.lhs)

    off_diagonal = t - np.diag(np.diag(t))
    assert lemma_third_order_bound(lam, off_diagonal, grad, lap, cfg, 2.5).lhs <= 0.0


def test_third_order_bound_detects_violation_and_bad_input() -> None:
    cfg = TestFunctionConfig.for_oscillation(2, 1.0)
    # sin gradiente el lado derecho es nulo: |1 + 1|² - (1 + 1) = 2 > 0
    outcome = lemma_third_order_bound([1.0, 1.0], np.eye(2), [0.0, 0.0], 0.0, cfg, 2.5)
    assert not outcome.ok
    assert outcome.lhs == pytest.approx(2.0)

    with pytest.raises(DomainError):
        lemma_third_order_bound([1.0], np.eye(1), [0.0], 0.0, cfg.for_oscillation(1, 1.0), 2.5)
    with pytest.raises(DomainError):
        lemma_third_order_bound([1.0, -1.0], np.eye(2), [0.0, 0.0], 0.0, cfg, 2.5)
    with pytest.raises(DomainError):
        lemma_third_order_bound([1.0, 1.0, 1.0], np.eye(2), [0.0, 0.0], 0.0, cfg, 2.5)
