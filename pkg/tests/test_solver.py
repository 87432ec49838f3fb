import numpy as np
import pytest

from monge_lab.errors import DomainError, InvalidDensityError, PositivityBreakdownError
from monge_lab.grid import GridDomain, ScalarField
from monge_lab.rhs import RegularizationSchedule
from monge_lab.solver import (
    Initializer,
    SolveOptions,
    build_barrier,
    degenerate_pipeline,
    fourier_torus_m1,
    harmonic_majorant,
    picard_torus,
    poisson_dirichlet,
    radial_oracle,
    sandwich_check,
    solve_dirichlet,
    solve_torus,
)
from monge_lab.solver.pipeline import radial_error


def exact_error(u: ScalarField) -> float:
    domain = u.domain
    exact = domain.squared_radius - domain.extent**2
    return float(np.max(np.abs(u.interior_values() - exact.reshape(-1)[domain.interior_index])))


def test_unit_density_m1_matches_quadratic() -> None:
    domain = GridDomain.ball(1, 65)
    u, report = solve_dirichlet(domain, ScalarField.constant(domain, 1.0))

    assert report.converged
    assert report.final_residual <= 1e-10
    # la extensión de banda reproduce |z|² - 1: la barrera arranca sin continuación
    assert report.continuation_steps == 0
    assert exact_error(u) <= 5e-3


def test_unit_density_m2_matches_quadratic() -> None:
    domain = GridDomain.ball(2, 9)
    u, report = solve_dirichlet(domain, ScalarField.constant(domain, 1.0))

    assert report.converged
    assert report.min_eigenvalue > 0
    assert report.continuation_steps == 0
    assert exact_error(u) <= 5e-3


def test_box_barrier_needs_boundary_continuation() -> None:
    domain = GridDomain.box(1, 17)
    _, report = solve_dirichlet(domain, ScalarField.constant(domain, 1.0))

    assert report.converged
    assert report.continuation_steps >= 1


def test_m1_radial_density_matches_oracle() -> None:
    domain = GridDomain.ball(1, 33)
    f = ScalarField.from_function(domain, lambda *_: 1.0 + domain.squared_radius)
    u, report = solve_dirichlet(domain, f)
    exact = radial_oracle(lambda s: 1.0 + s, 1).on_domain(domain)

    assert report.converged
    assert radial_error(u, exact.values) < 1e-2


@pytest.mark.slow
def test_m2_radial_density_matches_oracle() -> None:
    domain = GridDomain.ball(2, 17)
    f = ScalarField.from_function(domain, lambda *_: domain.squared_radius + 0.25)
    u, report = solve_dirichlet(domain, f)
    exact = radial_oracle(lambda s: s + 0.25, 2).on_domain(domain)

    assert report.converged
    assert radial_error(u, exact.values) < 0.02


def test_residual_history_decreases() -> None:
    domain = GridDomain.ball(2, 9)
    f = ScalarField.from_function(domain, lambda *_: 1.0 + domain.squared_radius)
    _, report = solve_dirichlet(domain, f)

    history = report.residual_history
    assert report.converged
    assert all(later < earlier for earlier, later in zip(history, history[1:]))


def test_m1_solve_agrees_with_poisson() -> None:
    domain = GridDomain.ball(1, 25)
    densities = [
        lambda x, y: 1.0 + 0.5 * x**2,
        lambda x, y: np.exp(x - y),
        lambda x, y: 2.0 + np.sin(3.0 * x) * np.cos(2.0 * y),
    ]
    for func in densities:
        f = ScalarField.from_function(domain, func)
        u, report = solve_dirichlet(domain, f)
        reference = poisson_dirichlet(f)

        assert report.converged
        difference = np.abs(u.interior_values() - reference.interior_values())
        assert float(np.max(difference)) < 1e-8


def test_sandwich_between_barrier_and_majorant() -> None:
    # en la caja la barrera no es positiva en la banda
    domain = GridDomain.box(1, 17)
    f = ScalarField.from_function(domain, lambda x, y: 1.0 + x**2)
    u, _ = solve_dirichlet(domain, f)
    barrier = build_barrier(domain, f.sup())
    majorant = harmonic_majorant(domain)

    assert np.allclose(majorant.interior_values(), 0.0)
    report = sandwich_check(u, barrier, majorant)
    assert report.ok
    assert report.lower_violation == 0.0
    assert report.boundary_slope <= report.boundary_slope_bound + 1e-6


def test_ball_solution_lies_between_barrier_and_zero() -> None:
    domain = GridDomain.ball(1, 33)
    f = ScalarField.from_function(domain, lambda x, y: 1.0 + x**2)
    u, _ = solve_dirichlet(domain, f)
    barrier = build_barrier(domain, f.sup())

    report = sandwich_check(u, barrier)
    assert report.ok
    assert report.lower_violation == 0.0
    assert report.upper_violation == 0.0
    assert np.all(u.interior_values() <= 0.0)
    assert np.all(u.interior_values() >= barrier.interior_values())


def test_warm_start_from_solution_needs_no_iterations() -> None:
    domain = GridDomain.ball(1, 17)
    f = ScalarField.constant(domain, 1.0)
    u, _ = solve_dirichlet(domain, f)

    again, report = solve_dirichlet(
        domain, f, SolveOptions(initializer=Initializer.SUPPLIED), initial=u
    )
    assert report.converged
    assert report.iterations == 0
    assert np.array_equal(again.interior_values(), u.interior_values())


def test_zero_initializer_breaks_positivity() -> None:
    domain = GridDomain.ball(1, 17)
    with pytest.raises(PositivityBreakdownError) as info:
        solve_dirichlet(
            domain, ScalarField.constant(domain, 1.0), SolveOptions(initializer=Initializer.ZERO)
        )
    assert info.value.eigenvalue <= 0.0


def test_solvers_reject_bad_input() -> None:
    ball = GridDomain.ball(1, 17)
    values = np.where(ball.exterior_mask, np.nan, 1.0)
    values[8, 8] = 0.0
    with pytest.raises(InvalidDensityError):
        solve_dirichlet(ball, ScalarField(ball, values))
    with pytest.raises(DomainError):
        solve_torus(ball, ScalarField.constant(ball, 1.0))
    torus = GridDomain.torus(1, 16)
    with pytest.raises(DomainError):
        solve_dirichlet(torus, ScalarField.constant(torus, 1.0))
    with pytest.raises(DomainError):
        SolveOptions(shrink=1.5)


def test_torus_m1_matches_fourier_oracle() -> None:
    domain = GridDomain.torus(1, 16)
    f = ScalarField.from_function(domain, lambda x, y: 1.0 + 0.5 * np.sin(2.0 * np.pi * x))
    phi, c, report = solve_torus(domain, f)
    reference, c_ref = fourier_torus_m1(f)

    assert report.converged
    assert c == pytest.approx(c_ref, abs=1e-9)
    assert report.normalization == pytest.approx(c)
    assert abs(report.compatibility_defect) < 1e-10
    assert float(np.max(np.abs(phi.values - reference.values))) < 1e-8
    assert abs(float(np.mean(phi.values))) < 1e-10


def test_torus_m2_matches_picard_oracle() -> None:
    domain = GridDomain.torus(2, 8)
    f = ScalarField.from_function(
        domain,
        lambda x1, y1, x2, y2: 1.0 + 0.2 * np.sin(2.0 * np.pi * x1) * np.cos(2.0 * np.pi * y2),
    )
    phi, c, report = solve_torus(domain, f)
    reference, c_ref, iterations = picard_torus(f)

    assert report.converged
    assert iterations < 200
    assert c == pytest.approx(c_ref, abs=1e-8)
    assert float(np.max(np.abs(phi.values - reference.values))) < 1e-7


def test_radial_profiles_have_closed_forms() -> None:
    linear_m1 = radial_oracle(lambda s: s, 1)
    assert linear_m1.value(0.5) == pytest.approx((0.25 - 1.0) / 4.0, abs=1e-12)

    linear_m2 = radial_oracle(lambda s: s, 2)
    expected = -np.sqrt(2.0 / 3.0) * (2.0 / 3.0)
    assert linear_m2.value(0.0) == pytest.approx(expected, abs=1e-10)

    unit = radial_oracle(lambda s: 1.0, 2)
    assert unit(np.array([0.25, 1.0])) == pytest.approx([-0.75, 0.0], abs=1e-12)
    with pytest.raises(DomainError):
        unit.on_domain(GridDomain.ball(1, 9))
    with pytest.raises(DomainError):
        radial_oracle(lambda s: -1.0, 1)


def test_radial_error_of_identical_fields_is_zero() -> None:
    domain = GridDomain.ball(1, 17)
    field = radial_oracle(lambda s: 1.0 + s, 1).on_domain(domain)
    assert radial_error(field, np.array(field.values)) == 0.0


def test_degenerate_pipeline_m1() -> None:
    domain = GridDomain.ball(1, 17)
    f = ScalarField.from_function(domain, lambda x, y: np.maximum(x, 0.0) ** 2)
    schedule = RegularizationSchedule((1e-1, 1e-2), (2.0 * domain.h, domain.h))
    result = degenerate_pipeline(domain, f, schedule)

    assert result.completed
    assert result.failure is None
    assert len(result.stages) == 4
    assert all(stage.solve.converged for stage in result.stages)
    assert all(stage.lifted.inf_f > 0 for stage in result.stages)
    running = [stage.running_max_lap for stage in result.stages]
    assert running == sorted(running)
    assert np.isfinite(result.tail_variation())


def test_pipeline_rejects_torus_and_negative_density() -> None:
    torus = GridDomain.torus(1, 16)
    with pytest.raises(DomainError):
        degenerate_pipeline(torus, ScalarField.constant(torus, 1.0))
    ball = GridDomain.ball(1, 17)
    with pytest.raises(InvalidDensityError):
        degenerate_pipeline(ball, ScalarField.constant(ball, -1.0))


def test_degenerate_pipeline_of_zero_density_collapses() -> None:
    domain = GridDomain.ball(2, 9)
    schedule = RegularizationSchedule((1e-1, 1e-2, 1e-3), (domain.h,))
    result = degenerate_pipeline(domain, ScalarField.constant(domain, 0.0), schedule)

    assert result.completed
    assert all(stage.solve.converged for stage in result.stages)
    assert result.conditions.sup_f == 0.0
    # h = ε en cada etapa: u = ε^{1/2} (|z|² - 1)
    assert result.solution is not None
    assert result.solution.max_abs() <= np.sqrt(1e-3) + 1e-6
    sizes = [stage.c1_norm for stage in result.stages]
    assert sizes == sorted(sizes, reverse=True)


@pytest.mark.slow
@pytest.mark.parametrize("power", [1, 2])
def test_degenerate_pipeline_m2_matches_radial_oracle(power: int) -> None:
    domain = GridDomain.ball(2, 17)
    f = ScalarField.from_function(domain, lambda *_: domain.squared_radius**power)
    schedule = RegularizationSchedule((1e-1, 1e-2, 1e-3), (domain.h,))
    result = degenerate_pipeline(domain, f, schedule, with_estimates=False)
    exact = radial_oracle(lambda s: s**power, 2).on_domain(domain)

    assert result.completed
    assert result.tail_variation() <= 0.1
    assert result.solution is not None
    assert radial_error(result.solution, exact.values) < 0.03
