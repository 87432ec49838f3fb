import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monge_lab.errors import DomainError, InvalidDensityError, KernelUnderresolvedError
from monge_lab.grid import GridDomain, ScalarField
from monge_lab.grid.operators import complex_laplacian_array
from monge_lab.rhs import (
    RegularizationSchedule,
    check_conditions,
    equivalence_identity_residual,
    lift_exponent,
    lipschitz_m2_bound,
    mollifier_kernel,
    mollify_lift,
)
from monge_lab.rhs.mollify import mollify


def density(domain: GridDomain, func) -> ScalarField:
    return ScalarField.from_function(domain, func, "f")


def test_lift_exponent() -> None:
    assert lift_exponent(1) == 1.0
    assert lift_exponent(2) == 1.0
    assert lift_exponent(3) == 0.5
    with pytest.raises(DomainError):
        lift_exponent(0)


def test_constant_density_has_zero_constants() -> None:
    domain = GridDomain.ball(2, 9)
    report = check_conditions(ScalarField.constant(domain, 2.0))

    assert report.sup_f == pytest.approx(2.0)
    assert report.A == pytest.approx(0.0, abs=1e-12)
    assert report.A1 == pytest.approx(0.0, abs=1e-12)
    assert report.positive


def test_quadratic_density_constants() -> None:
    # f = s en m = 2: Δ f = 2 (A = 0); |∇ f^{1/2}| = |∇ r| = 1
    domain = GridDomain.ball(2, 9)
    report = check_conditions(density(domain, lambda *_: domain.squared_radius))

    assert report.A == pytest.approx(0.0, abs=1e-12)
    assert report.A1 <= 1.0 + 1e-12
    assert report.inf_f == pytest.approx(0.0)
    assert not report.positive


def test_negative_density_is_rejected_with_node() -> None:
    domain = GridDomain.box(1, 9)
    values = np.ones(domain.grid_shape)
    values[4, 5] = -0.5
    with pytest.raises(InvalidDensityError) as info:
        check_conditions(ScalarField(domain, values))
    assert info.value.node == (4, 5)


def test_schedule_validation_and_order() -> None:
    schedule = RegularizationSchedule((0.1, 0.01), (0.4, 0.2))
    assert schedule.stages() == [(0.1, 0.4), (0.1, 0.2), (0.01, 0.4), (0.01, 0.2)]

    with pytest.raises(DomainError):
        RegularizationSchedule((0.01, 0.1), (0.4,))
    with pytest.raises(DomainError):
        RegularizationSchedule((0.1,), ())
    with pytest.raises(DomainError):
        RegularizationSchedule((0.1,), (0.2,), profile="gauss")


def test_kernel_is_normalized_and_needs_resolution() -> None:
    kernel = mollifier_kernel(0.3, 0.1, 2)
    assert kernel.sum() == pytest.approx(1.0)
    assert np.allclose(kernel, kernel[::-1, ::-1])

    delta = mollifier_kernel(0.1, 0.1, 2)
    assert delta.max() == pytest.approx(1.0)

    with pytest.raises(KernelUnderresolvedError):
        mollifier_kernel(0.05, 0.1, 2)


def test_mollify_lift_lower_bound_and_constants() -> None:
    domain = GridDomain.ball(2, 9)
    f = density(domain, lambda x1, y1, x2, y2: np.maximum(x1, 0.0) ** 2)
    epsilon = 1e-2
    lifted = mollify_lift(f, epsilon, 2.0 * domain.h)

    assert lifted.inf() >= epsilon - 1e-15
    lifted_report = check_conditions(lifted)
    assert lifted_report.sup_f <= float(np.nanmax(f.values)) + epsilon + 1e-12


def test_mollify_lift_m1_of_zero_density_is_epsilon() -> None:
    domain = GridDomain.box(1, 17)
    f = ScalarField.constant(domain, 0.0)
    lifted = mollify_lift(f, 0.25, domain.h)

    assert np.allclose(lifted.interior_values(), 0.25)


@pytest.mark.parametrize(
    "func",
    [
        lambda x1, y1, x2, y2: 1.0 + 0.5 * np.sin(x1),
        lambda x1, y1, x2, y2: x1**2 + y1**2 + x2**2 + y2**2 + 1.0,
        lambda x1, y1, x2, y2: np.exp(0.3 * x2 - 0.2 * y1) * (2.0 + np.cos(y2)),
    ],
)
def test_equivalence_identity_holds_nodewise_for_m2(func) -> None:
    domain = GridDomain.box(2, 9, half_width=4.0 / 128.0)
    assert domain.h == pytest.approx(1.0 / 128.0)
    residual = equivalence_identity_residual(density(domain, func), 2)

    assert float(np.nanmax(np.abs(residual.values[domain.interior_mask]))) < 1e-6


def test_equivalence_identity_requires_positive_density() -> None:
    domain = GridDomain.box(2, 5)
    with pytest.raises(InvalidDensityError):
        equivalence_identity_residual(ScalarField.constant(domain, 0.0), 2)
    with pytest.raises(DomainError):
        equivalence_identity_residual(ScalarField.constant(domain, 1.0), 1)


def test_lipschitz_bound_solves_quadratic() -> None:
    domain = GridDomain.ball(2, 9)
    report = check_conditions(ScalarField.constant(domain, 1.0))
    alpha0 = 0.1
    bound = lipschitz_m2_bound(report, alpha0)

    # a x² - b x - c = 0 con c = 0 => x = b / a = 2 sup f
    assert bound == pytest.approx(2.0)
    with pytest.raises(DomainError):
        lipschitz_m2_bound(report, -1.0)


def test_check_conditions_rejects_mismatched_dimension() -> None:
    domain = GridDomain.ball(1, 9)
    with pytest.raises(DomainError):
        check_conditions(ScalarField.constant(domain, 1.0), m=2)
    assert check_conditions(ScalarField.constant(domain, 1.0), m=1).positive


def _smooth_periodic(domain: GridDomain, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    grids = np.meshgrid(*domain.axes, indexing="ij")
    phase = 2.0 * np.pi / domain.extent
    values = np.ones(domain.grid_shape)
    for grid in grids:
        a, b = rng.uniform(-0.4, 0.4, size=2)
        values = values + a * np.sin(phase * grid) + b * np.cos(2.0 * phase * grid)
    return values


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**16), reach=st.integers(1, 4))
def test_periodic_mollification_preserves_mass(seed: int, reach: int) -> None:
    domain = GridDomain.torus(1, 16)
    values = _smooth_periodic(domain, seed)
    kernel = mollifier_kernel(reach * domain.h, domain.h, domain.dim)
    smoothed = mollify(values, kernel, periodic=True)

    assert smoothed.shape == values.shape
    assert float(smoothed.mean()) == pytest.approx(float(values.mean()), rel=1e-12)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**16))
def test_periodic_mollification_commutes_with_laplacian(seed: int) -> None:
    domain = GridDomain.torus(1, 16)
    values = _smooth_periodic(domain, seed)
    kernel = mollifier_kernel(3.0 * domain.h, domain.h, domain.dim)

    smoothed_first = complex_laplacian_array(mollify(values, kernel, True), 1, domain.h)
    laplacian_first = mollify(complex_laplacian_array(values, 1, domain.h), kernel, True)
    scale = max(1.0, float(np.max(np.abs(laplacian_first))))
    assert np.allclose(smoothed_first, laplacian_first, rtol=0.0, atol=1e-9 * scale)


@settings(max_examples=15, deadline=None)
@given(
    m=st.sampled_from([1, 2, 3]),
    small=st.floats(1e-4, 1e-1),
    factor=st.floats(1.5, 10.0),
)
def test_mollify_lift_is_monotone_in_epsilon(m: int, small: float, factor: float) -> None:
    domain = GridDomain.ball(m, 9 if m < 3 else 5)
    f = density(domain, lambda *coords: np.maximum(coords[0], 0.0) ** 2)
    rho = 2.0 * domain.h
    lower = mollify_lift(f, small, rho)
    upper = mollify_lift(f, small * factor, rho)

    assert np.all(upper.interior_values() >= lower.interior_values())
    assert lower.inf() >= small ** max(m - 1, 1) * (1.0 - 1e-12)
