import json
from pathlib import Path

import numpy as np
import pytest

from monge_lab.errors import InstanceError
from monge_lab.expression import compile_expression, variable_names
from monge_lab.grid import GridDomain, ScalarField, save_snapshot
from monge_lab.instance import (
    DensitySpec,
    DomainSpec,
    ScheduleSpec,
    build_density,
    build_domain,
    load_instance,
)


def write_instance(tmp_path: Path, payload: dict, name: str = "instance.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def base_payload(**changes) -> dict:
    payload = {
        "name": "unit",
        "domain": {"shape": "ball", "m": 1, "n": 9},
        "density": {"expression": "1 + s"},
    }
    payload.update(changes)
    return payload


def test_variable_names() -> None:
    assert variable_names(2) == ("x1", "y1", "x2", "y2", "s", "r")


def test_expression_evaluates_on_coordinates() -> None:
    expression = compile_expression("1 + x1**2 - y1 + pos(-x1) + s", 1)
    x = np.array([0.5, -1.0])
    y = np.array([2.0, 0.0])

    values = expression(x, y)
    expected = 1 + x**2 - y + np.maximum(-x, 0.0) + (x**2 + y**2)
    assert np.allclose(values, expected)


def test_expression_uses_center_for_radius() -> None:
    expression = compile_expression("s", 1)
    values = expression(np.array([1.0]), np.array([1.0]), center=(1.0, 0.0))
    assert values[0] == pytest.approx(1.0)


def test_constant_expression_broadcasts() -> None:
    values = compile_expression("2 * pi", 2)(*(np.zeros((3, 3)),) * 4)
    assert values.shape == (3, 3)
    assert np.allclose(values, 2 * np.pi)


def test_radial_evaluation() -> None:
    assert compile_expression("1 + s", 2).radial(0.25) == pytest.approx(1.25)
    assert compile_expression("r", 1).radial(0.25) == pytest.approx(0.5)
    centered = compile_expression("s * exp(-s)", 1)
    assert centered.radial(0.25, center=(0.3, -0.2)) == pytest.approx(0.25 * np.exp(-0.25))


def test_radial_detection() -> None:
    assert compile_expression("1 + s**2 * pi", 2).is_radial
    assert compile_expression("exp(-r)", 1).is_radial
    assert not compile_expression("s + x1", 1).is_radial
    assert not compile_expression("pos(y2)", 2).is_radial


@pytest.mark.parametrize(
    "source",
    [
        "",
        "   ",
        "x1.real",
        "zz + 1",
        "x2 + 1",
        "x1 // 2",
        "x1 < 2",
        "__import__('os')",
        "sin(x1, y1)",
        "'a'",
        "True",
        "lambda: 1",
        "1 +",
        "1+" * 300 + "1",
    ],
)
def test_expression_rejections(source: str) -> None:
    with pytest.raises(InstanceError):
        compile_expression(source, 1)


def test_instance_hash_is_stable_under_key_order(tmp_path: Path) -> None:
    payload = base_payload()
    reordered = {key: payload[key] for key in reversed(list(payload))}
    reordered["domain"] = {"n": 9, "m": 1, "shape": "ball"}

    first = load_instance(write_instance(tmp_path, payload, "a.json"))
    second = load_instance(write_instance(tmp_path, reordered, "b.json"))
    assert first.instance_hash() == second.instance_hash()
    assert len(first.instance_hash()) == 64


def test_instance_defaults(tmp_path: Path) -> None:
    spec = load_instance(write_instance(tmp_path, base_payload()))

    assert spec.schema_version == 1
    assert spec.schedule is None
    assert spec.solve.build().initializer.value == "barrier"
    assert spec.verifier.trials == 100_000


@pytest.mark.parametrize(
    "payload",
    [
        base_payload(extra=1),
        base_payload(density={"expression": "1", "field_path": "f.csv"}),
        base_payload(density={}),
        base_payload(domain={"shape": "ball", "m": 3, "n": 9}),
        base_payload(domain={"shape": "sphere", "m": 1, "n": 9}),
        base_payload(domain={"shape": "ball", "m": 1, "n": 9, "center": [0.0]}),
        base_payload(
            schedule={
                "epsilons": [0.1],
                "epsilon_decay": {"start": 0.1, "factor": 0.5, "count": 2},
                "rhos": [1.0],
            }
        ),
        base_payload(schedule={"epsilons": [0.1]}),
        base_payload(solve={"shrink": 1.5}),
    ],
)
def test_invalid_instances_are_rejected(tmp_path: Path, payload: dict) -> None:
    with pytest.raises(InstanceError):
        load_instance(write_instance(tmp_path, payload))


def test_unreadable_instances(tmp_path: Path) -> None:
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(InstanceError):
        load_instance(broken)
    with pytest.raises(InstanceError):
        load_instance(tmp_path / "missing.json")


def test_schedule_rho_is_in_grid_units() -> None:
    spec = ScheduleSpec(
        epsilon_decay={"start": 0.1, "factor": 0.1, "count": 2},
        rhos=[2.0, 1.0],
    )
    schedule = spec.build(0.25)

    assert schedule.epsilons == pytest.approx((0.1, 0.01))
    assert schedule.rhos == pytest.approx((0.5, 0.25))


def test_density_from_expression() -> None:
    domain = GridDomain.ball(1, 9, center=(0.5, 0.0))
    f = build_density(DensitySpec(expression="1 + s"), domain)

    known = ~domain.exterior_mask
    assert np.allclose(f.values[known], 1.0 + domain.squared_radius[known])
    with pytest.raises(InstanceError):
        build_density(DensitySpec(expression="log(x1)"), GridDomain.ball(1, 9))


def test_density_from_relative_snapshot(tmp_path: Path) -> None:
    domain = GridDomain.box(1, 9)
    field = ScalarField.from_function(domain, lambda x, y: 1.0 + x * x, "f")
    save_snapshot(field, tmp_path / "fields" / "f.csv")

    loaded = build_density(DensitySpec(field_path="fields/f.csv"), domain, base_dir=tmp_path)
    assert np.allclose(loaded.values, field.values)

    with pytest.raises(InstanceError):
        build_density(DensitySpec(field_path="fields/f.csv"), GridDomain.box(1, 11), tmp_path)
    with pytest.raises(InstanceError):
        build_density(DensitySpec(field_path="missing.csv"), domain, tmp_path)


def test_build_domain_from_spec() -> None:
    spec = DomainSpec(shape="box", m=1, n=9, half_width=2.0)
    assert build_domain(spec).h == pytest.approx(0.5)
