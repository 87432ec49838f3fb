import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from monge_lab.cli import app
from monge_lab.constants import (
    AUDIT_FILENAME,
    CONDITIONS_FILENAME,
    COUNTEREXAMPLES_FILENAME,
    CURVATURE_FILENAME,
    ESTIMATES_FILENAME,
    LEMMAS_FILENAME,
    MANIFEST_FILENAME,
    PROFILE_FILENAME,
    REPORTS_FILENAME,
    SOLUTION_FILENAME,
    STAGES_FILENAME,
)
from monge_lab.reports import RunStore, report_to_dict, to_json_line
from monge_lab.reports.report_schema import SolveReport, solve_report_from_dict

runner = CliRunner()


def write_instance(tmp_path: Path, expression: str = "1", **extra) -> Path:
    payload = {
        "name": "cli",
        "domain": {"shape": "ball", "m": 1, "n": 17},
        "density": {"expression": expression},
    }
    payload.update(extra)
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def solve_report(**changes) -> SolveReport:
    values = dict(
        converged=True,
        iterations=3,
        residual_history=(1.0, 1e-4, 1e-11),
        final_residual=1e-11,
        node_count=10,
        min_eigenvalue=0.5,
        wall_time=0.25,
    )
    values.update(changes)
    return SolveReport(**values)


def test_json_line_omits_wall_time() -> None:
    line = to_json_line(solve_report())
    payload = json.loads(line)

    assert "wall_time" not in payload
    assert list(payload) == sorted(payload)
    assert report_to_dict(solve_report())["wall_time"] == 0.25
    assert to_json_line(solve_report(wall_time=9.0)) == line


def test_solve_report_from_dict_restores_fields() -> None:
    restored = solve_report_from_dict(json.loads(to_json_line(solve_report())))

    assert restored.converged
    assert restored.residual_history == (1.0, 1e-4, 1e-11)
    assert restored.wall_time == 0.0
    assert restored.normalization is None


def test_run_store_lifecycle(tmp_path: Path) -> None:
    store = RunStore(tmp_path / "run")
    store.begin()
    store.write_json("a.json", {"x": 1})
    store.write_csv("b.csv", ("k", "v"), [("flag", True), ("value", 0.5), ("none", None)])
    manifest = store.finish("unit", "ok", 0)

    assert manifest.artifacts == ["a.json", "b.csv"]
    assert store.verify_manifest().consistent
    rows = store.read_csv("b.csv")
    assert rows == [
        {"k": "flag", "v": "true"},
        {"k": "value", "v": "0.5"},
        {"k": "none", "v": ""},
    ]

    (store.root / "stray.txt").write_text("x", encoding="utf-8")
    check = store.verify_manifest()
    assert check.orphans == ["stray.txt"]
    assert not check.consistent

    (store.root / "a.json").unlink()
    assert store.verify_manifest().missing == ["a.json"]


def test_run_store_begin_removes_previous_artifacts(tmp_path: Path) -> None:
    store = RunStore(tmp_path)
    store.begin()
    store.write_json("old.json", {})
    store.finish("unit", "ok", 0)
    (tmp_path / "keep.txt").write_text("x", encoding="utf-8")

    again = RunStore(tmp_path)
    again.begin()
    assert not (tmp_path / "old.json").exists()
    assert not (tmp_path / MANIFEST_FILENAME).exists()
    assert (tmp_path / "keep.txt").exists()


def test_cli_conditions(tmp_path: Path) -> None:
    out = tmp_path / "out"
    instance = write_instance(tmp_path, "1 + s")
    result = runner.invoke(app, ["conditions", "--instance", str(instance), "--out", str(out)])

    assert result.exit_code == 0, result.output
    payload = json.loads((out / CONDITIONS_FILENAME).read_text(encoding="utf-8"))
    assert payload["m"] == 1
    assert payload["positive"] is True


def test_cli_solve_then_report(tmp_path: Path) -> None:
    out = tmp_path / "out"
    instance = write_instance(tmp_path)
    result = runner.invoke(app, ["solve", "-i", str(instance), "-o", str(out)])

    assert result.exit_code == 0, result.output
    for name in (CONDITIONS_FILENAME, REPORTS_FILENAME, SOLUTION_FILENAME, AUDIT_FILENAME):
        assert (out / name).is_file()
    manifest = json.loads((out / MANIFEST_FILENAME).read_text(encoding="utf-8"))
    assert manifest["status"] == "ok"
    assert manifest["exit_code"] == 0
    assert len(manifest["instance_hash"]) == 64

    shown = runner.invoke(app, ["report", "--out", str(out)])
    assert shown.exit_code == 0, shown.output
    assert "Solves: 1/1" in shown.output

    (out / "extra.csv").write_text("x\n", encoding="utf-8")
    assert runner.invoke(app, ["report", "--out", str(out)]).exit_code == 1


def test_cli_solve_pipeline_writes_stages(tmp_path: Path) -> None:
    out = tmp_path / "out"
    schedule = {"epsilons": [0.1, 0.01], "rhos": [1.0]}
    instance = write_instance(tmp_path, "pos(x1)**2", schedule=schedule)
    result = runner.invoke(app, ["solve", "-i", str(instance), "-o", str(out)])

    assert result.exit_code == 0, result.output
    stages = RunStore(out).read_csv(STAGES_FILENAME)
    assert [row["epsilon"] for row in stages] == ["0.1", "0.01"]
    assert len((out / REPORTS_FILENAME).read_text(encoding="utf-8").splitlines()) == 2
    profile = RunStore(out).read_csv(PROFILE_FILENAME)
    assert {row["stage"] for row in profile} == {"0", "1"}


def test_cli_single_solve_writes_profile_and_audit(tmp_path: Path) -> None:
    out = tmp_path / "out"
    instance = write_instance(tmp_path, "1", verifier={"estimates": True})
    result = runner.invoke(app, ["solve", "-i", str(instance), "-o", str(out)])

    assert result.exit_code == 0, result.output
    store = RunStore(out)
    stages = store.read_csv(STAGES_FILENAME)
    assert len(stages) == 1
    assert stages[0]["index"] == "0"
    assert stages[0]["converged"] == "true"
    profile = store.read_csv(PROFILE_FILENAME)
    assert profile
    assert {row["stage"] for row in profile} == {"0"}
    assert [row["iteration"] for row in profile] == [str(k) for k in range(len(profile))]

    audit = json.loads((out / AUDIT_FILENAME).read_text(encoding="utf-8"))
    assert audit["domain"]["shape"] == "ball"
    assert audit["domain"]["h"] == pytest.approx(0.125)
    # f = 1 en la bola unidad: u = |z|² - 1 es exacta en la malla
    assert audit["radial_error"] < 1e-6
    estimates = store.read_jsonl(ESTIMATES_FILENAME)
    assert estimates and estimates[0]["c1"] == pytest.approx(audit["audit"]["c1"])


def test_cli_non_radial_density_has_no_oracle_error(tmp_path: Path) -> None:
    out = tmp_path / "out"
    instance = write_instance(tmp_path, "1 + 0.5 * x1**2")
    assert runner.invoke(app, ["solve", "-i", str(instance), "-o", str(out)]).exit_code == 0

    audit = json.loads((out / AUDIT_FILENAME).read_text(encoding="utf-8"))
    assert audit["radial_error"] is None


def test_cli_reports_are_reproducible(tmp_path: Path) -> None:
    instance = write_instance(tmp_path, "1 + 0.5 * x1**2")
    outputs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert runner.invoke(app, ["solve", "-i", str(instance), "-o", str(out)]).exit_code == 0
        outputs.append((out / REPORTS_FILENAME).read_bytes())
    assert outputs[0] == outputs[1]


@pytest.mark.parametrize(
    ("contents", "code"),
    [("-1", 4), ("x1 +", 2)],
)
def test_cli_solve_failures(tmp_path: Path, contents: str, code: int) -> None:
    instance = write_instance(tmp_path, contents)
    result = runner.invoke(app, ["solve", "-i", str(instance), "-o", str(tmp_path / "out")])
    assert result.exit_code == code


def test_cli_rejects_malformed_instance(tmp_path: Path) -> None:
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    result = runner.invoke(app, ["solve", "-i", str(path)])
    assert result.exit_code == 2


def test_cli_lemmas(tmp_path: Path) -> None:
    out = tmp_path / "lemmas"
    result = runner.invoke(app, ["lemmas", "--trials", "50", "--seed", "1", "--out", str(out)])

    assert result.exit_code == 0, result.output
    assert (out / LEMMAS_FILENAME).is_file()
    assert not (out / COUNTEREXAMPLES_FILENAME).exists()


def test_cli_lemmas_with_injected_fault(tmp_path: Path) -> None:
    out = tmp_path / "lemmas"
    result = runner.invoke(app, ["lemmas", "--trials", "50", "--out", str(out), "--inject-fault"])

    assert result.exit_code == 5
    counterexamples = json.loads((out / COUNTEREXAMPLES_FILENAME).read_text(encoding="utf-8"))
    assert "case_split" in counterexamples


def test_cli_curvature(tmp_path: Path) -> None:
    flat = runner.invoke(
        app,
        ["curvature", "-m", "flat", "--samples", "3", "--frames", "5", "-o", str(tmp_path / "a")],
    )
    assert flat.exit_code == 0, flat.output
    assert len(RunStore(tmp_path / "a").read_csv(CURVATURE_FILENAME)) == 3

    negative = runner.invoke(
        app,
        ["curvature", "-m", "poincare-disk", "--samples", "3", "-o", str(tmp_path / "b")],
    )
    assert negative.exit_code == 0
    assert "violates-OBC" in negative.output

    unknown = runner.invoke(app, ["curvature", "-m", "sphere-7", "-o", str(tmp_path / "c")])
    assert unknown.exit_code == 2


def test_cli_rejects_unknown_log_level() -> None:
    result = runner.invoke(app, ["--log-level", "loud", "lemmas", "--trials", "1"])
    assert result.exit_code != 0
