from pathlib import Path

from monge_lab.constants import DEFAULT_SEED
from monge_lab.settings import (
    ENV_LOG_LEVEL,
    ENV_MAX_WORKERS,
    ENV_OUT_DIR,
    ENV_SEED,
    load_settings,
)


def test_defaults_without_environment() -> None:
    settings = load_settings({})

    assert settings.seed == DEFAULT_SEED
    assert settings.log_level == "INFO"
    assert settings.max_workers == 1
    assert settings.output_root.name == "runs"
    assert settings.output_root.is_absolute()


def test_environment_overrides(tmp_path: Path) -> None:
    settings = load_settings(
        {
            ENV_OUT_DIR: str(tmp_path / "out"),
            ENV_SEED: " 7 ",
            ENV_LOG_LEVEL: "debug",
            ENV_MAX_WORKERS: "4",
        }
    )

    assert settings.output_root == (tmp_path / "out").resolve()
    assert settings.seed == 7
    assert settings.log_level == "DEBUG"
    assert settings.max_workers == 4
    assert settings.to_payload()["max_workers"] == 4


def test_invalid_values_fall_back() -> None:
    settings = load_settings({ENV_SEED: "abc", ENV_LOG_LEVEL: "loud", ENV_MAX_WORKERS: "-2"})

    assert settings.seed == DEFAULT_SEED
    assert settings.log_level == "INFO"
    assert settings.max_workers == 1


def test_with_updates_keeps_unspecified_values(tmp_path: Path) -> None:
    base = load_settings({ENV_SEED: "3"})
    updated = base.with_updates(log_level="warning", max_workers=0, output_root=tmp_path)

    assert updated.seed == 3
    assert updated.log_level == "WARNING"
    assert updated.max_workers == 1
    assert updated.output_root == tmp_path.resolve()
    assert base.with_updates(log_level=None) == base
