# SPDX-License-Identifier: MIT
"""
Configuración del laboratorio a partir del entorno.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional

from .constants import DEFAULT_OUTPUT_DIR, DEFAULT_SEED

ENV_OUT_DIR = "MONGE_LAB_OUT_DIR"
ENV_SEED = "MONGE_LAB_SEED"
ENV_LOG_LEVEL = "MONGE_LAB_LOG_LEVEL"
ENV_MAX_WORKERS = "MONGE_LAB_MAX_WORKERS"

LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabSettings:
    """Define la configuración efectiva de una invocación."""

    output_root: Path
    seed: int = DEFAULT_SEED
    log_level: str = "INFO"
    max_workers: int = 1

    def to_payload(self) -> dict:
        """Convierte la configuración a un diccionario serializable."""
        return {
            "output_root": str(self.output_root),
            "seed": self.seed,
            "log_level": self.log_level,
            "max_workers": self.max_workers,
        }

    def with_updates(
        self,
        *,
        output_root: Optional[Path] = None,
        seed: Optional[int] = None,
        log_level: Optional[str] = None,
        max_workers: Optional[int] = None,
    ) -> "LabSettings":
        """Crea una nueva instancia con los valores indicados."""
        return replace(
            self,
            output_root=(
                _coerce_path(output_root) if output_root is not None else self.output_root
            ),
            seed=seed if seed is not None else self.seed,
            log_level=_normalize_level(log_level) or self.log_level,
            max_workers=max(1, max_workers) if max_workers is not None else self.max_workers,
        )


def _coerce_path(value: Optional[str | Path]) -> Path:
    """Convierte un valor a una ruta absoluta."""
    if value is None:
        return (Path.cwd() / DEFAULT_OUTPUT_DIR).resolve()
    return Path(value).expanduser().resolve()


def _parse_env_int(raw: Optional[str]) -> Optional[int]:
    """Parsea una variable de entorno como entero."""
    if raw is None:
        return None
    try:
        return int(raw.strip())
    except ValueError:
        logger.warning("Valor entero inválido en el entorno: %r", raw)
        return None


def _normalize_level(raw: Optional[str]) -> Optional[str]:
    if raw is None:
        return None
    value = raw.strip().upper()
    if value in LOG_LEVELS:
        return value
    logger.warning("Nivel de log desconocido: %r", raw)
    return None


def load_settings(env: Optional[Mapping[str, str]] = None) -> LabSettings:
    """Carga la configuración desde el entorno (o un mapeo explícito)."""
    effective_env: Mapping[str, str] = os.environ if env is None else env

    output_root = _coerce_path(effective_env.get(ENV_OUT_DIR))
    seed = _parse_env_int(effective_env.get(ENV_SEED))
    level = _normalize_level(effective_env.get(ENV_LOG_LEVEL))
    workers = _parse_env_int(effective_env.get(ENV_MAX_WORKERS))

    return LabSettings(
        output_root=output_root,
        seed=seed if seed is not None else DEFAULT_SEED,
        log_level=level or "INFO",
        max_workers=max(1, workers) if workers is not None else 1,
    )
