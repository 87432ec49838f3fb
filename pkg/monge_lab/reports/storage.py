# SPDX-License-Identifier: MIT
"""
Persistencia de una ejecución en un directorio: reportes JSON-lines, CSV
listos para graficar, instantáneas de campos y el manifiesto.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from ..constants import MANIFEST_FILENAME, TOOL_VERSION
from ..grid.fields import ScalarField
from ..grid.snapshot import snapshot_text
from .report_schema import RunManifest, manifest_from_dict, report_to_dict, to_json_line

logger = logging.getLogger(__name__)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ManifestCheck:
    """Diferencias entre el manifiesto y los archivos en disco."""

    missing: List[str]
    orphans: List[str]

    @property
    def consistent(self) -> bool:
        return not self.missing and not self.orphans


class RunStore:
    """Gestiona los artefactos de una ejecución en ``<root>``."""

    def __init__(self, root: Path, manifest_filename: str = MANIFEST_FILENAME) -> None:
        self.root = Path(root).expanduser().resolve()
        self.manifest_path = self.root / manifest_filename
        self._artifacts: List[str] = []
        self._started_at: Optional[datetime] = None

    @property
    def artifacts(self) -> List[str]:
        return sorted(self._artifacts)

    def begin(self) -> None:
        """Prepara el directorio borrando lo listado por un manifiesto anterior."""
        self.root.mkdir(parents=True, exist_ok=True)
        previous = self.load_manifest()
        if previous is not None:
            for name in previous.artifacts:
                stale = (self.root / name).resolve()
                if stale.parent == self.root and stale.is_file():
                    stale.unlink()
            self.manifest_path.unlink(missing_ok=True)
            logger.debug("Artefactos previos eliminados: %d", len(previous.artifacts))
        self._artifacts = []
        self._started_at = datetime.now(timezone.utc)

    def _register(self, name: str, text: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        if name not in self._artifacts:
            self._artifacts.append(name)
        return path

    def write_jsonl(self, name: str, records: Iterable[Any]) -> Path:
        lines = [to_json_line(record) for record in records]
        return self._register(name, "".join(line + "\n" for line in lines))

    def write_json(self, name: str, payload: Any) -> Path:
        data = report_to_dict(payload, deterministic=True)
        return self._register(name, json.dumps(data, sort_keys=True, indent=2) + "\n")

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
        return self._register(name, buffer.getvalue())

    def write_snapshot(self, name: str, field: ScalarField) -> Path:
        return self._register(name, snapshot_text(field))

    def finish(
        self,
        command: str,
        status: str,
        exit_code: int,
        instance_hash: Optional[str] = None,
        wall_times: Optional[Dict[str, float]] = None,
        notes: Optional[List[str]] = None,
    ) -> RunManifest:
        """Escribe el manifiesto con la lista exacta de artefactos emitidos."""
        finished = datetime.now(timezone.utc)
        manifest = RunManifest(
            command=command,
            tool_version=TOOL_VERSION,
            instance_hash=instance_hash,
            status=status,
            exit_code=exit_code,
            artifacts=self.artifacts,
            started_at=self._started_at or finished,
            finished_at=finished,
            wall_times=dict(wall_times or {}),
            notes=list(notes or []),
        )
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_text(
            json.dumps(report_to_dict(manifest), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )
        logger.info(
            "Manifiesto escrito en %s (%d artefactos)", self.manifest_path, len(self.artifacts)
        )
        return manifest

    def load_manifest(self) -> Optional[RunManifest]:
        if not self.manifest_path.exists():
            return None
        try:
            payload = json.loads(self.manifest_path.read_text(encoding="utf-8"))
            return manifest_from_dict(payload)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            logger.warning("Manifiesto ilegible en %s: %s", self.manifest_path, exc)
            return None

    def verify_manifest(self, manifest: Optional[RunManifest] = None) -> ManifestCheck:
        manifest = manifest or self.load_manifest()
        listed = set(manifest.artifacts) if manifest else set()
        on_disk = {
            path.relative_to(self.root).as_posix()
            for path in self.root.rglob("*")
            if path.is_file() and path != self.manifest_path
        }
        return ManifestCheck(sorted(listed - on_disk), sorted(on_disk - listed))

    def read_jsonl(self, name: str) -> List[Dict[str, Any]]:
        path = self.root / name
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]

    def read_csv(self, name: str) -> List[Dict[str, str]]:
        path = self.root / name
        if not path.exists():
            return []
        with path.open("r", encoding="utf-8", newline="") as handle:
            return list(csv.DictReader(handle))
