# SPDX-License-Identifier: MIT
"""
Instantáneas CSV de campos escalares.

Formato: dos líneas de cabecera con ``#`` (m, shape, n, h, extent, center)
seguidas de un CSV con las coordenadas reales de cada nodo no exterior y
su valor.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Dict, List

import numpy as np

from ..constants import SNAPSHOT_FORMAT
from ..errors import DomainError
from .domain import DomainShape, GridDomain
from .fields import ScalarField


def _format_float(value: float) -> str:
    return repr(float(value))


def snapshot_text(field: ScalarField) -> str:
    domain = field.domain
    header = {
        "m": str(domain.m),
        "shape": domain.shape.value,
        "n": str(domain.n),
        "h": _format_float(domain.h),
        "extent": _format_float(domain.extent),
        "center": ",".join(_format_float(c) for c in domain.center),
        "name": field.name or "field",
    }
    buffer = io.StringIO()
    buffer.write(f"# {SNAPSHOT_FORMAT}\n")
    buffer.write("# " + " ".join(f"{key}={value}" for key, value in header.items()) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    labels = [f"{axis}{j + 1}" for j in range(domain.m) for axis in ("x", "y")]
    writer.writerow(labels + ["value"])

    coords = [c.reshape(-1) for c in domain.coordinates]
    values = field.values.reshape(-1)
    for flat in np.flatnonzero(~domain.exterior_mask.reshape(-1)):
        row = [_format_float(c[flat]) for c in coords]
        row.append(_format_float(values[flat]))
        writer.writerow(row)
    return buffer.getvalue()


def save_snapshot(field: ScalarField, path: Path) -> Path:
    """Escribe la instantánea de ``field`` en ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(snapshot_text(field), encoding="utf-8")
    return path


def _parse_header(line: str) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for token in line.lstrip("#").split():
        key, _, value = token.partition("=")
        entries[key] = value
    return entries


def load_snapshot(path: Path) -> ScalarField:
    """Reconstruye el dominio y el campo a partir de una instantánea."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 3 or lines[0].lstrip("# ").strip() != SNAPSHOT_FORMAT:
        raise DomainError(f"{path} no es una instantánea de campo válida")
    header = _parse_header(lines[1])
    try:
        m = int(header["m"])
        shape = DomainShape(header["shape"])
        n = int(header["n"])
        extent = float(header["extent"])
        center = tuple(float(c) for c in header["center"].split(","))
        spacing = float(header["h"])
    except (KeyError, ValueError) as exc:
        raise DomainError(f"Cabecera de instantánea inválida en {path}: {exc}") from exc

    domain = GridDomain(m, shape, n, extent, center)
    if not np.isclose(spacing, domain.h, rtol=1e-12, atol=0.0):
        raise DomainError(f"Paso h={spacing!r} incoherente con n y la extensión en {path}")
    values = np.full(domain.grid_shape, np.nan)
    reader = csv.reader(lines[3:])
    rows: List[List[str]] = [row for row in reader if row]
    if len(rows) != int(np.count_nonzero(~domain.exterior_mask)):
        raise DomainError(f"Número de nodos inconsistente en {path}")
    h = domain.h
    origin = np.array([axis[0] for axis in domain.axes])
    for row in rows:
        coords = np.array([float(x) for x in row[:-1]])
        index = tuple(int(i) for i in np.rint((coords - origin) / h))
        values[index] = float(row[-1])
    return ScalarField(domain, values, header.get("name", ""))
