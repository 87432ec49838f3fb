# SPDX-License-Identifier: MIT
"""
Modelos Pydantic del archivo de instancia (JSON) y constructores de los
objetos del laboratorio a partir de ellos.
"""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constants import DEFAULT_SEED, INSTANCE_SCHEMA_VERSION
from .errors import InstanceError, MongeLabError
from .expression import compile_expression
from .grid.domain import GridDomain
from .grid.fields import ScalarField
from .grid.snapshot import load_snapshot
from .rhs.mollify import RegularizationSchedule
from .solver.options import Initializer, SolveOptions

logger = logging.getLogger(__name__)


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DomainSpec(_StrictModel):
    """Forma de la malla: bola, caja o toro."""

    shape: Literal["ball", "box", "torus"]
    m: int = Field(..., ge=1, le=2, description="Dimensión compleja")
    n: int = Field(..., ge=5, description="Nodos por eje real")
    radius: float = Field(1.0, gt=0, description="Radio (bola)")
    half_width: float = Field(1.0, gt=0, description="Semiancho (caja)")
    period: float = Field(1.0, gt=0, description="Periodo (toro)")
    center: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_center(self) -> "DomainSpec":
        if self.center is not None and len(self.center) != 2 * self.m:
            raise ValueError(f"center necesita {2 * self.m} coordenadas")
        return self


class DensitySpec(_StrictModel):
    """Densidad f como expresión o como ruta a una instantánea de campo."""

    expression: Optional[str] = None
    field_path: Optional[str] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "DensitySpec":
        if (self.expression is None) == (self.field_path is None):
            raise ValueError("Indica exactamente uno de 'expression' o 'field_path'")
        return self


class GeometricSpec(_StrictModel):
    start: float = Field(..., gt=0)
    factor: float = Field(..., gt=0, lt=1)
    count: int = Field(..., ge=1)

    def values(self) -> Tuple[float, ...]:
        return tuple(self.start * self.factor**k for k in range(self.count))


def _axis(values: Optional[List[float]], decay: Optional[GeometricSpec]) -> Tuple[float, ...]:
    if values is not None:
        return tuple(values)
    assert decay is not None
    return decay.values()


class ScheduleSpec(_StrictModel):
    """Calendario de regularización; ρ se expresa en unidades de h."""

    epsilons: Optional[List[float]] = None
    rhos: Optional[List[float]] = None
    epsilon_decay: Optional[GeometricSpec] = None
    rho_decay: Optional[GeometricSpec] = None

    @model_validator(mode="after")
    def _one_source_per_axis(self) -> "ScheduleSpec":
        if (self.epsilons is None) == (self.epsilon_decay is None):
            raise ValueError("Indica 'epsilons' o 'epsilon_decay', no ambos")
        if (self.rhos is None) == (self.rho_decay is None):
            raise ValueError("Indica 'rhos' o 'rho_decay', no ambos")
        return self

    def build(self, h: float) -> RegularizationSchedule:
        epsilons = _axis(self.epsilons, self.epsilon_decay)
        rhos = _axis(self.rhos, self.rho_decay)
        return RegularizationSchedule(epsilons, tuple(rho * h for rho in rhos))


class SolveSpec(_StrictModel):
    max_iterations: int = Field(50, ge=1)
    tolerance: float = Field(1e-10, gt=0)
    shrink: float = Field(0.5, gt=0, lt=1)
    min_step: float = Field(1e-6, gt=0, le=1)
    positivity_floor: float = Field(1e-10, ge=0)
    initializer: Literal["barrier", "zero"] = "barrier"
    max_continuation_steps: int = Field(24, ge=1)

    def build(self) -> SolveOptions:
        return SolveOptions(
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            shrink=self.shrink,
            min_step=self.min_step,
            positivity_floor=self.positivity_floor,
            initializer=Initializer(self.initializer),
            max_continuation_steps=self.max_continuation_steps,
        )


class VerifierSpec(_StrictModel):
    seed: int = DEFAULT_SEED
    trials: int = Field(100_000, ge=1)
    lambda_margin: float = Field(1e-6, gt=0)
    estimates: bool = True


class InstanceSpec(_StrictModel):
    """Documento completo de una instancia."""

    schema_version: Literal[1] = INSTANCE_SCHEMA_VERSION
    name: str = "instance"
    domain: DomainSpec
    density: DensitySpec
    schedule: Optional[ScheduleSpec] = None
    solve: SolveSpec = SolveSpec()
    verifier: VerifierSpec = VerifierSpec()
    output_dir: Optional[str] = None

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def instance_hash(self) -> str:
        """SHA-256 de la serialización canónica (estable al re-serializar)."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def build_domain(spec: DomainSpec) -> GridDomain:
    try:
        if spec.shape == "ball":
            return GridDomain.ball(spec.m, spec.n, spec.radius, spec.center)
        if spec.shape == "box":
            return GridDomain.box(spec.m, spec.n, spec.half_width, spec.center)
        return GridDomain.torus(spec.m, spec.n, spec.period)
    except MongeLabError as exc:
        raise InstanceError(f"Dominio inválido: {exc}") from exc


def build_density(
    spec: DensitySpec, domain: GridDomain, base_dir: Optional[Path] = None
) -> ScalarField:
    """Construye f sobre la malla; las rutas relativas parten del archivo de instancia."""
    if spec.field_path is not None:
        path = Path(spec.field_path)
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        try:
            field = load_snapshot(path)
        except (OSError, MongeLabError) as exc:
            raise InstanceError(f"No se pudo cargar la densidad {path}: {exc}") from exc
        if not field.domain.compatible_with(domain):
            raise InstanceError(f"La instantánea {path} no coincide con la malla de la instancia")
        return ScalarField(domain, field.values, "f")
    assert spec.expression is not None
    expression = compile_expression(spec.expression, domain.m)
    values = expression(*domain.coordinates, center=domain.center)
    if not np.all(np.isfinite(values[~domain.exterior_mask])):
        raise InstanceError("La expresión no es finita en todos los nodos del dominio")
    try:
        return ScalarField.from_function(domain, lambda *_: values, "f")
    except MongeLabError as exc:
        raise InstanceError(f"La expresión no define una función total: {exc}") from exc


def load_instance(path: Path) -> InstanceSpec:
    """Lee y valida un archivo de instancia JSON."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InstanceError(f"No se pudo leer {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceError(f"JSON inválido en {path}: {exc.msg} (línea {exc.lineno})") from exc
    try:
        spec = InstanceSpec.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = ".".join(str(part) for part in first.get("loc", ()))
        raise InstanceError(f"Instancia inválida en '{location}': {first.get('msg')}") from exc
    logger.debug("Instancia %s cargada (hash %s)", spec.name, spec.instance_hash()[:12])
    return spec
