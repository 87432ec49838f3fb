# SPDX-License-Identifier: MIT
"""
Reportes de estimación por solución y auditoría de la cota final sobre una
familia de instancias.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import optimize

from ..errors import IncompleteReportError
from ..grid.fields import HermitianField, ScalarField
from ..grid.hermitian import det_array
from ..grid.operators import complex_laplacian_array
from ..reports.report_schema import AuditRecord, ConditionReport, EstimateReport
from ..rhs.conditions import lipschitz_m2_bound
from .config import TestFunctionConfig
from .h_profile import HProfile, flat_metric, profile_H
from .lemmas import eqm1_slack_batch, third_order_at_max
from .norms import norms

logger = logging.getLogger(__name__)


def pos_bisec3_slack(
    profile: HProfile,
    g_prime: HermitianField,
    scalar_curvature: float = 0.0,
) -> Optional[float]:
    """Holgura de la cadena (m-1) f^{-1/(m-1)} Δ f^{1/(m-1)} <=
    m (m+Δφ)/(2C0) + S - (m+Δφ) sum g'^{iī}/(C0 λ).

    f es la densidad efectiva det g' nodo a nodo. None para m = 1.
    """
    domain = g_prime.domain
    m = domain.m
    if m < 2:
        return None
    cfg = profile.config
    density = np.full(domain.size, np.nan)
    density[domain.interior_index] = det_array(g_prime.matrices)
    density = density.reshape(domain.grid_shape)
    p = 1.0 / (m - 1)
    with np.errstate(invalid="ignore"):
        power = np.power(density, p)
    lap_power = complex_laplacian_array(power, domain.m, domain.h)[profile.node]
    f_p = float(density[profile.node])
    lhs = (m - 1) * f_p ** (-p) * float(lap_power)
    trace = profile.trace_at_max
    rhs = (
        m * trace / (2.0 * cfg.c0)
        + scalar_curvature
        - trace * profile.inverse_trace_at_max / (cfg.c0 * cfg.lam)
    )
    return float(rhs - lhs)


def build_estimate_report(
    phi: ScalarField,
    g_prime: HermitianField,
    cfg: Optional[TestFunctionConfig] = None,
    scalar_curvature: float = 0.0,
) -> EstimateReport:
    """Normas, perfil de H y holguras en su máximo para una solución.

    Sin ``cfg`` se usa el λ más ajustado: 2 + osc φ + 1e-6.
    """
    domain = phi.domain
    m = domain.m
    field_norms = norms(phi)
    cfg = cfg or TestFunctionConfig.for_oscillation(m, field_norms.osc)
    profile = profile_H(phi, g_prime, cfg)

    eqm1: Optional[float] = None
    bisec3: Optional[float] = None
    third: Optional[float] = None
    if m >= 2:
        eqm1 = float(np.min(eqm1_slack_batch(g_prime.matrices)))
        bisec3 = pos_bisec3_slack(profile, g_prime, scalar_curvature)
        phi_value = float(phi.values[profile.node] + profile.shift)
        outcomes = third_order_at_max(phi, g_prime, cfg, profile.node, phi_value)
        third = float(min(outcome.slack for outcome in outcomes))

    return EstimateReport(
        osc=field_norms.osc,
        sup_grad=field_norms.sup_grad,
        sup_lap=field_norms.sup_lap,
        min_trace=field_norms.min_trace,
        h_max_node=profile.node,
        h_max_value=profile.value,
        trace_at_max=profile.trace_at_max,
        grad_eq_residual=profile.residual_norm,
        eqm1_slack=eqm1,
        lam=cfg.lam,
        c0=cfg.c0,
        max_principle_value=profile.max_principle_value,
        max_principle_tolerance=profile.max_principle_tolerance,
        pos_bisec3_slack=bisec3,
        third_order_slack=third,
    )


def _largest_root(exponent: float, c1: float, c2: float, start: float) -> float:
    """Mayor raíz de x^q = c1 x + c2, con x^q <= c1 x + c2 en ``start``."""

    def gap(x: float) -> float:
        return x**exponent - c1 * x - c2

    if exponent == 2.0:
        return float((c1 + np.sqrt(c1 * c1 + 4.0 * c2)) / 2.0)
    upper = max(start, 1.0) * 2.0
    while gap(upper) <= 0:
        upper *= 2.0
    return float(optimize.brentq(gap, start, upper))


def final_bound_audit(
    reports: Union[EstimateReport, Sequence[EstimateReport]],
    cond: Optional[ConditionReport] = None,
    cfg: Optional[TestFunctionConfig] = None,
) -> AuditRecord:
    """Ajusta (C1, C2) en x^{1+1/(m-1)} <= C1 x + C2 y calcula la raíz C3.

    x = m + Δφ(p) de cada reporte. C1 y la ordenada de mínimos cuadrados
    salen de un ajuste lineal; C2 se eleva para cubrir todas las muestras.
    """
    family: List[EstimateReport] = (
        [reports] if isinstance(reports, EstimateReport) else list(reports)
    )
    if not family:
        raise IncompleteReportError("No hay reportes que auditar")
    missing = [r for r in family if r.h_max_node is None or r.trace_at_max is None]
    if missing:
        raise IncompleteReportError("Faltan los diagnósticos del máximo de H")

    if cond is not None:
        m = cond.m
    elif cfg is not None:
        m = cfg.m
    else:
        raise IncompleteReportError("Se requiere la dimensión (ConditionReport o configuración)")
    exponent = 2.0 if m == 1 else 1.0 + 1.0 / (m - 1)
    x = np.array([float(r.trace_at_max) for r in family])
    y = x**exponent
    if x.size == 1 or np.ptp(x) == 0.0:
        c1, lsq_c2 = float(y[0] / x[0]), 0.0
    else:
        design = np.column_stack([x, np.ones_like(x)])
        (c1, lsq_c2), *_ = np.linalg.lstsq(design, y, rcond=None)
        c1, lsq_c2 = float(c1), float(lsq_c2)
    envelope = float(np.max(y - c1 * x))
    c2 = max(lsq_c2, envelope)
    c3 = _largest_root(exponent, c1, c2, float(np.max(x)))

    slacks = [r.eqm1_slack for r in family if r.eqm1_slack is not None]
    lipschitz = None
    if cond is not None and cond.m == 2:
        alpha0 = 1.0 / (family[0].c0 * family[0].lam)
        lipschitz = lipschitz_m2_bound(cond, alpha0)

    record = AuditRecord(
        c1=c1,
        c2=c2,
        c3=c3,
        lsq_c2=lsq_c2,
        samples=int(x.size),
        within_lsq=bool(np.all(y <= c1 * x + lsq_c2 + 1e-12 * np.maximum(1.0, y))),
        max_trace=float(np.max(x)),
        min_eqm1_slack=float(min(slacks)) if slacks else None,
        lipschitz_bound=lipschitz,
    )
    logger.info("Auditoría final: C1=%.4g C2=%.4g C3=%.4g (%d muestras)", c1, c2, c3, x.size)
    return record


def with_fit(report: EstimateReport, audit: AuditRecord) -> EstimateReport:
    """Copia del reporte con las constantes ajustadas."""
    return replace(report, c1=audit.c1, c2=audit.c2, c3=audit.c3)


def flat_potential(u: ScalarField) -> ScalarField:
    """φ = u - |z - c|², el potencial relativo a la métrica plana g = I."""
    domain = u.domain
    return u.with_values(u.values - domain.squared_radius, "phi")


def estimate_for_dirichlet(
    u: ScalarField, cfg: Optional[TestFunctionConfig] = None
) -> EstimateReport:
    """Reporte de estimación de una solución de Dirichlet, con g' = u_{jk̄}."""
    phi = flat_potential(u)
    return build_estimate_report(phi, flat_metric(phi), cfg)


def estimate_for_torus(
    phi: ScalarField, cfg: Optional[TestFunctionConfig] = None
) -> EstimateReport:
    """Reporte de estimación en el toro plano, con g' = I + φ_{jk̄}."""
    return build_estimate_report(phi, flat_metric(phi), cfg)
