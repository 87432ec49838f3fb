# SPDX-License-Identifier: MIT
"""
Curvatura en marcos ortonormales y verificación de curvatura bisectional
ortogonal no negativa (OBC).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..constants import OBC_THRESHOLD
from .metrics import MetricModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurvatureSample:
    """Curvatura en un punto expresada en un marco ortonormal."""

    point: Tuple[complex, ...]
    tensor: np.ndarray
    scalar: float
    obc_min: float


@dataclass(frozen=True)
class ObcResult:
    """Resultado de la verificación OBC sobre un conjunto de puntos."""

    metric: str
    passed: bool
    obc_min: float
    frames_per_point: int
    samples: Tuple[CurvatureSample, ...] = field(default_factory=tuple)
    point_minima: Tuple[float, ...] = field(default_factory=tuple)


def orthonormal_frame(g: np.ndarray, unitary: np.ndarray | None = None) -> np.ndarray:
    """Columnas E[:, a] con sum_{ij} g_{i j̄} E_{ia} conj(E_{jb}) = delta_ab.

    Con g = L L^H, P = L^{-H} cumple P^H g P = I y E = conj(P U).
    """
    lower = linalg.cholesky(g, lower=True)
    p = linalg.solve_triangular(lower, np.eye(g.shape[0]), lower=True).conj().T
    if unitary is not None:
        p = p @ unitary
    return np.conj(p)


def frame_components(tensor: np.ndarray, frame: np.ndarray) -> np.ndarray:
    conj = np.conj(frame)
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", tensor, frame, conj, frame, conj)


def obc_values(frame_tensor: np.ndarray) -> np.ndarray:
    """R(e_a, ē_a, e_b, ē_b) para a != b.

    Con m = 1 no hay pares ortogonales y se usa R(e_1, ē_1, e_1, ē_1).
    """
    m = frame_tensor.shape[0]
    diag = np.real(np.einsum("aabb->ab", frame_tensor))
    if m == 1:
        return diag.reshape(-1)
    return diag[~np.eye(m, dtype=bool)]


def scalar_curvature(frame_tensor: np.ndarray) -> float:
    return float(np.real(np.einsum("aacc->", frame_tensor)))


def curvature_at(model: MetricModel, z: Sequence[complex]) -> CurvatureSample:
    """Tensor de curvatura en el marco ortonormal coordenado."""
    point = np.asarray(z, dtype=complex).reshape(-1)
    tensor = frame_components(model.curvature(point), orthonormal_frame(model.metric(point)))
    values = obc_values(tensor)
    return CurvatureSample(
        point=tuple(complex(c) for c in point),
        tensor=tensor,
        scalar=scalar_curvature(tensor),
        obc_min=float(values.min()) if values.size else float("inf"),
    )


def haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Unitaria con distribución de Haar (QR con corrección de fase)."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def structured_unitaries(m: int) -> List[np.ndarray]:
    """Marco coordenado y rotaciones de pi/4 en cada plano (real y con fase i)."""
    frames = [np.eye(m, dtype=complex)]
    c = 1.0 / np.sqrt(2.0)
    for a in range(m):
        for b in range(a + 1, m):
            for phase in (1.0, 1j):
                u = np.eye(m, dtype=complex)
                u[a, a] = c
                u[b, a] = c * phase
                u[a, b] = -c * np.conj(phase)
                u[b, b] = c
                frames.append(u)
    return frames


def point_frames(m: int, count: int, rng: np.random.Generator) -> List[np.ndarray]:
    """Marcos estructurados seguidos de ``count`` marcos de Haar.

    Los marcos aleatorios se generan en orden, así que aumentar ``count``
    solo agrega marcos al final.
    """
    return structured_unitaries(m) + [haar_unitary(m, rng) for _ in range(count)]


def obc_check(
    model: MetricModel,
    points: Sequence[Sequence[complex]],
    frames_per_point: int = 32,
    seed: int = 0,
) -> ObcResult:
    """Mínimo de la curvatura bisectional ortogonal sobre puntos y marcos."""
    children = np.random.SeedSequence(seed).spawn(len(points))
    minima: List[float] = []
    samples: List[CurvatureSample] = []
    for child, z in zip(children, points):
        rng = np.random.default_rng(child)
        point = np.asarray(z, dtype=complex).reshape(-1)
        g = model.metric(point)
        tensor = model.curvature(point)
        point_min = float("inf")
        for unitary in point_frames(model.m, frames_per_point, rng):
            values = obc_values(frame_components(tensor, orthonormal_frame(g, unitary)))
            if values.size:
                point_min = min(point_min, float(values.min()))
        minima.append(point_min)
        samples.append(curvature_at(model, point))

    overall = min(minima) if minima else float("inf")
    passed = overall >= OBC_THRESHOLD
    logger.info(
        "OBC %s: mínimo %.3e sobre %d puntos (%s)",
        model.name,
        overall,
        len(minima),
        "ok" if passed else "violación",
    )
    return ObcResult(
        metric=model.name,
        passed=passed,
        obc_min=overall,
        frames_per_point=frames_per_point,
        samples=tuple(samples),
        point_minima=tuple(minima),
    )


def symmetry_defect(tensor: np.ndarray) -> float:
    """Máximo defecto de las simetrías de Kähler del tensor R_{i j̄ k l̄}.

    Comprueba R_{ij̄kl̄} = R_{kj̄il̄} = R_{il̄kj̄} y conj(R_{ij̄kl̄}) = R_{jīlk̄}.
    """
    swap_holomorphic = np.transpose(tensor, (2, 1, 0, 3))
    swap_antiholomorphic = np.transpose(tensor, (0, 3, 2, 1))
    conjugate = np.conj(np.transpose(tensor, (1, 0, 3, 2)))
    return float(
        max(
            np.max(np.abs(tensor - swap_holomorphic), initial=0.0),
            np.max(np.abs(tensor - swap_antiholomorphic), initial=0.0),
            np.max(np.abs(tensor - conjugate), initial=0.0),
        )
    )


# ----------------------------------------------------------------------
# Curvatura a partir del potencial por diferencias finitas
# ----------------------------------------------------------------------
def _real_coordinates(z: np.ndarray) -> np.ndarray:
    return np.column_stack([np.real(z), np.imag(z)]).reshape(-1)


def _from_real(x: np.ndarray) -> np.ndarray:
    return x[0::2] + 1j * x[1::2]


def _wirtinger_hessian(func: Callable[[np.ndarray], np.ndarray], z: np.ndarray, step: float):
    """d_j dbar_k func por diferencias centradas en coordenadas reales."""
    x0 = _real_coordinates(z)
    dim = x0.size
    m = dim // 2

    def value(offset: np.ndarray):
        return np.asarray(func(_from_real(x0 + offset)))

    center = value(np.zeros(dim))
    second = {}
    for a in range(dim):
        ea = np.zeros(dim)
        ea[a] = step
        second[(a, a)] = (value(ea) - 2.0 * center + value(-ea)) / step**2
        for b in range(a + 1, dim):
            eb = np.zeros(dim)
            eb[b] = step
            second[(a, b)] = (
                value(ea + eb) - value(ea - eb) - value(-ea + eb) + value(-ea - eb)
            ) / (4.0 * step**2)

    def d(a: int, b: int):
        return second[(a, b)] if a <= b else second[(b, a)]

    result = np.zeros((m, m) + center.shape, dtype=complex)
    for j in range(m):
        for k in range(m):
            real = d(2 * j, 2 * k) + d(2 * j + 1, 2 * k + 1)
            imag = d(2 * j, 2 * k + 1) - d(2 * j + 1, 2 * k)
            result[j, k] = 0.25 * (real + 1j * imag)
    return result


def _wirtinger_gradient(func: Callable[[np.ndarray], np.ndarray], z: np.ndarray, step: float):
    """(d_k func, dbar_k func) para cada k."""
    x0 = _real_coordinates(z)
    dim = x0.size
    partials = []
    for a in range(dim):
        ea = np.zeros(dim)
        ea[a] = step
        plus = np.asarray(func(_from_real(x0 + ea)))
        minus = np.asarray(func(_from_real(x0 - ea)))
        partials.append((plus - minus) / (2.0 * step))
    m = dim // 2
    holo = np.stack([0.5 * (partials[2 * k] - 1j * partials[2 * k + 1]) for k in range(m)])
    anti = np.stack([0.5 * (partials[2 * k] + 1j * partials[2 * k + 1]) for k in range(m)])
    return holo, anti


def curvature_from_potential(
    potential: Callable[[np.ndarray], float],
    z: Sequence[complex],
    metric_step: float = 2e-3,
    outer_step: float = 3e-3,
) -> np.ndarray:
    """R_{ij̄kl̄} = -d_k dbar_l g_{ij̄} + g^{q̄p} d_k g_{iq̄} dbar_l g_{pj̄}.

    La métrica se obtiene del potencial por diferencias finitas y se vuelve a
    diferenciar; sirve de referencia independiente de las fórmulas cerradas.
    """
    point = np.asarray(z, dtype=complex).reshape(-1)

    def metric(w: np.ndarray) -> np.ndarray:
        return _wirtinger_hessian(potential, w, metric_step)

    g = metric(point)
    g_inv = np.linalg.inv(g)
    second = _wirtinger_hessian(metric, point, outer_step)  # [k, l, i, j]
    holo, anti = _wirtinger_gradient(metric, point, outer_step)  # [k, i, j]
    quadratic = np.einsum("kiq,qp,lpj->ijkl", holo, g_inv, anti)
    return -np.transpose(second, (2, 3, 0, 1)) + quadratic
