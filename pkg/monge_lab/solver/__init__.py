# SPDX-License-Identifier: MIT
"""
Solver de Newton, barreras, oráculos y pipeline degenerado.
"""

from .barrier import SandwichReport, build_barrier, harmonic_majorant, sandwich_check
from .newton import solve_dirichlet, solve_torus
from .options import Initializer, SolveOptions
from .oracles import fourier_torus_m1, picard_torus, poisson_dirichlet
from .pipeline import PipelineResult, degenerate_pipeline
from .radial import RadialProfile, radial_oracle

__all__ = [
    "Initializer",
    "PipelineResult",
    "RadialProfile",
    "SandwichReport",
    "SolveOptions",
    "build_barrier",
    "degenerate_pipeline",
    "fourier_torus_m1",
    "harmonic_majorant",
    "picard_torus",
    "poisson_dirichlet",
    "radial_oracle",
    "sandwich_check",
    "solve_dirichlet",
    "solve_torus",
]
