"""
Benchmark drivers: surface Poisson, diffusion, transport and
reaction-diffusion problems on static surfaces
"""

from .base import REGISTRY, BaseProblem, ProblemRun, RunRecord, converge
from .poisson import PoissonProblem, poisson_bvp
from .diffusion import (ForcedHeatTorusProblem, HeatSphereProblem,
    forced_heat_torus, heat_sphere)
from .advection import (SphereAdvectionProblem, TorusAdvectionProblem,
    advect_sphere, advect_torus)
from .turing import (TURING_PRESETS, CrossDiffusionProblem, TuringParams,
    TuringProblem, cross_diffusion_static, turing_static)


__all__ = (
    'REGISTRY',
    'BaseProblem',
    'ProblemRun',
    'RunRecord',
    'converge',
    'PoissonProblem',
    'poisson_bvp',
    'HeatSphereProblem',
    'ForcedHeatTorusProblem',
    'heat_sphere',
    'forced_heat_torus',
    'SphereAdvectionProblem',
    'TorusAdvectionProblem',
    'advect_sphere',
    'advect_torus',
    'TuringParams',
    'TURING_PRESETS',
    'TuringProblem',
    'turing_static',
    'CrossDiffusionProblem',
    'cross_diffusion_static',
)
