from .geometry import (SurfaceNodeSet, ImplicitSurface, InvalidNodeSet,
    NormalEstimationError, fibonacci_sphere_nodes, torus_nodes,
    implicit_surface_nodes, rose_curve_nodes, bumpy_sphere_nodes,
    estimate_normals, load_point_cloud)
from .stencil import Stencil, InsufficientNeighbors, build_stencil
from .rbf import (PhsPolyConfig, LinearOperatorSpec, InvalidConfig,
    SingularStencil, full_stencil_weights, collapse_weights,
    surface_operator_weights)
from .operators import (OperatorMatrix, AssemblyError, assemble,
    advection_matrix, hyperviscosity_matrix, interpolation_matrix)
from .timestep import (BlowUp, SolverFailure, linear_solve, rk4_advance,
    sbdf_advance, imex_euler_advance, imex_block_advance)
from .analysis import SpectrumError, rel_error, eoc, spectrum
from .problems import (converge, poisson_bvp, heat_sphere, forced_heat_torus,
    advect_sphere, advect_torus, turing_static, cross_diffusion_static)
from .moving import MovingState, move_and_resample, \
    expanding_sphere_conservation


__version__ = '1.0.0'

__all__ = (
    'SurfaceNodeSet',
    'ImplicitSurface',
    'InvalidNodeSet',
    'NormalEstimationError',
    'fibonacci_sphere_nodes',
    'torus_nodes',
    'implicit_surface_nodes',
    'rose_curve_nodes',
    'bumpy_sphere_nodes',
    'estimate_normals',
    'load_point_cloud',
    'Stencil',
    'InsufficientNeighbors',
    'build_stencil',
    'PhsPolyConfig',
    'LinearOperatorSpec',
    'InvalidConfig',
    'SingularStencil',
    'full_stencil_weights',
    'collapse_weights',
    'surface_operator_weights',
    'OperatorMatrix',
    'AssemblyError',
    'assemble',
    'advection_matrix',
    'hyperviscosity_matrix',
    'interpolation_matrix',
    'BlowUp',
    'SolverFailure',
    'linear_solve',
    'rk4_advance',
    'sbdf_advance',
    'imex_euler_advance',
    'imex_block_advance',
    'SpectrumError',
    'rel_error',
    'eoc',
    'spectrum',
    'converge',
    'poisson_bvp',
    'heat_sphere',
    'forced_heat_torus',
    'advect_sphere',
    'advect_torus',
    'turing_static',
    'cross_diffusion_static',
    'MovingState',
    'move_and_resample',
    'expanding_sphere_conservation',
)
