"""
Diffusion on a sphere expanding along its normal: implicit-explicit steps on
the current nodes, radial particle motion and resampling with in-surface
interpolation
"""

import logging

import numpy as np

from surfpde import constants
from surfpde.analysis import rel_error
from surfpde.geometry import SurfaceNodeSet, fibonacci_sphere_nodes
from surfpde.operators import assemble, interpolation_matrix
from surfpde.problems.base import BaseProblem, ProblemRun
from surfpde.problems.exact import (expanding_sphere_exact,
    expanding_sphere_forcing, expanding_sphere_radius)
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig
from surfpde.timestep import imex_euler_advance
from surfpde.utils import default_stencil_size, time_grid


logger = logging.getLogger(__name__)


def curvature_of_sphere(r):
    """
    Mean curvature ``2 / r`` of a sphere with outward normals.

    :param r: radius
    :type r: float
    :rtype: float
    :raises ValueError: for non-positive radii
    """
    if not r > 0:
        raise ValueError('Radius must be positive, got %r' % r)

    return 2.0 / r


def sphere_count(radius, dx, density=constants.MOVING_NODE_DENSITY):
    """
    Node count ``round(density 4π r² / dx²)`` of a sphere sampled at grid
    width *dx*.

    :rtype: int
    """
    return max(4, int(round(density * 4 * np.pi * radius ** 2 / dx ** 2)))


def sphere_nodes(radius, dx):
    """
    Fibonacci nodes on the sphere of the provided radius centred at the
    origin, at the count matching its area.

    :rtype: SurfaceNodeSet
    """
    unit = fibonacci_sphere_nodes(sphere_count(radius, dx))

    return SurfaceNodeSet(radius * unit.points, unit.normals,
        radius * unit.h, 'sphere')


class MovingState:
    """
    Nodes, solution and geometry of the expanding sphere at one time.

    :param node_set: nodes on the sphere of radius *radius*
    :type node_set: SurfaceNodeSet
    :param field: solution values at the nodes
    :type field: np.ndarray
    :param time: current time
    :type time: float
    :param radius: current radius
    :type radius: float
    :raises ValueError: if the field does not match the nodes
    """

    __slots__ = ('node_set', 'field', 'time', 'radius', 'curvature')

    def __init__(self, node_set, field, time, radius):
        field = np.array(field, dtype=float)
        if field.shape != (len(node_set),):
            raise ValueError('Field of length %d on %d nodes' % (len(field),
                len(node_set)))

        field.setflags(write=False)
        self.node_set = node_set
        self.field = field
        self.time = float(time)
        self.radius = float(radius)
        self.curvature = np.full(len(node_set), curvature_of_sphere(radius))


    def __repr__(self):
        return '<MovingState t=%.4g r=%.6g N=%d>' % (self.time, self.radius,
            len(self.node_set))


def move_and_resample(state, dt, target_spacing, config, min_sep=None,
        speed=0.5):
    """
    Moves the nodes radially with normal speed *speed* for *dt*, carrying
    their values, then resamples the grown sphere at the count matching its
    area and transfers the field by in-surface interpolation.

    :param state: current state
    :type state: MovingState
    :param dt: time step
    :type dt: float
    :param target_spacing: grid width Δx
    :type target_spacing: float
    :param config: interpolation parameters
    :type config: PhsPolyConfig
    :param min_sep: [optional] stencil minimum separation
    :type min_sep: float
    :param speed: [optional] normal velocity. Defaults to 0.5.
    :type speed: float
    :rtype: MovingState
    :raises AssemblyError: if interpolation weights fail
    """
    radius = state.radius + speed * dt
    scale = radius / state.radius
    old = state.node_set
    moved = SurfaceNodeSet(scale * old.points, old.normals, scale * old.h,
        old.name)

    targets = sphere_nodes(radius, target_spacing)
    transfer = interpolation_matrix(moved, config, targets.points,
        targets.normals, min_sep)
    logger.debug('Resampled r=%.6f: %d -> %d nodes', radius, len(old),
        len(targets))

    return MovingState(targets, transfer @ state.field, state.time + dt,
        radius)


def laplacian_row_defect(L, tol=constants.ROW_SUM_TOLERANCE):
    """
    Largest Laplacian row sum relative to the absolute weight of its row.
    Collapsed weights annihilate constants, so the defect stays near
    roundoff; larger values are logged as a warning.

    :param L: assembled Laplacian
    :type L: OperatorMatrix
    :param tol: [optional] admitted defect
    :type tol: float
    :rtype: float
    """
    rows = L.values()
    defect = float((np.abs(rows.sum(axis=1))
        / np.abs(rows).sum(axis=1)).max())

    if defect > tol:
        logger.warning('Laplacian row sums off by %.3e (tolerance %.1e)',
            defect, tol)
    else:
        logger.debug('Laplacian row sum defect %.3e', defect)

    return defect


class ExpandingSphereProblem(BaseProblem):
    """
    ``u_t = Δ_Γu - κu/2 + f`` on the sphere ``r(t) = 1 + t/2`` with
    ``u = exp(-6t) x y`` exact, stepped by implicit-explicit Euler with
    ``dt = 0.4 Δx²`` up to ``t = 0.5``. Resolutions are grid widths Δx.
    """

    name = 'moving'
    defaults = {
        'l': 2,
        'm': 5,
        'n_s': None,
        'n_perp': 14,
        'eps_normal': 0.2,
        'final_time': 0.5,
        'dt_factor': 0.4,
        'method': 'auto',
    }

    def __init__(self, **params):
        super().__init__(**params)

        l = self.params['l']
        n_s = self.params['n_s'] or default_stencil_size(l, 3, 'diffusion')
        self.config = PhsPolyConfig(m=self.params['m'], l=l, n_s=n_s,
            n_perp=self.params['n_perp'], eps_normal=self.params['eps_normal'])
        self.dx = None
        self.final_state = None


    def discretize(self, resolution):
        self.dx = float(resolution)

        return sphere_nodes(1.0, self.dx)


    def step(self, state, dt, dx):
        """
        One implicit-explicit step on the current nodes followed by motion
        and resampling.

        :rtype: MovingState
        """
        x = state.node_set.points
        min_sep = dx / 2
        L = assemble(state.node_set, self.config,
            LinearOperatorSpec.laplacian(), min_sep)
        laplacian_row_defect(L)

        def explicit(t, u):
            return -0.5 * state.curvature * u + expanding_sphere_forcing(x, t)

        U = imex_euler_advance(L, explicit, state.field, dt, 1, state.time,
            self.params['method'])

        return move_and_resample(MovingState(state.node_set, U, state.time,
            state.radius), dt, dx, self.config, min_sep)


    def solve(self, node_set):
        dx = self.dx or node_set.h
        steps, dt = time_grid(self.params['final_time'],
            self.params['dt_factor'] * dx ** 2)

        state = MovingState(node_set,
            expanding_sphere_exact(node_set.points, 0.0), 0.0,
            expanding_sphere_radius(0.0))
        history = [(0.0, len(node_set), state.radius, 0.0)]

        for _ in range(steps):
            state = self.step(state, dt, dx)
            exact = expanding_sphere_exact(state.node_set.points, state.time)
            history.append((state.time, len(state.node_set), state.radius,
                rel_error(state.field, exact, 'linf')))
            logger.debug('t=%.4f N=%d error=%.3e', *history[-1][:2],
                history[-1][3])

        self.final_state = state

        fields = {'u': np.array(state.field), 'exact': exact}
        stats = {
            'N_final': len(state.node_set),
            'radius': state.radius,
            'history': history,
        }

        return fields, history[-1][3], stats


    def run_on(self, node_set, resolution=None, start=None):
        run = super().run_on(node_set, resolution, start)

        return ProblemRun(run.problem, run.params, run.records,
            self.final_state.node_set, run.fields, run.stats)


def expanding_sphere_conservation(dx, l=2, m=5, **params):
    """
    Runs the expanding-sphere conservation law at grid width *dx*.

    :rtype: ProblemRun
    """
    return ExpandingSphereProblem(l=l, m=m, **params).run(dx)
