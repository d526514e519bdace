"""
Transport on the sphere and the torus with hyperviscosity stabilization
"""

import logging

import numpy as np

from surfpde.analysis import rel_error
from surfpde.geometry import fibonacci_sphere_nodes, torus_nodes
from surfpde.operators import (advection_matrix, as_sparse,
    hyperviscosity_config, hyperviscosity_matrix)
from surfpde.problems.base import BaseProblem
from surfpde.problems.exact import (INITIAL_CONDITIONS, sphere_velocity,
    torus_velocity)
from surfpde.rbf import PhsPolyConfig
from surfpde.timestep import rk4_advance
from surfpde.utils import default_stencil_size, time_grid


logger = logging.getLogger(__name__)


class AdvectionProblem(BaseProblem):
    """
    ``q_t + v·∇_Γq = γ_k Δ^k q`` over one period ``T = 2π`` of a closed
    flow, integrated by RK4 with ``dt = T / (10 v_max sqrt(N))``; the exact
    final state is the initial one. Resolutions are node counts.
    """

    surface = None
    stencil_rule = None
    v_max = 1.0

    defaults = {
        'init': None,
        'l': 4,
        'm': 3,
        'n_s': None,
        'n_perp': 14,
        'eps_normal': 0.2,
        'epsilon_hyper': 1e-3,
        'period': 2 * np.pi,
        'max_growth': 10.0,
    }

    def __init__(self, **params):
        super().__init__(**params)

        choices = INITIAL_CONDITIONS[self.surface]
        if self.params['init'] not in choices:
            raise ValueError('Initial condition on %s must be one of %s'
                % (self.surface, ', '.join(choices)))


    def config(self):
        l = self.params['l']
        n_s = self.params['n_s'] or default_stencil_size(l, 3,
            self.stencil_rule)

        return PhsPolyConfig(m=self.params['m'], l=l, n_s=n_s,
            n_perp=self.params['n_perp'], eps_normal=self.params['eps_normal'])


    def initial(self, x):
        return INITIAL_CONDITIONS[self.surface][self.params['init']](x)


    def velocity(self, x):
        raise NotImplementedError


    def operator(self, node_set):
        """
        ``-D_v + γ_k Δ^k`` with *D_v* the frozen-velocity directional
        derivative.

        :rtype: scipy.sparse.csr_matrix
        """
        config = self.config()
        D = advection_matrix(node_set, config,
            self.velocity(node_set.points))
        H = hyperviscosity_matrix(node_set, hyperviscosity_config(config),
            self.params['epsilon_hyper'])

        return (as_sparse(H) - as_sparse(D)).tocsr()


    def time_step(self, N):
        """
        Steps per period and the step size.

        :rtype: tuple[int, float]
        """
        T = self.params['period']

        return time_grid(T, T / (10 * self.v_max * np.sqrt(N)))


    def solve(self, node_set):
        q0 = self.initial(node_set.points)
        steps, dt = self.time_step(len(node_set))
        logger.debug('%s: %d RK4 steps of %.3e', self.name, steps, dt)

        q = rk4_advance(self.operator(node_set), q0, dt, steps,
            max_growth=self.params['max_growth'])
        stats = {'max_growth': float(np.abs(q).max() / np.abs(q0).max())}

        return {'q': q, 'exact': q0}, rel_error(q, q0, 'l2'), stats


class SphereAdvectionProblem(AdvectionProblem):
    """
    Solid-body rotation over the poles on the unit sphere.
    """

    name = 'advect_sphere'
    surface = 'sphere'
    stencil_rule = 'diffusion'
    defaults = dict(AdvectionProblem.defaults, init='gaussian_bell',
        alpha=np.pi / 2)

    def discretize(self, resolution):
        return fibonacci_sphere_nodes(int(resolution))


    def velocity(self, x):
        return sphere_velocity(x, self.params['alpha'])


class TorusAdvectionProblem(AdvectionProblem):
    """
    Transport along a (3, 2) torus knot on the torus ``R = 1``, ``r = 1/3``.
    """

    name = 'advect_torus'
    surface = 'torus'
    stencil_rule = 'advection'
    v_max = 4.1
    defaults = dict(AdvectionProblem.defaults, init='two_gaussian_bells',
        eps_normal=0.5, epsilon_hyper=1e-2)

    def discretize(self, resolution):
        return torus_nodes(int(resolution))


    def velocity(self, x):
        return torus_velocity(x)


def advect_sphere(init, l, N, **params):
    """
    :rtype: ProblemRun
    :raises BlowUp: if the norm grows more than tenfold
    """
    return SphereAdvectionProblem(init=init, l=l, **params).run(N)


def advect_torus(init, l, N, **params):
    """
    :rtype: ProblemRun
    :raises BlowUp: if the norm grows more than tenfold
    """
    return TorusAdvectionProblem(init=init, l=l, **params).run(N)
