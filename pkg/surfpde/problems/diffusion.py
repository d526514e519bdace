"""
Heat equation on the unit sphere and forced diffusion on the torus
"""

import logging

import numpy as np

from surfpde.analysis import rel_error
from surfpde.geometry import fibonacci_sphere_nodes, torus_nodes, torus_surface
from surfpde.operators import as_sparse, assemble
from surfpde.problems.base import BaseProblem
from surfpde.problems.exact import (forced_heat_torus_exact,
    forced_heat_torus_forcing, heat_sphere_exact)
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig
from surfpde.timestep import rk4_advance
from surfpde.utils import default_stencil_size, time_grid


logger = logging.getLogger(__name__)


class DiffusionProblem(BaseProblem):
    """
    RK4 on ``u' = Δ_h u + f`` with ``dt = dt_factor / N``. Resolutions are
    node counts.
    """

    defaults = {
        'l': 4,
        'm': 5,
        'n_s': None,
        'n_perp': 14,
        'eps_normal': 0.2,
        'dt_factor': 0.5,
        'norm': 'linf',
    }

    def config(self):
        l = self.params['l']
        n_s = self.params['n_s'] or default_stencil_size(l, 3, 'diffusion')

        return PhsPolyConfig(m=self.params['m'], l=l, n_s=n_s,
            n_perp=self.params['n_perp'], eps_normal=self.params['eps_normal'])


    def operator(self, node_set):
        return assemble(node_set, self.config(), LinearOperatorSpec.laplacian())


    def advance(self, node_set, rhs, u0):
        steps, dt = time_grid(self.params['final_time'],
            self.params['dt_factor'] / len(node_set))
        logger.debug('%s: %d RK4 steps of %.3e', self.name, steps, dt)

        return rk4_advance(rhs, u0, dt, steps)


class HeatSphereProblem(DiffusionProblem):
    """
    ``u_t = Δ_Γu`` on the unit sphere against the truncated spherical
    harmonic series, up to ``t = 0.5``.
    """

    name = 'heat_sphere'
    defaults = dict(DiffusionProblem.defaults, final_time=0.5, terms=30)

    def discretize(self, resolution):
        return fibonacci_sphere_nodes(int(resolution))


    def solve(self, node_set):
        x = node_set.points
        terms = self.params['terms']
        u0 = heat_sphere_exact(x, 0.0, terms)
        u = self.advance(node_set, self.operator(node_set), u0)
        exact = heat_sphere_exact(x, self.params['final_time'], terms)

        return {'u': u, 'exact': exact}, \
            rel_error(u, exact, self.params['norm']), {}


class ForcedHeatTorusProblem(DiffusionProblem):
    """
    ``u_t = Δ_Γu + f`` on the torus with *f* making
    ``(1/8) exp(-5t) x (x⁴ - 10x²y² + 5y⁴)(x² + y² - 60z²)`` exact, up to
    ``t = 0.2``.
    """

    name = 'heat_torus'
    defaults = dict(DiffusionProblem.defaults, final_time=0.2)

    def discretize(self, resolution):
        return torus_nodes(int(resolution))


    def solve(self, node_set):
        x = node_set.points
        L = as_sparse(self.operator(node_set))
        profile = forced_heat_torus_forcing(x, torus_surface())

        def rhs(t, u):
            return L @ u + np.exp(-5 * t) * profile

        u0 = forced_heat_torus_exact(x, 0.0)
        u = self.advance(node_set, rhs, u0)
        exact = forced_heat_torus_exact(x, self.params['final_time'])

        return {'u': u, 'exact': exact}, \
            rel_error(u, exact, self.params['norm']), {}


def heat_sphere(l, m, N, **params):
    """
    :rtype: ProblemRun
    :raises BlowUp: if the integration diverges
    """
    return HeatSphereProblem(l=l, m=m, **params).run(N)


def forced_heat_torus(l, m, N, **params):
    """
    :rtype: ProblemRun
    :raises BlowUp: if the integration diverges
    """
    return ForcedHeatTorusProblem(l=l, m=m, **params).run(N)
