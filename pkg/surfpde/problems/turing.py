"""
Reaction-diffusion systems on static surfaces: two-species Turing patterns
and the cross-diffusion system
"""

import logging

import numpy as np
from scipy.sparse import block_diag

from surfpde import constants
from surfpde.geometry import (IMPLICIT_SURFACES, fibonacci_sphere_nodes,
    implicit_surface_nodes, torus_nodes)
from surfpde.operators import as_sparse, assemble
from surfpde.problems.base import BaseProblem
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig
from surfpde.timestep import imex_block_advance, sbdf_advance
from surfpde.utils import time_grid


logger = logging.getLogger(__name__)


class TuringParams:
    """
    Coefficients of

    ``u_t = δ_u Δu + α u (1 - τ1 v²) + v (1 - τ2 u)``

    ``v_t = δ_v Δv + β v (1 + (α τ1 / β) u v) + u (γ + τ2 v)``

    :raises ValueError: for non-positive diffusivities, a vanishing *beta*
        or a non-positive final time
    """

    __slots__ = ('delta_u', 'delta_v', 'alpha', 'beta', 'gamma', 'tau1',
        'tau2', 'final_time')

    def __init__(self, delta_u, delta_v, alpha, beta, gamma, tau1, tau2,
            final_time):
        if not (delta_u > 0 and delta_v > 0):
            raise ValueError('Diffusivities must be positive')

        if beta == 0:
            raise ValueError('beta must be nonzero')

        if not final_time > 0:
            raise ValueError('Final time must be positive')

        self.delta_u = float(delta_u)
        self.delta_v = float(delta_v)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.gamma = float(gamma)
        self.tau1 = float(tau1)
        self.tau2 = float(tau2)
        self.final_time = float(final_time)


    def __repr__(self):
        return 'TuringParams(%s)' % ', '.join('%s=%r' % (name,
            getattr(self, name)) for name in self.__slots__)


    @classmethod
    def from_delta_v(cls, delta_v, **coefficients):
        """
        Parameters with ``δ_u = 0.516 δ_v``.
        """
        return cls(0.516 * delta_v, delta_v, **coefficients)


    def reaction(self, u, v):
        """
        :rtype: tuple[np.ndarray, np.ndarray]
        """
        f = self.alpha * u * (1 - self.tau1 * v * v) + v * (1 - self.tau2 * u)
        g = self.beta * v + self.alpha * self.tau1 * u * v * v \
            + u * (self.gamma + self.tau2 * v)

        return f, g


TURING_PRESETS = {
    'spots': TuringParams.from_delta_v(4.5e-3, alpha=0.899, beta=-0.91,
        gamma=-0.899, tau1=0.02, tau2=0.2, final_time=600),
    'stripes': TuringParams.from_delta_v(2.1e-3, alpha=0.899, beta=-0.91,
        gamma=-0.899, tau1=3.5, tau2=0, final_time=6000),
}


def count_spacing(surface, N, seed=0):
    """
    Spacing at which :func:`implicit_surface_nodes` yields about *N* nodes,
    scaled from a coarse pass with counts proportional to ``h^-2``.

    :param surface: the implicit surface
    :type surface: ImplicitSurface
    :param N: target node count
    :type N: int
    :rtype: float
    """
    h0 = constants.CALIBRATION_SPACING
    coarse = implicit_surface_nodes(surface, h0, seed)

    return h0 * np.sqrt(len(coarse) / N)


def _surface_nodes(surface, N, h=None, seed=0):
    match surface:
        case 'torus':
            return torus_nodes(N)
        case 'sphere':
            return fibonacci_sphere_nodes(N)

    if surface not in IMPLICIT_SURFACES:
        raise ValueError('Unsupported surface: %s' % surface)

    implicit = IMPLICIT_SURFACES[surface]()
    h = h or count_spacing(implicit, N, seed)
    logger.debug('%s nodes at spacing %.4g for N=%d', surface, h, N)

    return implicit_surface_nodes(implicit, h, seed)


def _statistics(u, v, second='v'):
    return {
        'u_min': float(u.min()),
        'u_max': float(u.max()),
        'u_std': float(u.std()),
        second + '_std': float(v.std()),
    }


class TuringProblem(BaseProblem):
    """
    Two-species Turing system integrated by SBDF2 (bootstrapped by SBDF1)
    from seeded uniform random data in ``[-amplitude, amplitude]``.
    Resolutions are node counts. On implicit surfaces such as *tooth* or
    *dziuk* the nodes come from :func:`implicit_surface_nodes` at spacing *h*,
    or at the spacing giving about that many nodes.
    """

    name = 'turing'
    defaults = {
        'pattern': 'spots',
        'surface': 'torus',
        'h': None,
        'l': 6,
        'm': 5,
        'n_s': None,
        'n_perp': 10,
        'eps_normal': 0.1,
        'dt': 0.02,
        'final_time': None,
        'seed': 0,
        'amplitude': 0.5,
        'method': 'bicgstab',
    }

    def __init__(self, **params):
        super().__init__(**params)

        if self.params['pattern'] not in TURING_PRESETS:
            raise ValueError('Unknown pattern: %s' % self.params['pattern'])

        self.coefficients = TURING_PRESETS[self.params['pattern']]
        self.config = PhsPolyConfig(m=self.params['m'], l=self.params['l'],
            n_s=self.params['n_s'], n_perp=self.params['n_perp'],
            eps_normal=self.params['eps_normal'])


    def discretize(self, resolution):
        return _surface_nodes(self.params['surface'], int(resolution),
            self.params['h'], self.params['seed'])


    def initial(self, N):
        rng = np.random.default_rng(self.params['seed'])
        a = self.params['amplitude']

        return rng.uniform(-a, a, N), rng.uniform(-a, a, N)


    def solve(self, node_set):
        N = len(node_set)
        p = self.coefficients
        L = as_sparse(assemble(node_set, self.config,
            LinearOperatorSpec.laplacian()))
        A = block_diag([p.delta_u * L, p.delta_v * L], format='csr')

        def reaction(t, state):
            return np.concatenate(p.reaction(state[:N], state[N:]))

        final_time = self.params['final_time'] or p.final_time
        steps, dt = time_grid(final_time, self.params['dt'])
        u0, v0 = self.initial(N)
        logger.info('Turing %s: N=%d, %d SBDF2 steps', self.params['pattern'],
            N, steps)

        state = sbdf_advance(A, reaction, np.concatenate([u0, v0]), dt, steps,
            order=2, method=self.params['method'])
        u, v = state[:N], state[N:]

        return {'u': u, 'v': v}, None, _statistics(u, v)


def turing_static(node_set, pattern='spots', seed=0, **params):
    """
    Evolves the Turing system on the provided nodes.

    :rtype: ProblemRun
    :raises BlowUp: if the state becomes non-finite
    """
    return TuringProblem(pattern=pattern, seed=seed,
        **params).run_on(node_set)


class CrossDiffusionProblem(BaseProblem):
    """
    ``u_t = Δu + d_w Δw + f1``, ``w_t = d_u Δu + c Δw + f2`` with
    ``f1 = 200 (0.1 - u + u²w)`` and ``f2 = 200 (0.9 - u²w)``, stepped by
    monolithic implicit-explicit Euler from random perturbations of the
    steady state ``(1, 0.9)``. Resolutions are node counts.
    """

    name = 'cross_diffusion'
    defaults = {
        'surface': 'sphere',
        'd_u': 1.0,
        'd_w': 1.0,
        'c': 10.0,
        'l': 2,
        'm': 5,
        'n_s': None,
        'n_perp': 14,
        'eps_normal': 0.2,
        'dt': 0.002,
        'final_time': 0.75,
        'seed': 0,
        'amplitude': 0.01,
        'method': 'auto',
    }

    def discretize(self, resolution):
        surface = self.params['surface']
        if surface not in ('sphere', 'torus'):
            raise ValueError('Cross-diffusion runs on sphere or torus, got %s'
                % surface)

        return _surface_nodes(surface, int(resolution))


    def solve(self, node_set):
        p = self.params
        N = len(node_set)
        config = PhsPolyConfig(m=p['m'], l=p['l'], n_s=p['n_s'],
            n_perp=p['n_perp'], eps_normal=p['eps_normal'])
        L = as_sparse(assemble(node_set, config,
            LinearOperatorSpec.laplacian()))

        def f1(t, u, w):
            return 200 * (0.1 - u + u * u * w)

        def f2(t, u, w):
            return 200 * (0.9 - u * u * w)

        rng = np.random.default_rng(p['seed'])
        u0 = 1.0 + rng.uniform(-p['amplitude'], p['amplitude'], N)
        w0 = 0.9 + rng.uniform(-p['amplitude'], p['amplitude'], N)
        steps, dt = time_grid(p['final_time'], p['dt'])

        u, w = imex_block_advance(L, p['d_w'] * L, p['d_u'] * L, p['c'] * L,
            f1, f2, u0, w0, dt, steps, method=p['method'])

        return {'u': u, 'w': w}, None, _statistics(u, w, 'w')


def cross_diffusion_static(node_set, **params):
    """
    :rtype: ProblemRun
    """
    return CrossDiffusionProblem(**params).run_on(node_set)
