"""
Surface Poisson problem with Dirichlet data on the lower half
"""

import logging

import numpy as np
from scipy.sparse import csr_matrix

from surfpde.analysis import rel_error
from surfpde.geometry import IMPLICIT_SURFACES, implicit_surface_nodes
from surfpde.operators import assemble_rows
from surfpde.problems.base import BaseProblem
from surfpde.problems.exact import TEST_FUNCTIONS, poisson_forcing
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig
from surfpde.timestep import linear_solve


logger = logging.getLogger(__name__)


class PoissonProblem(BaseProblem):
    """
    ``-Δ_Γu = f`` on ``z >= 0`` with ``u = g`` on ``z < 0``, where *f* and
    *g* come from a known test function. Resolutions are target spacings.

    :param surface: [optional] *sphere* or *tooth*. Defaults to *sphere*.
    :param test: [optional] *u1* or *u2*. Defaults to *u2*.
    :param l: [optional] polynomial degree. Defaults to 2.
    :param m: [optional] PHS exponent. Defaults to 5.
    :param n_s: [optional] stencil size
    :param n_perp: [optional] off-surface points. Defaults to 10.
    :param eps_normal: [optional] off-surface spacing. Defaults to 0.05.
    :param seed: [optional] node thinning seed. Defaults to 0.
    :param method: [optional] linear solver. Defaults to *auto*.
    """

    name = 'poisson'
    defaults = {
        'surface': 'sphere',
        'test': 'u2',
        'l': 2,
        'm': 5,
        'n_s': None,
        'n_perp': 10,
        'eps_normal': 0.05,
        'seed': 0,
        'method': 'auto',
    }

    def __init__(self, **params):
        super().__init__(**params)

        if self.params['surface'] not in ('sphere', 'tooth'):
            raise ValueError('Poisson problem runs on sphere or tooth, got %s'
                % self.params['surface'])

        if self.params['test'] not in TEST_FUNCTIONS:
            raise ValueError('Unknown test function: %s' % self.params['test'])

        self.surface = IMPLICIT_SURFACES[self.params['surface']]()
        self.config = PhsPolyConfig(m=self.params['m'], l=self.params['l'],
            n_s=self.params['n_s'], n_perp=self.params['n_perp'],
            eps_normal=self.params['eps_normal'])


    def discretize(self, resolution):
        return implicit_surface_nodes(self.surface, float(resolution),
            self.params['seed'])


    def system(self, node_set):
        """
        Sparse system with Laplacian rows at ``z >= 0`` and identity rows
        below, and its right-hand side.

        :rtype: tuple[scipy.sparse.csr_matrix, np.ndarray]
        """
        x = node_set.points
        N = len(node_set)
        function = TEST_FUNCTIONS[self.params['test']]

        interior = np.flatnonzero(x[:, 2] >= 0)
        boundary = np.flatnonzero(x[:, 2] < 0)
        columns, values = assemble_rows(node_set, self.config,
            LinearOperatorSpec.laplacian(), rows=interior)

        n_s = self.config.n_s
        A = csr_matrix((
            np.concatenate([-values.ravel(), np.ones(len(boundary))]),
            (np.concatenate([np.repeat(interior, n_s), boundary]),
             np.concatenate([columns.ravel(), boundary]))),
            shape=(N, N))

        b = function.value(x)
        b[interior] = poisson_forcing(self.surface, function, x[interior])
        logger.debug('Poisson system: %d interior, %d Dirichlet rows',
            len(interior), len(boundary))

        return A, b


    def solve(self, node_set):
        A, b = self.system(node_set)
        u = linear_solve(A, b, self.params['method'])
        exact = TEST_FUNCTIONS[self.params['test']].value(node_set.points)

        return {'u': u, 'exact': exact}, rel_error(u, exact, 'linf'), {}


def poisson_bvp(surface, test_fn, l, m, n_perp, eps_normal, h, **params):
    """
    Solves the surface Poisson problem once at spacing *h*.

    :rtype: ProblemRun
    :raises SolverFailure: if the system is singular
    """
    problem = PoissonProblem(surface=surface, test=test_fn, l=l, m=m,
        n_perp=n_perp, eps_normal=eps_normal, **params)

    return problem.run(h)
