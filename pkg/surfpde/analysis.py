"""
Error norms, empirical orders of convergence and spectra
"""

import logging
from collections import namedtuple

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigs

from surfpde import constants
from surfpde.geometry import unit_circle_nodes
from surfpde.operators import as_sparse, assemble, gradient_matrices
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig, full_stencil_weights
from surfpde.stencil import build_neighbor_index, build_stencil


logger = logging.getLogger(__name__)


class SpectrumError(ArithmeticError):
    """
    Raised when eigenvalues cannot be computed
    """
    pass


SpectrumReport = namedtuple('SpectrumReport',
    ['eigenvalues', 'max_real', 'min_real', 'method'])

ParameterPoint = namedtuple('ParameterPoint',
    ['eps_normal', 'n_perp', 'error', 'normal_gradient', 'cond_A'])


def rel_error(u_num, u_exact, norm='linf'):
    """
    Relative error ``|u_num - u_exact| / |u_exact|`` in the *l2* or *linf*
    norm.

    :rtype: float
    :raises ValueError: on length mismatch or vanishing exact norm
    """
    u_num = np.asarray(u_num, dtype=float)
    u_exact = np.asarray(u_exact, dtype=float)
    if u_num.shape != u_exact.shape:
        raise ValueError('Length mismatch: %s vs %s' % (u_num.shape,
            u_exact.shape))

    order = {'l2': 2, 'linf': np.inf}.get(norm)
    if order is None:
        raise ValueError('Unsupported norm: %s' % norm)

    denominator = np.linalg.norm(u_exact.ravel(), order)
    if denominator == 0:
        raise ValueError('Exact solution has zero norm')

    return float(np.linalg.norm((u_num - u_exact).ravel(), order)
        / denominator)


def eoc(errors, hs):
    """
    Empirical orders ``log(e_i / e_(i+1)) / log(h_i / h_(i+1))``.

    :param errors: errors, one per resolution
    :type errors: list[float]
    :param hs: spacings, decreasing
    :type hs: list[float]
    :rtype: list[float]
    :raises ValueError: on mismatched or too short inputs, zero errors or
        non-decreasing spacings
    """
    errors = np.asarray(errors, dtype=float)
    hs = np.asarray(hs, dtype=float)
    if len(errors) != len(hs) or len(errors) < 2:
        raise ValueError('Need matching errors and spacings, at least two')

    if (errors <= 0).any():
        raise ValueError('Errors must be positive')

    if (np.diff(hs) >= 0).any():
        raise ValueError('Spacings must decrease')

    return list(np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:]))


def spectrum(matrix, mode='dense_full', k=6, tol=1e-8):
    """
    Eigenvalues of an operator matrix: the full spectrum by a dense
    eigensolver (*dense_full*, up to 6000 rows), or the *k* eigenvalues of
    largest real part by implicitly restarted Arnoldi (*extremal*).

    :param matrix: square matrix
    :param mode: [optional] *dense_full* or *extremal*
    :type mode: str
    :param k: [optional] number of extremal eigenvalues. Defaults to 6.
    :type k: int
    :rtype: SpectrumReport
    :raises SpectrumError: on oversize dense requests or Arnoldi failure
    """
    A = as_sparse(matrix)
    N = A.shape[0]

    match mode:
        case 'dense_full':
            if N > constants.DENSE_SPECTRUM_LIMIT:
                raise SpectrumError('Dense spectrum limited to %d rows, got %d'
                    % (constants.DENSE_SPECTRUM_LIMIT, N))
            eigenvalues = scipy.linalg.eigvals(A.toarray(),
                check_finite=False)
        case 'extremal':
            k = min(k, N - 2)
            try:
                eigenvalues = eigs(A, k=k, which='LR', tol=tol,
                    maxiter=max(1000, 10 * N), return_eigenvectors=False)
            except (ArpackNoConvergence, ArpackError) as err:
                raise SpectrumError('Arnoldi iteration failed: %s'
                    % err) from err
        case _:
            raise ValueError('Unsupported spectrum mode: %s' % mode)

    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    order = np.lexsort((eigenvalues.imag, eigenvalues.real))
    eigenvalues = eigenvalues[order]
    report = SpectrumReport(eigenvalues, float(eigenvalues.real.max()),
        float(eigenvalues.real.min()), mode)
    logger.info('Spectrum (%s, N=%d): max Re = %.4g', mode, N,
        report.max_real)

    return report


def imaginary_extent(report):
    """
    Largest absolute imaginary part of the reported eigenvalues.

    :rtype: float
    """
    return float(np.abs(report.eigenvalues.imag).max())


def normal_projection(node_set, config, u, gradients=None):
    """
    Size of the normal component of the discrete surface gradient and of its
    repeated application, ``|n·∇u|_inf`` and ``|n·∇(n·∇u)|_inf``; both vanish
    for an exact constant-along-normal discretization.

    :rtype: tuple[float, float]
    """
    if gradients is None:
        gradients = gradient_matrices(node_set, config)

    n = node_set.normals

    def project(v):
        return sum(n[:, a] * (G @ v) for a, G in enumerate(gradients))

    first = project(np.asarray(u, dtype=float))
    second = project(first)

    return float(np.abs(first).max()), float(np.abs(second).max())


def max_condition_number(node_set, config, op=None, sample=None):
    """
    Largest 1-norm condition number of the kernel block over the stencils of
    the sampled nodes (all nodes by default).

    :rtype: float
    """
    op = op or LinearOperatorSpec.laplacian()
    index = build_neighbor_index(node_set)
    nodes = range(len(node_set)) if sample is None else sample
    worst = 0.0
    for i in nodes:
        stencil = build_stencil(node_set, i, config, index=index)
        _, _, diagnostics = full_stencil_weights(node_set, stencil, config, op)
        worst = max(worst, diagnostics.cond_A)

    return worst


def parameter_study(eps_values, n_perp_values, N=100, l=2, m=3, n_s=None):
    """
    Laplace-Beltrami accuracy, normal-gradient projection and conditioning on
    the unit circle as functions of the off-surface spacing and count, for
    the test function ``cos 3θ`` (with ``Δ_Γ cos 3θ = -9 cos 3θ``).

    :param eps_values: off-surface spacings relative to h
    :param n_perp_values: off-surface counts (even)
    :param N: [optional] number of circle nodes. Defaults to 100.
    :type N: int
    :rtype: list[ParameterPoint]
    """
    circle = unit_circle_nodes(N)
    x, y = circle.points[:, 0], circle.points[:, 1]
    u = x ** 3 - 3 * x * y ** 2
    exact = -9 * u

    results = []
    for eps_normal in eps_values:
        for n_perp in n_perp_values:
            config = PhsPolyConfig(m=m, l=l, n_s=n_s, n_perp=n_perp,
                eps_normal=eps_normal, dim=2, validate=False)
            L = assemble(circle, config, LinearOperatorSpec.laplacian())
            projection, _ = normal_projection(circle, config, u)
            cond_A = max_condition_number(circle, config)
            results.append(ParameterPoint(eps_normal, n_perp,
                rel_error(L @ u, exact), projection, cond_A))
            logger.debug('eps=%g n_perp=%d: %s', eps_normal, n_perp,
                results[-1])

    return results
