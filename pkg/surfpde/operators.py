"""
Global sparse differentiation and interpolation matrices assembled from
collapsed stencil weights
"""

import builtins
import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.sparse import csr_matrix, issparse

from surfpde import io
from surfpde.rbf import (InvalidConfig, LinearOperatorSpec, collapse_weights,
    collapse_weights_at_target, full_stencil_weights)
from surfpde.stencil import (build_neighbor_index, build_stencil,
    build_target_stencil)
from surfpde.utils import hyperviscosity_coefficient, hyperviscosity_power


try:
    builtins.profile
except AttributeError:
    def profile(func):
        return func

    builtins.profile = profile


logger = logging.getLogger(__name__)

_num_threads = None


class AssemblyError(ArithmeticError):
    """
    Raised when the weights of some row cannot be computed
    """

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


def set_num_threads(threads):
    """
    Caps the number of worker threads used for row assembly. *None* restores
    the default, read from ``SURFPDE_THREADS`` (1 if unset).
    """
    global _num_threads
    _num_threads = threads


def get_num_threads():
    if _num_threads is not None:
        return max(1, int(_num_threads))

    return max(1, int(os.environ.get('SURFPDE_THREADS', '1') or 1))


class OperatorMatrix:
    """
    Row-compressed matrix with exactly n_s stored entries per row and
    strictly increasing column indices within each row. Stored zeros are
    kept.

    :param indices: column indices, shape (rows, n_s)
    :type indices: np.ndarray
    :param values: entries, shape (rows, n_s)
    :type values: np.ndarray
    :param n_cols: number of columns
    :type n_cols: int
    :param label: [optional] description
    :type label: str
    :raises AssemblyError: on non-finite entries or repeated columns
    """

    __slots__ = ('csr', 'stencil_size', 'label')

    def __init__(self, indices, values, n_cols, label=''):
        indices = np.asarray(indices, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        rows, n_s = indices.shape

        order = np.argsort(indices, axis=1, kind='stable')
        indices = np.take_along_axis(indices, order, axis=1)
        values = np.take_along_axis(values, order, axis=1)

        if n_s > 1 and (np.diff(indices, axis=1) <= 0).any():
            row = int(np.argmax((np.diff(indices, axis=1) <= 0).any(axis=1)))
            raise AssemblyError('Repeated column in row %d' % row, row)

        if not np.isfinite(values).all():
            row = int(np.argmax(~np.isfinite(values).all(axis=1)))
            raise AssemblyError('Non-finite weight in row %d' % row, row)

        indptr = np.arange(rows + 1, dtype=np.int64) * n_s
        self.csr = csr_matrix((values.ravel(), indices.ravel(), indptr),
            shape=(rows, n_cols))
        self.stencil_size = n_s
        self.label = label


    @property
    def shape(self):
        return self.csr.shape


    def __matmul__(self, other):
        return self.csr @ other


    def __repr__(self):
        return '<OperatorMatrix %s %dx%d n_s=%d>' % (self.label or '',
            *self.shape, self.stencil_size)


    def row_nnz(self):
        return np.diff(self.csr.indptr)


    def values(self):
        return self.csr.data.reshape(self.shape[0], self.stencil_size)


    def columns(self):
        return self.csr.indices.reshape(self.shape[0], self.stencil_size)


    def scaled(self, factor):
        """
        :rtype: OperatorMatrix
        """
        return OperatorMatrix(self.columns(), factor * self.values(),
            self.shape[1], self.label)


    def tocsr(self):
        return self.csr.copy()


    def toarray(self):
        return self.csr.toarray()


    def save(self, path):
        """
        Exports in Matrix-Market coordinate format.
        """
        io.write_matrix_market(path, self.csr)


def as_sparse(matrix):
    """
    Plain scipy sparse matrix out of an operator, sparse or dense matrix.
    """
    if isinstance(matrix, OperatorMatrix):
        return matrix.csr

    if issparse(matrix):
        return matrix.tocsr()

    return csr_matrix(np.atleast_2d(np.asarray(matrix, dtype=float)))


def _row_weights(node_set, i, config, op, min_sep, index):
    stencil = build_stencil(node_set, i, config, min_sep, index)
    w_s, w_perp, _ = full_stencil_weights(node_set, stencil, config, op,
        condition=False)

    return stencil.surface_indices, collapse_weights(w_s, w_perp)


def _run_chunks(task, items, threads):
    items = list(items)
    if threads <= 1 or len(items) < 2 * threads:
        return [task(items)]

    chunks = [items[j::threads] for j in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(task, chunks))


@profile
def assemble_rows(node_set, config, op, rows=None, min_sep=None, index=None,
        threads=None):
    """
    Collapsed weights of the selected rows.

    :param op: operator, or a callable mapping a node index to its operator
    :type op: LinearOperatorSpec | callable
    :returns: column indices and values, each of shape (len(rows), n_s)
    :rtype: tuple[np.ndarray, np.ndarray]
    :raises AssemblyError: naming the first node whose weights fail
    """
    N = len(node_set)
    rows = np.arange(N) if rows is None else np.asarray(rows, dtype=int)
    if index is None:
        index = build_neighbor_index(node_set)
    threads = threads or get_num_threads()
    operator = op if callable(op) else (lambda i: op)

    indices = np.empty((len(rows), config.n_s), dtype=np.int64)
    values = np.empty((len(rows), config.n_s))
    position = {int(i): j for j, i in enumerate(rows)}

    def task(chunk):
        for i in chunk:
            try:
                cols, w = _row_weights(node_set, int(i), config, operator(i),
                    min_sep, index)
            except (ArithmeticError, ValueError) as err:
                raise AssemblyError('Weights failed at node %d: %s'
                    % (i, err), int(i)) from err
            j = position[int(i)]
            indices[j] = cols
            values[j] = w

    _run_chunks(task, rows, threads)

    return indices, values


def assemble(node_set, config, op, min_sep=None, index=None, threads=None):
    """
    Sparse matrix whose row *i* holds the collapsed weights of *op* at
    node *i*.

    :param node_set: surface nodes
    :type node_set: SurfaceNodeSet
    :param config: method parameters
    :type config: PhsPolyConfig
    :param op: operator, or a callable mapping a node index to its operator
    :type op: LinearOperatorSpec | callable
    :param min_sep: [optional] stencil minimum separation
    :type min_sep: float
    :param threads: [optional] worker threads. Defaults to
        :func:`get_num_threads`.
    :type threads: int
    :rtype: OperatorMatrix
    :raises AssemblyError: naming the first node whose weights fail
    """
    indices, values = assemble_rows(node_set, config, op, None, min_sep,
        index, threads)
    label = getattr(op, 'kind', 'operator')
    logger.debug('Assembled %s on %d nodes (n_s=%d)', label, len(node_set),
        config.n_s)

    return OperatorMatrix(indices, values, len(node_set), label)


def advection_matrix(node_set, config, velocity, min_sep=None, index=None):
    """
    Per-node directional derivative along the frozen velocity ``v(x_i)``.

    :param velocity: tangent vectors, shape (N, d)
    :type velocity: array-like
    :rtype: OperatorMatrix
    """
    velocity = np.asarray(velocity, dtype=float)
    if velocity.shape != node_set.points.shape:
        raise InvalidConfig('velocity: expected shape %s' %
            (node_set.points.shape,))
    if not np.isfinite(velocity).all():
        raise InvalidConfig('velocity: must be finite')

    def operator(i):
        return LinearOperatorSpec.directional(velocity[i])

    matrix = assemble(node_set, config, operator, min_sep, index)
    matrix.label = 'advection'

    return matrix


def gradient_matrices(node_set, config, min_sep=None):
    """
    Cartesian gradient-component matrices; on the surface these approximate
    the surface gradient components.

    :rtype: list[OperatorMatrix]
    """
    index = build_neighbor_index(node_set)

    return [assemble(node_set, config, LinearOperatorSpec.gradient(a),
        min_sep, index) for a in range(node_set.dim)]


def hyperviscosity_config(config):
    """
    Copy of *config* whose PHS exponent is large enough for the
    hyperviscosity power ``k = floor(ln n_s)``.

    :rtype: PhsPolyConfig
    """
    k = hyperviscosity_power(config.n_s)

    return config.replace(validate=False, m=max(config.m, 2 * k + 1))


def hyperviscosity_matrix(node_set, config, epsilon_hyper, k=None,
        min_sep=None):
    """
    ``γ_k Δ^k`` with ``γ_k = ε (-1)^(k+1) h^(2k+1)`` and
    ``k = floor(ln n_s)``.

    :param epsilon_hyper: hyperviscosity scaling
    :type epsilon_hyper: float
    :param k: [optional] Laplacian power. Defaults to ``floor(ln n_s)``.
    :type k: int
    :rtype: OperatorMatrix
    :raises InvalidConfig: if ``m < 2k + 1``
    """
    if k is None:
        k = hyperviscosity_power(config.n_s)

    if config.m < 2 * k + 1:
        raise InvalidConfig('m: hyperviscosity power %d requires m >= %d'
            % (k, 2 * k + 1))

    if epsilon_hyper == 0:
        index = build_neighbor_index(node_set)
        _, columns = index.query(node_set.points, config.n_s)
        return OperatorMatrix(columns, np.zeros(columns.shape),
            len(node_set), 'hyperviscosity')

    gamma = hyperviscosity_coefficient(epsilon_hyper, node_set.h, k)
    logger.debug('Hyperviscosity k=%d gamma=%.3e', k, gamma)
    matrix = assemble(node_set, config, LinearOperatorSpec.laplacian_power(k),
        min_sep).scaled(gamma)
    matrix.label = 'hyperviscosity'

    return matrix


def interpolation_matrix(source, config, targets, target_normals,
        min_sep=None):
    """
    M x N matrix interpolating node values of *source* to points near the
    surface, using identity-operator weights on stencils centred at each
    target with the normal extension at the target.

    :param source: source nodes
    :type source: SurfaceNodeSet
    :param targets: target points, shape (M, d)
    :type targets: array-like
    :param target_normals: unit normals at the targets, shape (M, d)
    :type target_normals: array-like
    :rtype: OperatorMatrix
    :raises AssemblyError: naming the failing target
    """
    targets = np.asarray(targets, dtype=float)
    target_normals = np.asarray(target_normals, dtype=float)
    index = build_neighbor_index(source)
    identity = LinearOperatorSpec.identity()

    indices = np.empty((len(targets), config.n_s), dtype=np.int64)
    values = np.empty((len(targets), config.n_s))

    for t, (x, n) in enumerate(zip(targets, target_normals)):
        try:
            stencil = build_target_stencil(source, x, n, config, min_sep,
                index)
            w_s, w_perp, _ = full_stencil_weights(source, stencil, config,
                identity, condition=False)
            values[t] = collapse_weights_at_target(w_s, w_perp)
        except (ArithmeticError, ValueError) as err:
            raise AssemblyError('Interpolation weights failed at target %d: '
                '%s' % (t, err), t) from err
        indices[t] = stencil.surface_indices

    return OperatorMatrix(indices, values, len(source), 'interpolation')
