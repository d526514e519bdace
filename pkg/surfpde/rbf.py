"""
PHS+poly RBF-FD weights on embedded stencils
"""

import logging
import warnings
from collections import namedtuple
from itertools import combinations_with_replacement
from math import prod

import numpy as np
from cachetools import LRUCache, cached
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve, svd
from scipy.spatial.distance import cdist

from surfpde import constants
from surfpde.stencil import build_stencil
from surfpde.utils import default_normal_count, default_stencil_size, poly_dim


logger = logging.getLogger(__name__)


class InvalidConfig(ValueError):
    """
    Raised when method parameters violate their constraints
    """
    pass


class SingularStencil(ArithmeticError):
    """
    Raised when the stencil system is singular or numerically rank-deficient
    """

    def __init__(self, message, ref_index=None):
        super().__init__(message)
        self.ref_index = ref_index


CollapsedWeights = namedtuple('CollapsedWeights', ['indices', 'values'])

StencilDiagnostics = namedtuple('StencilDiagnostics',
    ['cond_A', 'scale', 'pivot_ratio'])


class PhsPolyConfig:
    """
    PHS+poly method parameters.

    :param m: [optional] odd PHS exponent, at least 3. Defaults to 5.
    :type m: int
    :param l: [optional] augmented polynomial degree. Defaults to 2.
    :type l: int
    :param n_s: [optional] on-surface stencil size. Defaults to
        ``2 C(l + d, l)``.
    :type n_s: int
    :param n_perp: [optional] number of off-surface points. Defaults to the
        smallest admissible even value.
    :type n_perp: int
    :param eps_normal: [optional] off-surface spacing relative to h.
        Defaults to 0.1.
    :type eps_normal: float
    :param dim: [optional] embedding dimension. Defaults to 3.
    :type dim: int
    :param validate: [optional] if *False*, only the basic sanity checks run,
        so that deliberately deficient configurations (e.g. ``n_perp = 0``)
        can be studied. Defaults to *True*.
    :type validate: bool
    :raises InvalidConfig: naming the violated constraint
    """

    __slots__ = ('m', 'l', 'n_s', 'n_perp', 'eps_normal', 'dim')

    def __init__(self, m=constants.DEFAULT_PHS_DEGREE,
            l=constants.DEFAULT_POLY_DEGREE, n_s=None, n_perp=None,
            eps_normal=constants.DEFAULT_EPS_NORMAL, dim=3, validate=True):
        if dim not in (2, 3):
            raise InvalidConfig('dim: embedding dimension must be 2 or 3')

        if n_s is None:
            n_s = default_stencil_size(l, dim)

        if n_perp is None:
            n_perp = default_normal_count(l)

        self.m = int(m)
        self.l = int(l)
        self.n_s = int(n_s)
        self.n_perp = int(n_perp)
        self.eps_normal = float(eps_normal)
        self.dim = dim

        if self.m < 3 or self.m % 2 == 0:
            raise InvalidConfig('m: PHS exponent must be odd and at least 3')

        if self.l < 0:
            raise InvalidConfig('l: polynomial degree must be nonnegative')

        if self.n_s < 1 or self.n_perp < 0:
            raise InvalidConfig('n_s, n_perp: stencil sizes must be positive')

        if not self.eps_normal > 0:
            raise InvalidConfig('eps_normal: must be positive')

        if validate:
            self.validate()


    def validate(self):
        """
        :raises InvalidConfig: if any method constraint is violated
        """
        if self.q > self.l:
            raise InvalidConfig('l: polynomial degree %d below (m - 1)/2 = %d'
                % (self.l, self.q))

        if self.L >= self.n_s + self.n_perp:
            raise InvalidConfig('n_s: polynomial basis size %d must be less '
                'than n_s + n_perp = %d' % (self.L, self.n_s + self.n_perp))

        minimum = default_normal_count(self.l)
        if self.n_perp < minimum:
            rule = 'n_perp > l + 1' if self.l % 2 == 0 else 'n_perp >= l + 1'
            raise InvalidConfig('n_perp: the normal extension requires %s for '
                'l = %d (got %d)' % (rule, self.l, self.n_perp))

        if self.n_perp % 2:
            raise InvalidConfig('n_perp: off-surface points come in pairs '
                'along the normal, so n_perp must be even (got %d)'
                % self.n_perp)


    @property
    def q(self):
        return (self.m - 1) // 2


    @property
    def L(self):
        return poly_dim(self.l, self.dim)


    def replace(self, validate=True, **changes):
        """
        Returns a copy with the provided parameters changed.

        :rtype: PhsPolyConfig
        """
        params = self.as_dict()
        params.update(changes)

        return PhsPolyConfig(validate=validate, **params)


    def as_dict(self):
        return {name: getattr(self, name) for name in self.__slots__}


    def __eq__(self, other):
        return isinstance(other, PhsPolyConfig) and \
            self.as_dict() == other.as_dict()


    def __hash__(self):
        return hash(tuple(self.as_dict().items()))


    def __repr__(self):
        return 'PhsPolyConfig(%s)' % ', '.join('%s=%r' % item
            for item in self.as_dict().items())


class LinearOperatorSpec:
    """
    Linear differential operator applied in the embedding space.

    .. note:: Use the classmethod constructors.
    """

    __slots__ = ('kind', 'axis', 'direction', 'power')

    def __init__(self, kind, axis=None, direction=None, power=1):
        self.kind = kind
        self.axis = axis
        self.direction = None
        self.power = int(power)

        if direction is not None:
            direction = np.asarray(direction, dtype=float)
            if not np.isfinite(direction).all():
                raise InvalidConfig('direction: must be finite')
            self.direction = direction

        if self.power < 1:
            raise InvalidConfig('power: Laplacian power must be at least 1')


    @classmethod
    def identity(cls):
        return cls('identity')


    @classmethod
    def laplacian(cls):
        return cls('laplacian')


    @classmethod
    def gradient(cls, axis=None):
        return cls('gradient', axis=axis)


    @classmethod
    def directional(cls, direction):
        return cls('directional', direction=direction)


    @classmethod
    def laplacian_power(cls, k):
        return cls('laplacian_power', power=k)


    @property
    def order(self):
        """
        Differential order, i.e. the power of the length scale the operator
        carries.
        """
        match self.kind:
            case 'identity':
                return 0
            case 'gradient' | 'directional':
                return 1
            case 'laplacian':
                return 2
            case 'laplacian_power':
                return 2 * self.power

        raise InvalidConfig('Unsupported operator: %s' % self.kind)


    def __repr__(self):
        match self.kind:
            case 'gradient':
                return '<gradient axis=%s>' % self.axis
            case 'laplacian_power':
                return '<laplacian^%d>' % self.power

        return '<%s>' % self.kind


def phs_operator_eval(op, m, x, c, d=None):
    """
    Operator applied to the PHS kernel ``|x - c|^m`` in its first argument
    and evaluated at *x*.

    :param op: operator
    :type op: LinearOperatorSpec
    :param m: odd PHS exponent
    :type m: int
    :param x: evaluation point, shape (d,)
    :type x: array-like
    :param c: center(s), shape (d,) or (n, d)
    :type c: array-like
    :param d: [optional] dimension. Inferred from *x* if not provided.
    :type d: int
    :returns: one value per center; for the full gradient one vector per
        center
    :rtype: np.ndarray
    :raises InvalidConfig: for unsupported operators or ``m < 2k + 1``
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    d = d or x.shape[-1]
    diff = x - c
    r = np.linalg.norm(diff, axis=-1)

    match op.kind:
        case 'identity':
            return r ** m
        case 'gradient':
            g = m * (r ** (m - 2))[..., None] * diff
            return g if op.axis is None else g[..., op.axis]
        case 'directional':
            return m * r ** (m - 2) * (diff @ op.direction)
        case 'laplacian':
            return m * (m + d - 2) * r ** (m - 2)
        case 'laplacian_power':
            k = op.power
            if m - 2 * k < 1:
                raise InvalidConfig('m = %d too small for Laplacian power %d'
                    % (m, k))
            factor = prod((m - 2 * i + 2) * (m + d - 2 * i)
                for i in range(1, k + 1))
            return factor * r ** (m - 2 * k)

    raise InvalidConfig('Unsupported operator: %s' % op.kind)


@cached(cache=LRUCache(maxsize=64))
def monomial_exponents(l, d):
    """
    Exponent vectors of all monomials of total degree at most *l* in *d*
    variables, in graded lexicographic order.

    :rtype: np.ndarray
    """
    rows = []
    for degree in range(l + 1):
        for combination in combinations_with_replacement(range(d), degree):
            rows.append(np.bincount(np.asarray(combination, dtype=int),
                minlength=d))

    exponents = np.array(rows, dtype=int).reshape(-1, d)
    exponents.setflags(write=False)

    return exponents


def poly_basis(l, d, x):
    """
    Monomials of total degree at most *l* evaluated at *x*.

    :param x: point(s), shape (d,) or (n, d)
    :type x: array-like
    :returns: shape (L,) or (n, L)
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    E = monomial_exponents(l, d)

    return np.prod(x[..., None, :] ** E, axis=-1)


@cached(cache=LRUCache(maxsize=256))
def _derivative_matrix(l, d, axis):
    E = monomial_exponents(l, d)
    lookup = {tuple(e): j for j, e in enumerate(E)}
    D = np.zeros((len(E), len(E)))
    for j, e in enumerate(E):
        if e[axis] > 0:
            lowered = e.copy()
            lowered[axis] -= 1
            D[j, lookup[tuple(lowered)]] = e[axis]

    D.setflags(write=False)
    return D


@cached(cache=LRUCache(maxsize=256))
def _laplacian_matrix(l, d, power):
    C = sum(_derivative_matrix(l, d, a) @ _derivative_matrix(l, d, a)
        for a in range(d))
    C = np.linalg.matrix_power(C, power)

    C.setflags(write=False)
    return C


def poly_operator_matrix(op, l, d):
    """
    Matrix ``C`` with ``op p_j = sum_i C[j, i] p_i`` over the monomial basis.

    :rtype: np.ndarray
    """
    match op.kind:
        case 'identity':
            return np.eye(poly_dim(l, d))
        case 'gradient':
            if op.axis is None:
                raise InvalidConfig('Gradient weights need an axis')
            return _derivative_matrix(l, d, op.axis)
        case 'directional':
            return sum(v * _derivative_matrix(l, d, a)
                for a, v in enumerate(op.direction))
        case 'laplacian':
            return _laplacian_matrix(l, d, 1)
        case 'laplacian_power':
            return _laplacian_matrix(l, d, op.power)

    raise InvalidConfig('Unsupported operator: %s' % op.kind)


def poly_operator_eval(op, l, d, x):
    """
    Operator applied to every monomial of :func:`poly_basis`, evaluated
    at *x*.

    :rtype: np.ndarray
    """
    if op.kind == 'gradient' and op.axis is None:
        return np.stack([poly_operator_eval(LinearOperatorSpec.gradient(a),
            l, d, x) for a in range(d)], axis=-1)

    return poly_operator_matrix(op, l, d) @ poly_basis(l, d, x)


def collocation_matrix(points, m, l):
    """
    Symmetric saddle-point matrix ``[A P; P^T 0]`` of the PHS+poly
    interpolant on the provided points.

    :rtype: np.ndarray
    """
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    A = cdist(points, points) ** m
    P = poly_basis(l, d, points)
    Z = np.zeros((P.shape[1], P.shape[1]))

    return np.block([[A, P], [P.T, Z]])


def _stencil_points(node_set, stencil):
    surface = node_set.points[stencil.surface_indices]
    if stencil.n_perp == 0:
        return surface

    return np.vstack([surface, stencil.offsurface_points])


def _describe(stencil):
    if stencil.ref_index is None:
        return 'stencil at %s' % np.array2string(stencil.center, precision=6)

    return 'stencil of node %d' % stencil.ref_index


def full_stencil_weights(node_set, stencil, config, op, condition=True):
    """
    Solves the PHS+poly saddle system on all surface and off-surface stencil
    points, after shifting coordinates to the stencil center and scaling by
    the stencil radius.

    :param node_set: surface nodes
    :type node_set: SurfaceNodeSet
    :param stencil: embedded stencil
    :type stencil: Stencil
    :param config: method parameters
    :type config: PhsPolyConfig
    :param op: operator
    :type op: LinearOperatorSpec
    :param condition: [optional] whether to compute the 1-norm condition
        number of the kernel block. Defaults to *True*.
    :type condition: bool
    :returns: surface weights, off-surface weights and diagnostics
    :rtype: tuple
    :raises SingularStencil: on singular or rank-deficient systems
    """
    X = _stencil_points(node_set, stencil)
    n, d = X.shape
    L = config.L

    Y = X - stencil.center
    scale = np.linalg.norm(Y, axis=1).max()
    if scale == 0:
        raise SingularStencil('Degenerate %s' % _describe(stencil),
            stencil.ref_index)
    Y /= scale

    P = poly_basis(config.l, d, Y)
    U, s, Vt = svd(P, check_finite=False)
    rank = int(np.sum(s > constants.RANK_TOLERANCE * s[0])) if s.size else 0
    if rank == 0:
        raise SingularStencil('Polynomial block vanishes on %s'
            % _describe(stencil), stencil.ref_index)

    origin = np.zeros(d)
    poly_rhs = poly_operator_eval(op, config.l, d, origin)

    # Polynomials vanishing on every stencil point span the rows of Vt
    # beyond the rank; the operator must annihilate them at the center.
    residue = Vt[rank:] @ poly_rhs
    if residue.size and np.abs(residue).max() > \
            constants.NULLSPACE_TOLERANCE * max(np.abs(poly_rhs).max(), 1.0):
        if op.kind != 'laplacian_power':
            raise SingularStencil('Polynomial block rank-deficient on %s '
                '(rank %d of %d)' % (_describe(stencil), rank, L),
                stencil.ref_index)
        logger.debug('Dropping %d vanishing polynomials from the %s image '
            'on %s', L - rank, op.kind, _describe(stencil))

    Q = U[:, :rank]
    A = cdist(Y, Y) ** config.m
    M = np.block([[A, Q], [Q.T, np.zeros((rank, rank))]])

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', LinAlgWarning)
        lu, piv = lu_factor(M, check_finite=False)

    pivots = np.abs(np.diag(lu))
    ratio = pivots.min() / pivots.max()
    if not ratio >= constants.PIVOT_TOLERANCE:
        raise SingularStencil('Singular system on %s (pivot ratio %.3g)'
            % (_describe(stencil), ratio), stencil.ref_index)

    reduced = (Vt[:rank] @ poly_rhs) / s[:rank].reshape((rank,)
        + (1,) * (poly_rhs.ndim - 1))
    rhs = np.concatenate([phs_operator_eval(op, config.m, origin, Y, d),
        reduced])
    weights = lu_solve((lu, piv), rhs, check_finite=False)[:n]
    weights /= scale ** op.order

    cond_A = np.nan
    if condition:
        try:
            cond_A = float(np.linalg.cond(A, 1))
        except np.linalg.LinAlgError:
            cond_A = np.inf

    n_s = stencil.n_s
    return weights[:n_s], weights[n_s:], StencilDiagnostics(cond_A, scale,
        ratio)


def collapse_weights(w_s, w_perp):
    """
    Folds the off-surface weights into the reference node weight:
    ``ŵ_1 = w_1 + sum(w_perp)``.

    :rtype: np.ndarray
    """
    collapsed = np.array(w_s, dtype=float)
    collapsed[0] += np.sum(w_perp)

    return collapsed


def collapse_weights_at_target(w_s, w_perp):
    """
    Collapse for stencils centred at a target that is not a node: the
    extension carries the unknown target value, so
    ``ŵ = w_s / (1 - sum(w_perp))``.

    :rtype: np.ndarray
    :raises SingularStencil: if the off-surface weights sum to one
    """
    denominator = 1.0 - np.sum(w_perp)
    if abs(denominator) < 1e-12:
        raise SingularStencil('Off-surface weights sum to one')

    return np.asarray(w_s, dtype=float) / denominator


def surface_operator_weights(node_set, i, config, op, min_sep=None,
        index=None):
    """
    Collapsed surface weights approximating the surface counterpart of *op*
    at node *i*.

    :rtype: CollapsedWeights
    """
    stencil = build_stencil(node_set, i, config, min_sep, index)
    w_s, w_perp, _ = full_stencil_weights(node_set, stencil, config, op,
        condition=False)

    return CollapsedWeights(stencil.surface_indices,
        collapse_weights(w_s, w_perp))
