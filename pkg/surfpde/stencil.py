"""
Nearest-neighbor search and embedded stencils
"""

import logging

import numpy as np
from scipy.spatial import cKDTree


logger = logging.getLogger(__name__)


class InsufficientNeighbors(ValueError):
    """
    Raised when not enough admissible neighbors exist for a stencil
    """
    pass


class NeighborIndex:
    """
    Exact k-nearest-neighbor index over a fixed set of points; distance ties
    are broken by the smaller point index.

    :param points: coordinates of shape (N, d)
    :type points: array-like
    """

    def __init__(self, points):
        self.points = np.asarray(points, dtype=float)
        self.tree = cKDTree(self.points)


    def __len__(self):
        return len(self.points)


    def _resolve_tie(self, x, k, radius):
        candidates = np.asarray(self.tree.query_ball_point(x,
            radius * (1 + 1e-12) + 1e-300), dtype=int)
        distances = np.linalg.norm(self.points[candidates] - x, axis=1)
        order = np.lexsort((candidates, distances))[:k]

        return distances[order], candidates[order]


    def query(self, x, k):
        """
        Returns the *k* nearest points to each query point sorted by distance
        and then by index.

        :param x: query point(s), shape (d,) or (M, d)
        :type x: array-like
        :param k: number of neighbors, capped at the number of points
        :type k: int
        :returns: distances and indices, each of shape (M, k)
        :rtype: tuple[np.ndarray, np.ndarray]
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        N = len(self.points)
        k = min(k, N)
        kk = min(k + 1, N)

        distances, indices = self.tree.query(x, k=kk)
        distances = np.reshape(distances, (len(x), kk))
        indices = np.reshape(indices, (len(x), kk))

        order = np.lexsort((indices, distances), axis=-1)
        distances = np.take_along_axis(distances, order, axis=-1)
        indices = np.take_along_axis(indices, order, axis=-1)

        if kk > k:
            for row in np.flatnonzero(distances[:, k - 1] == distances[:, k]):
                distances[row, :k], indices[row, :k] = self._resolve_tie(
                    x[row], k, distances[row, k - 1])

        return distances[:, :k], indices[:, :k]


def build_neighbor_index(node_set):
    """
    :param node_set: nodes to index
    :type node_set: SurfaceNodeSet
    :rtype: NeighborIndex
    """
    return NeighborIndex(node_set.points)


class Stencil:
    """
    Embedded stencil: surface neighbors of a center plus the off-surface
    points ``center ± j ε h n`` for ``j = 1, ..., n_perp / 2``, ordered
    ``+1, -1, +2, -2, ...``

    .. note:: *ref_index* is *None* for stencils centred at points that are
        not nodes (interpolation targets).
    """

    __slots__ = ('ref_index', 'surface_indices', 'offsurface_points',
        'eps_normal', 'spacing', 'center', 'normal')

    def __init__(self, ref_index, surface_indices, center, normal,
            n_perp, eps_normal, h):
        self.ref_index = ref_index
        self.surface_indices = np.asarray(surface_indices, dtype=int)
        self.center = np.asarray(center, dtype=float)
        self.normal = np.asarray(normal, dtype=float)
        self.eps_normal = eps_normal
        self.spacing = eps_normal * h
        self.offsurface_points = offsurface_points(self.center, self.normal,
            n_perp, self.spacing)


    @property
    def n_s(self):
        return len(self.surface_indices)


    @property
    def n_perp(self):
        return len(self.offsurface_points)


    def __repr__(self):
        return '<Stencil ref=%s n_s=%d n_perp=%d>' % (self.ref_index,
            self.n_s, self.n_perp)


def offsurface_points(center, normal, n_perp, spacing):
    levels = np.repeat(np.arange(1, n_perp // 2 + 1), 2)
    signs = np.tile([1.0, -1.0], n_perp // 2)

    return center + (signs * levels * spacing)[:, None] * normal


def _select(index, x, n_s, min_sep):
    N = len(index)
    if N < n_s:
        raise InsufficientNeighbors('Requested %d neighbors out of %d nodes'
            % (n_s, N))

    if min_sep is None:
        return index.query(x, n_s)[1][0]

    k = min(2 * n_s, N)
    while True:
        candidates = index.query(x, k)[1][0]
        accepted = []
        for c in candidates:
            p = index.points[c]
            if all(np.linalg.norm(index.points[a] - p) >= min_sep
                    for a in accepted):
                accepted.append(c)
                if len(accepted) == n_s:
                    return np.asarray(accepted, dtype=int)

        if k == N:
            raise InsufficientNeighbors('Only %d of %d neighbors separated '
                'by %g' % (len(accepted), n_s, min_sep))

        k = min(2 * k, N)


def build_stencil(node_set, i, config, min_sep=None, index=None):
    """
    Stencil at node *i*: its n_s nearest nodes (nearest first, starting with
    *i* itself) and n_perp equispaced points along its normal.

    :param node_set: surface nodes
    :type node_set: SurfaceNodeSet
    :param i: reference node index
    :type i: int
    :param config: method parameters
    :type config: PhsPolyConfig
    :param min_sep: [optional] minimum separation between accepted stencil
        members; candidates closer than this to an accepted member are
        skipped greedily in order of distance
    :type min_sep: float
    :param index: [optional] prebuilt neighbor index
    :type index: NeighborIndex
    :rtype: Stencil
    :raises InsufficientNeighbors: if fewer than n_s admissible nodes exist
    """
    if index is None:
        index = build_neighbor_index(node_set)

    center = node_set.points[i]
    surface = _select(index, center, config.n_s, min_sep)

    return Stencil(i, surface, center, node_set.normals[i], config.n_perp,
        config.eps_normal, node_set.h)


def build_target_stencil(source, x, normal, config, min_sep=None,
        index=None):
    """
    Stencil at an arbitrary point near the source surface: the n_s source
    nodes nearest to *x* plus the normal extension at *x*.

    :rtype: Stencil
    """
    if index is None:
        index = build_neighbor_index(source)

    surface = _select(index, x, config.n_s, min_sep)

    return Stencil(None, surface, x, normal, config.n_perp,
        config.eps_normal, source.h)
