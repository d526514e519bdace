"""
Surface node sets: generation, ingestion and characterization
"""

import logging
import os

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import (breadth_first_order, connected_components,
    minimum_spanning_tree)
from scipy.spatial import cKDTree

from surfpde import io


logger = logging.getLogger(__name__)

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


class InvalidNodeSet(ValueError):
    """
    Raised when points or normals violate the node set invariants
    """
    pass


class NormalEstimationError(ValueError):
    """
    Raised when a neighborhood does not determine a normal direction
    """
    pass


class SurfaceNodeSet:
    """
    Immutable sample of a codimension-1 surface: points, unit normals and
    average spacing.

    .. note:: Normals whose length deviates from one by more than 1e-12 are
        normalized on construction; exactly unit normals are stored as given.

    :param points: node coordinates of shape (N, d) with d = 2 or 3
    :type points: array-like
    :param normals: unit normals of shape (N, d)
    :type normals: array-like
    :param h: [optional] average spacing. Computed as the mean
        nearest-neighbor distance if not provided.
    :type h: float
    :param name: [optional] descriptive label
    :type name: str
    :raises InvalidNodeSet: on shape mismatch, non-finite values or
        zero normals
    """

    __slots__ = ('points', 'normals', 'h', 'dim', 'name')

    def __init__(self, points, normals, h=None, name=''):
        points = np.array(points, dtype=float)
        normals = np.array(normals, dtype=float)

        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise InvalidNodeSet('Points must have shape (N, 2) or (N, 3)')

        if normals.shape != points.shape:
            raise InvalidNodeSet('Normals must match points in shape')

        if len(points) < 1:
            raise InvalidNodeSet('Empty node set')

        if not (np.isfinite(points).all() and np.isfinite(normals).all()):
            raise InvalidNodeSet('Non-finite coordinates')

        lengths = np.linalg.norm(normals, axis=1)
        if (lengths == 0).any():
            raise InvalidNodeSet('Zero normal at node %d'
                % int(np.argmin(lengths)))

        off = np.abs(lengths - 1.0) > 1e-12
        if off.any():
            normals[off] /= lengths[off, None]

        if h is None:
            h = average_spacing(points)

        if not h > 0:
            raise InvalidNodeSet('Spacing must be positive')

        points.setflags(write=False)
        normals.setflags(write=False)

        self.points = points
        self.normals = normals
        self.h = float(h)
        self.dim = points.shape[1]
        self.name = name


    def __len__(self):
        return len(self.points)


    def __repr__(self):
        return '<SurfaceNodeSet %s N=%d h=%.4g>' % (self.name or '?',
            len(self), self.h)


    def rigid_motion(self, rotation, translation=None):
        """
        Returns the node set moved by the provided rotation and translation.

        :param rotation: orthogonal (d, d) matrix
        :type rotation: array-like
        :param translation: [optional] shift vector
        :type translation: array-like
        :rtype: SurfaceNodeSet
        """
        rotation = np.asarray(rotation, dtype=float)
        points = self.points @ rotation.T
        if translation is not None:
            points = points + np.asarray(translation, dtype=float)

        return SurfaceNodeSet(points, self.normals @ rotation.T, self.h,
            self.name)


    def permuted(self, order):
        """
        Returns the node set with nodes reordered so that the new node *i* is
        the old node ``order[i]``.

        :rtype: SurfaceNodeSet
        """
        order = np.asarray(order)
        return SurfaceNodeSet(self.points[order], self.normals[order],
            self.h, self.name)


class ImplicitSurface:
    """
    Zero level set of a smooth function on R^3 with analytic derivatives.

    :param level: F, vectorized over arrays of shape (..., 3)
    :type level: callable
    :param gradient: gradient of F, shape (..., 3)
    :type gradient: callable
    :param name: descriptive name
    :type name: str
    :param hessian: [optional] Hessian of F, shape (..., 3, 3)
    :type hessian: callable
    :param bounds: [optional] bounding box ``((xmin, xmax), (ymin, ymax),
        (zmin, zmax))`` enclosing the surface
    :type bounds: tuple
    """

    def __init__(self, level, gradient, name, hessian=None, bounds=None):
        self.level = level
        self.gradient = gradient
        self.hessian = hessian
        self.name = name
        self.bounds = bounds


    def __call__(self, x):
        return self.level(np.asarray(x, dtype=float))


    def unit_normal(self, x):
        g = self.gradient(np.asarray(x, dtype=float))
        return g / np.linalg.norm(g, axis=-1)[..., None]


    def mean_curvature(self, x):
        """
        Divergence of the unit normal field, ``(ΔF - n·HF n) / |∇F|``.

        :raises ValueError: if the surface has no Hessian
        """
        if self.hessian is None:
            raise ValueError('No Hessian available for %s' % self.name)

        x = np.asarray(x, dtype=float)
        g = self.gradient(x)
        H = self.hessian(x)
        norm = np.linalg.norm(g, axis=-1)
        n = g / norm[..., None]
        trace = np.trace(H, axis1=-2, axis2=-1)
        nHn = np.einsum('...i,...ij,...j->...', n, H, n)

        return (trace - nHn) / norm


def sphere_surface(radius=1.0):
    def level(x):
        return np.sum(x * x, axis=-1) - radius ** 2

    def gradient(x):
        return 2 * x

    def hessian(x):
        return np.broadcast_to(2 * np.eye(3), x.shape[:-1] + (3, 3)).copy()

    r = 1.2 * radius
    return ImplicitSurface(level, gradient, 'sphere', hessian,
        ((-r, r), (-r, r), (-r, r)))


def tooth_surface():
    """
    ``x^8 + y^8 + z^8 - (x^2 + y^2 + z^2) = 0``

    .. note:: The origin satisfies the equation with vanishing gradient;
        node generation discards it.
    """
    def level(x):
        return np.sum(x ** 8, axis=-1) - np.sum(x * x, axis=-1)

    def gradient(x):
        return 8 * x ** 7 - 2 * x

    def hessian(x):
        diag = 56 * x ** 6 - 2
        H = np.zeros(x.shape[:-1] + (3, 3))
        for a in range(3):
            H[..., a, a] = diag[..., a]
        return H

    return ImplicitSurface(level, gradient, 'tooth', hessian,
        ((-1.2, 1.2), (-1.2, 1.2), (-1.2, 1.2)))


def torus_surface(R=1.0, r=1.0 / 3):
    """
    ``(R - sqrt(x^2 + y^2))^2 + z^2 - r^2 = 0``
    """
    def level(x):
        rho = np.hypot(x[..., 0], x[..., 1])
        return (R - rho) ** 2 + x[..., 2] ** 2 - r ** 2

    def gradient(x):
        rho = np.hypot(x[..., 0], x[..., 1])
        factor = 2 * (rho - R) / rho
        return np.stack([factor * x[..., 0], factor * x[..., 1],
            2 * x[..., 2]], axis=-1)

    def hessian(x):
        X, Y = x[..., 0], x[..., 1]
        rho = np.hypot(X, Y)
        H = np.zeros(x.shape[:-1] + (3, 3))
        a = 2 * (rho - R) / rho
        b = 2 * R / rho ** 3
        H[..., 0, 0] = a + b * X * X
        H[..., 1, 1] = a + b * Y * Y
        H[..., 0, 1] = H[..., 1, 0] = b * X * Y
        H[..., 2, 2] = 2
        return H

    s = 1.1 * (R + r)
    return ImplicitSurface(level, gradient, 'torus', hessian,
        ((-s, s), (-s, s), (-1.2 * r, 1.2 * r)))


def dziuk_surface():
    """
    ``(x - z^2)^2 + y^2 + z^2 - 1 = 0``
    """
    def level(x):
        X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
        return (X - Z ** 2) ** 2 + Y ** 2 + Z ** 2 - 1

    def gradient(x):
        X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
        w = X - Z ** 2
        return np.stack([2 * w, 2 * Y, -4 * Z * w + 2 * Z], axis=-1)

    def hessian(x):
        X, Z = x[..., 0], x[..., 2]
        H = np.zeros(x.shape[:-1] + (3, 3))
        H[..., 0, 0] = 2
        H[..., 1, 1] = 2
        H[..., 0, 2] = H[..., 2, 0] = -4 * Z
        H[..., 2, 2] = -4 * (X - Z ** 2) + 8 * Z ** 2 + 2
        return H

    return ImplicitSurface(level, gradient, 'dziuk', hessian,
        ((-1.2, 2.2), (-1.2, 1.2), (-1.2, 1.2)))


IMPLICIT_SURFACES = {
    'sphere': sphere_surface,
    'tooth': tooth_surface,
    'torus': torus_surface,
    'dziuk': dziuk_surface,
}


def surface_laplacian_exact(surface, grad_u, hess_u, x):
    """
    Laplace-Beltrami operator of a smooth ambient function restricted to an
    implicit surface:

    ``Δ_Γu = Δu - κ ∂u/∂n - n·(∇²u)n``

    :param surface: implicit surface with Hessian
    :type surface: ImplicitSurface
    :param grad_u: ambient gradient of u at *x*, shape (N, 3)
    :type grad_u: np.ndarray
    :param hess_u: ambient Hessian of u at *x*, shape (N, 3, 3)
    :type hess_u: np.ndarray
    :param x: surface points, shape (N, 3)
    :type x: np.ndarray
    :rtype: np.ndarray
    """
    n = surface.unit_normal(x)
    kappa = surface.mean_curvature(x)
    trace = np.trace(hess_u, axis1=-2, axis2=-1)
    nHn = np.einsum('...i,...ij,...j->...', n, hess_u, n)
    dn = np.einsum('...i,...i->...', n, grad_u)

    return trace - kappa * dn - nHn


def average_spacing(points):
    """
    Mean over all nodes of the distance to the nearest distinct node.

    :param points: coordinates of shape (N, d)
    :type points: array-like
    :rtype: float
    :raises InvalidNodeSet: for less than two points or duplicates
    """
    points = np.asarray(points, dtype=float)
    if len(points) < 2:
        raise InvalidNodeSet('Spacing requires at least two points')

    distances, indices = cKDTree(points).query(points, k=2)
    nearest = distances[:, 1]

    if (nearest == 0).any():
        i = int(np.argmin(nearest))
        raise InvalidNodeSet('Duplicate points at nodes %d and %d'
            % (i, indices[i, 1]))

    return float(nearest.mean())


def fibonacci_sphere_nodes(N):
    """
    Fibonacci lattice on the unit sphere.

    :param N: node count, at least 4
    :type N: int
    :rtype: SurfaceNodeSet
    """
    if N < 4:
        raise InvalidNodeSet('Fibonacci lattice requires N >= 4')

    i = np.arange(N)
    z = 1 - (2 * i + 1) / N
    rho = np.sqrt(1 - z * z)
    phi = i * GOLDEN_ANGLE
    points = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    points /= np.linalg.norm(points, axis=1)[:, None]

    return SurfaceNodeSet(points, points.copy(), name='sphere')


def torus_frame(points, R=1.0):
    """
    Toroidal angle λ and poloidal angle ϑ of points on a torus centred at the
    origin around the z-axis.

    :rtype: tuple[np.ndarray, np.ndarray]
    """
    points = np.asarray(points, dtype=float)
    lam = np.arctan2(points[:, 1], points[:, 0])
    rho = np.hypot(points[:, 0], points[:, 1])
    theta = np.arctan2(points[:, 2], rho - R)

    return lam, theta


def torus_nodes(N_target, R=1.0, r=1.0 / 3):
    """
    Staggered ring lattice on the torus with ring populations proportional to
    the local circumference ``2π (R + r cos ϑ)``.

    :param N_target: approximate node count
    :type N_target: int
    :param R: [optional] major radius. Defaults to 1.
    :type R: float
    :param r: [optional] minor radius. Defaults to 1/3.
    :type r: float
    :rtype: SurfaceNodeSet
    :raises InvalidNodeSet: unless 0 < r < R
    """
    if not 0 < r < R:
        raise InvalidNodeSet('Torus radii must satisfy 0 < r < R')

    spacing = np.sqrt(4 * np.pi ** 2 * R * r / N_target)
    rings = max(3, int(round(2 * np.pi * r / spacing)))
    theta = 2 * np.pi * np.arange(rings) / rings
    circumference = R + r * np.cos(theta)
    counts = np.maximum(3, np.rint(N_target * circumference
        / circumference.sum())).astype(int)

    points, normals = [], []
    for j, (t, count) in enumerate(zip(theta, counts)):
        lam = 2 * np.pi * (np.arange(count) + 0.5 * (j % 2)) / count
        c, s = np.cos(t), np.sin(t)
        normal = np.column_stack([c * np.cos(lam), c * np.sin(lam),
            np.full(count, s)])
        ring = np.column_stack([R * np.cos(lam), R * np.sin(lam),
            np.zeros(count)]) + r * normal
        points.append(ring)
        normals.append(normal)

    points = np.vstack(points)
    normals = np.vstack(normals)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    logger.debug('Torus lattice: %d rings, %d nodes', rings, len(points))

    return SurfaceNodeSet(points, normals, name='torus')


def _newton_project(surface, seeds, iterations=50):
    x = seeds.copy()
    for _ in range(iterations):
        g = surface.gradient(x)
        gg = np.sum(g * g, axis=1)
        gg[gg == 0] = np.inf
        x = x - (surface.level(x) / gg)[:, None] * g

    residual = np.abs(surface.level(x))
    gradient = np.linalg.norm(surface.gradient(x), axis=1)
    radius = np.linalg.norm(x, axis=1)
    converged = np.isfinite(residual) & (residual <= 1e-10 * (1 + radius)) \
        & (gradient > 1e-6 * (1 + radius))

    return x, converged


def _poisson_thin(points, radius, rng):
    order = rng.permutation(len(points))
    neighbors = cKDTree(points).query_ball_point(points, radius)
    blocked = np.zeros(len(points), dtype=bool)
    accepted = []

    for i in order:
        if blocked[i]:
            continue
        accepted.append(i)
        blocked[neighbors[i]] = True

    return np.sort(np.asarray(accepted, dtype=int))


def implicit_surface_nodes(surface, target_h, seed=0):
    """
    Quasi-uniform nodes on an implicit surface: background grid seeds at
    spacing ``target_h / 2`` near the surface are Newton-projected onto the
    zero level set and thinned by Poisson-disk rejection at radius
    ``0.7 target_h``.

    .. note:: Seeds failing to converge within 50 Newton iterations, or
        landing where the gradient vanishes, are discarded.

    :param surface: the implicit surface; its *bounds* must enclose it
    :type surface: ImplicitSurface
    :param target_h: target spacing
    :type target_h: float
    :param seed: [optional] thinning order seed. Defaults to 0.
    :type seed: int
    :rtype: SurfaceNodeSet
    :raises InvalidNodeSet: if no node survives
    """
    if surface.bounds is None:
        raise InvalidNodeSet('Surface %s has no bounding box' % surface.name)

    axes = [np.arange(lo, hi + 0.5 * target_h, 0.5 * target_h)
        for lo, hi in surface.bounds]
    grid = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, 3)

    g = np.linalg.norm(surface.gradient(grid), axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        distance = np.abs(surface.level(grid)) / g
    seeds = grid[np.isfinite(distance) & (distance <= target_h)]

    projected, converged = _newton_project(surface, seeds)
    logger.debug('%s: %d seeds, %d discarded by projection', surface.name,
        len(seeds), int((~converged).sum()))
    projected = projected[converged]

    if len(projected) == 0:
        raise InvalidNodeSet('No seed converged onto %s' % surface.name)

    rng = np.random.default_rng(seed)
    keep = _poisson_thin(projected, 0.7 * target_h, rng)
    points = projected[keep]

    if len(points) < 4:
        raise InvalidNodeSet('Too few nodes on %s at spacing %g'
            % (surface.name, target_h))

    return SurfaceNodeSet(points, surface.unit_normal(points),
        name=surface.name)


def rose_curve_point(r0, k, theta):
    rho = r0 + np.cos(k * theta)
    return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


def rose_curve_speed(r0, k, theta):
    rho = r0 + np.cos(k * theta)
    drho = -k * np.sin(k * theta)
    return np.sqrt(rho * rho + drho * drho)


def rose_curve_nodes(r0, k, h):
    """
    Nodes equispaced in arclength on the rose curve
    ``(r0 + cos kθ)(cos θ, sin θ)``.

    :param r0: radial offset, greater than one
    :type r0: float
    :param k: petal count
    :type k: int
    :param h: target arclength spacing
    :type h: float
    :rtype: SurfaceNodeSet
    """
    if r0 <= 1:
        raise InvalidNodeSet('Rose curve requires r0 > 1')
    if h <= 0:
        raise InvalidNodeSet('Spacing must be positive')

    def speed(t):
        return float(rose_curve_speed(r0, k, np.array(t)))

    breaks = np.linspace(0, 2 * np.pi, 4 * k + 1)
    pieces = [quad(speed, a, b, epsabs=1e-13, epsrel=1e-13)[0]
        for a, b in zip(breaks[:-1], breaks[1:])]
    cumulative = np.concatenate([[0.0], np.cumsum(pieces)])
    length = cumulative[-1]

    N = max(4, int(round(length / h)))
    targets = length * np.arange(N) / N
    theta = np.empty(N)
    for j, s in enumerate(targets):
        idx = min(np.searchsorted(cumulative, s, side='right') - 1, 4 * k - 1)
        a, b = breaks[idx], breaks[idx + 1]
        offset = s - cumulative[idx]
        if offset == 0:
            theta[j] = a
            continue
        theta[j] = brentq(lambda t: quad(speed, a, t, epsabs=1e-13,
            epsrel=1e-13)[0] - offset, a, b, xtol=1e-14)

    points = rose_curve_point(r0, k, theta)
    rho = r0 + np.cos(k * theta)
    drho = -k * np.sin(k * theta)
    tx = drho * np.cos(theta) - rho * np.sin(theta)
    ty = drho * np.sin(theta) + rho * np.cos(theta)
    normals = np.column_stack([ty, -tx])
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    logger.debug('Rose curve length %.6f sampled with %d nodes', length, N)

    return SurfaceNodeSet(points, normals, name='rose')


def unit_circle_nodes(N):
    theta = 2 * np.pi * np.arange(N) / N
    points = np.column_stack([np.cos(theta), np.sin(theta)])

    return SurfaceNodeSet(points, points.copy(), name='circle')


def bumpy_radius(gamma, k, phi):
    return 1 + gamma * np.sin(k * phi)


def bumpy_sphere_nodes(gamma, k, N):
    """
    Fibonacci directions scaled by ``r(φ) = 1 + γ sin(kφ)`` with φ the polar
    angle from the +z axis.

    :param gamma: bump amplitude, ``|gamma| < 1``
    :type gamma: float
    :param k: bump frequency
    :type k: int
    :param N: node count
    :type N: int
    :rtype: SurfaceNodeSet
    """
    if gamma == 0:
        return fibonacci_sphere_nodes(N)

    if not abs(gamma) < 1:
        raise InvalidNodeSet('Bump amplitude must satisfy |gamma| < 1')

    if abs(gamma) * k >= 1:
        logger.warning('Bumpy sphere with |gamma| k = %g >= 1 is strongly '
            'non-convex', abs(gamma) * k)

    base = fibonacci_sphere_nodes(N)
    d = np.array(base.points)
    phi = np.arccos(np.clip(d[:, 2], -1, 1))
    radius = bumpy_radius(gamma, k, phi)
    points = radius[:, None] * d

    s = np.hypot(d[:, 0], d[:, 1])
    e_phi = np.column_stack([d[:, 2] * d[:, 0] / s, d[:, 2] * d[:, 1] / s, -s])
    dr = gamma * k * np.cos(k * phi)
    normals = d - (dr / radius)[:, None] * e_phi
    normals /= np.linalg.norm(normals, axis=1)[:, None]

    return SurfaceNodeSet(points, normals, name='bumpy_sphere')


def estimate_normals(points, k_nn=12):
    """
    Unit normals of a point cloud: smallest principal direction of each
    k-neighborhood, oriented consistently by propagation along a minimum
    spanning tree of the neighborhood graph, with the sign of each connected
    component chosen to point away from its centroid on average.

    :param points: coordinates of shape (N, 3)
    :type points: array-like
    :param k_nn: [optional] neighborhood size. Defaults to 12.
    :type k_nn: int
    :rtype: np.ndarray
    :raises NormalEstimationError: on rank-deficient neighborhoods
    """
    points = np.asarray(points, dtype=float)
    N = len(points)
    if k_nn < 6 or N <= k_nn:
        raise NormalEstimationError('Normal estimation requires N > k_nn >= 6')

    _, neighbors = cKDTree(points).query(points, k=k_nn)
    local = points[neighbors]
    local = local - local.mean(axis=1, keepdims=True)
    covariance = np.einsum('nki,nkj->nij', local, local)
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)

    degenerate = eigenvalues[:, 1] <= 1e-12 * eigenvalues[:, 2]
    if degenerate.any():
        raise NormalEstimationError('Collinear neighborhood at point %d'
            % int(np.argmax(degenerate)))

    normals = eigenvectors[:, :, 0].copy()

    rows = np.repeat(np.arange(N), k_nn - 1)
    cols = neighbors[:, 1:].ravel()
    dots = np.abs(np.einsum('ij,ij->i', normals[rows], normals[cols]))
    graph = coo_matrix((2.0 - dots, (rows, cols)), shape=(N, N)).tocsr()
    graph = graph.maximum(graph.T)
    tree = minimum_spanning_tree(graph)

    count, labels = connected_components(tree, directed=False)
    for component in range(count):
        members = np.flatnonzero(labels == component)
        order, predecessors = breadth_first_order(tree, members[0],
            directed=False, return_predecessors=True)
        for node in order[1:]:
            if normals[node] @ normals[predecessors[node]] < 0:
                normals[node] = -normals[node]

        centroid = points[members].mean(axis=0)
        outward = np.einsum('ij,ij->i', normals[members],
            points[members] - centroid).mean()
        if outward < 0:
            normals[members] = -normals[members]

    logger.debug('Estimated %d normals in %d component(s)', N, count)

    return normals / np.linalg.norm(normals, axis=1)[:, None]


def load_point_cloud(path, format=None, k_nn=12):
    """
    Loads a point cloud from *xyz-csv* or ASCII *ply*; normals are estimated
    when the file carries none.

    :param path: file path
    :type path: str
    :param format: [optional] *csv* or *ply*. Inferred from the extension if
        not provided.
    :type format: str
    :param k_nn: [optional] neighborhood size for normal estimation
    :type k_nn: int
    :rtype: SurfaceNodeSet
    :raises io.PointCloudError: on parse failures or too few points
    """
    if format is None:
        format = os.path.splitext(path)[1].lstrip('.').lower()

    match format:
        case 'csv' | 'xyz' | 'xyz-csv':
            points, normals = io.read_xyz_csv(path)
        case 'ply':
            points, normals, _ = io.read_ply(path)
        case _:
            raise io.PointCloudError('Unsupported point cloud format: %s'
                % format)

    if len(points) < 4:
        raise io.PointCloudError('%s: at least 4 points required' % path)

    if normals is None:
        if len(points) <= 6:
            raise io.PointCloudError('%s: too few points to estimate '
                'normals' % path)
        normals = estimate_normals(points, min(k_nn, len(points) - 1))

    name = os.path.splitext(os.path.basename(path))[0]
    return SurfaceNodeSet(points, normals, name=name)
