"""
Closed-form solutions, forcing terms, velocity fields and initial data of the
benchmark problems
"""

from collections import namedtuple

import numpy as np
from scipy.special import gammaln

from surfpde.geometry import surface_laplacian_exact, torus_surface


AmbientFunction = namedtuple('AmbientFunction',
    ['value', 'gradient', 'hessian'])


def _u1_value(x):
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    return -np.cos(0.75 * np.pi * X) * np.cos(np.pi * Y) \
        * np.sin(1.5 * np.pi * Z)


def _u1_gradient(x):
    a, b, c = 0.75 * np.pi, np.pi, 1.5 * np.pi
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    cx, sx = np.cos(a * X), np.sin(a * X)
    cy, sy = np.cos(b * Y), np.sin(b * Y)
    cz, sz = np.cos(c * Z), np.sin(c * Z)

    return np.stack([a * sx * cy * sz, b * cx * sy * sz, -c * cx * cy * cz],
        axis=-1)


def _u1_hessian(x):
    a, b, c = 0.75 * np.pi, np.pi, 1.5 * np.pi
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    cx, sx = np.cos(a * X), np.sin(a * X)
    cy, sy = np.cos(b * Y), np.sin(b * Y)
    cz, sz = np.cos(c * Z), np.sin(c * Z)

    H = np.empty(x.shape[:-1] + (3, 3))
    H[..., 0, 0] = a * a * cx * cy * sz
    H[..., 1, 1] = b * b * cx * cy * sz
    H[..., 2, 2] = c * c * cx * cy * sz
    H[..., 0, 1] = H[..., 1, 0] = -a * b * sx * sy * sz
    H[..., 0, 2] = H[..., 2, 0] = a * c * sx * cy * cz
    H[..., 1, 2] = H[..., 2, 1] = b * c * cx * sy * cz

    return H


def _u2_value(x):
    return -x[..., 0] * x[..., 1]


def _u2_gradient(x):
    return np.stack([-x[..., 1], -x[..., 0], np.zeros(x.shape[:-1])],
        axis=-1)


def _u2_hessian(x):
    H = np.zeros(x.shape[:-1] + (3, 3))
    H[..., 0, 1] = H[..., 1, 0] = -1

    return H


# -cos(3πx/4) cos(πy) sin(3πz/2) and -xy
TEST_FUNCTIONS = {
    'u1': AmbientFunction(_u1_value, _u1_gradient, _u1_hessian),
    'u2': AmbientFunction(_u2_value, _u2_gradient, _u2_hessian),
}


def poisson_forcing(surface, function, x):
    """
    ``f = -Δ_Γ u`` on an implicit surface.

    :param surface: implicit surface with Hessian
    :type surface: ImplicitSurface
    :param function: ambient test function
    :type function: AmbientFunction
    :param x: surface points, shape (N, 3)
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)

    return -surface_laplacian_exact(surface, function.gradient(x),
        function.hessian(x), x)


def _harmonic_amplitude(n):
    # log of sqrt((2n + 1) / 4π (2n)!) (2n - 1)!!
    return 0.5 * np.log((2 * n + 1) / (4 * np.pi)) + 0.5 * gammaln(2 * n + 1) \
        - n * np.log(2) - gammaln(n + 1)


def sectoral_harmonic(n, x):
    """
    Real, fully normalized spherical harmonic of degree and order *n* at
    points of the unit sphere, ``sqrt(2) K sin^n(colatitude) cos(nλ)``.

    :param n: degree, at least one
    :type n: int
    :param x: points on the unit sphere, shape (N, 3)
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    planar = (x[:, 0] + 1j * x[:, 1]) ** n

    return np.sqrt(2) * np.exp(_harmonic_amplitude(n)) * planar.real


def heat_sphere_exact(x, t, terms=30):
    """
    Truncated series
    ``(20 / 3π) Σ exp(-n²/9) exp(-t n(n + 1)) Y_nn`` for ``n = 1, ..., terms``.

    :param x: points on the unit sphere, shape (N, 3)
    :param t: time
    :type t: float
    :param terms: [optional] number of terms. Defaults to 30.
    :type terms: int
    :rtype: np.ndarray
    """
    u = np.zeros(len(x))
    for n in range(1, terms + 1):
        u += np.exp(-n * n / 9 - t * n * (n + 1)) * sectoral_harmonic(n, x)

    return 20 / (3 * np.pi) * u


def _torus_factors(x):
    X, Y, Z = x[..., 0], x[..., 1], x[..., 2]
    p = X ** 5 - 10 * X ** 3 * Y ** 2 + 5 * X * Y ** 4
    dp = np.stack([5 * X ** 4 - 30 * X ** 2 * Y ** 2 + 5 * Y ** 4,
        -20 * X ** 3 * Y + 20 * X * Y ** 3, np.zeros(X.shape)], axis=-1)
    Hp = np.zeros(x.shape[:-1] + (3, 3))
    Hp[..., 0, 0] = 20 * X ** 3 - 60 * X * Y ** 2
    Hp[..., 1, 1] = -Hp[..., 0, 0]
    Hp[..., 0, 1] = Hp[..., 1, 0] = -60 * X ** 2 * Y + 20 * Y ** 3

    q = X ** 2 + Y ** 2 - 60 * Z ** 2
    dq = np.stack([2 * X, 2 * Y, -120 * Z], axis=-1)
    Hq = np.zeros(x.shape[:-1] + (3, 3))
    Hq[..., 0, 0] = Hq[..., 1, 1] = 2
    Hq[..., 2, 2] = -120

    return p, dp, Hp, q, dq, Hq


def forced_heat_torus_exact(x, t):
    """
    ``(1/8) exp(-5t) x (x⁴ - 10x²y² + 5y⁴)(x² + y² - 60z²)``

    :rtype: np.ndarray
    """
    p, _, _, q, _, _ = _torus_factors(np.asarray(x, dtype=float))

    return np.exp(-5 * t) / 8 * p * q


def forced_heat_torus_parts(x):
    """
    Time-independent profile of the torus solution with its ambient gradient
    and Hessian.

    :rtype: tuple[np.ndarray, np.ndarray, np.ndarray]
    """
    p, dp, Hp, q, dq, Hq = _torus_factors(np.asarray(x, dtype=float))
    value = p * q / 8
    gradient = (q[..., None] * dp + p[..., None] * dq) / 8
    hessian = (q[..., None, None] * Hp + p[..., None, None] * Hq
        + dp[..., :, None] * dq[..., None, :]
        + dq[..., :, None] * dp[..., None, :]) / 8

    return value, gradient, hessian


def forced_heat_torus_forcing(x, surface=None):
    """
    Profile *g* of the forcing ``f(t, x) = exp(-5t) g(x)`` making the torus
    solution exact, ``g = -5 v - Δ_Γ v`` with *v* the time-independent
    profile.

    :param x: torus points, shape (N, 3)
    :param surface: [optional] the torus. Defaults to R = 1, r = 1/3.
    :type surface: ImplicitSurface
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    surface = surface or torus_surface()
    value, gradient, hessian = forced_heat_torus_parts(x)

    return -5 * value - surface_laplacian_exact(surface, gradient, hessian, x)


def sphere_velocity(x, alpha=np.pi / 2):
    """
    Solid-body rotation ``ω × x`` with ``ω = (0, -sin α, -cos α)``; the
    smooth Cartesian form of the spherical components

    ``u = sin θ sin λ sin α - cos θ cos α``, ``v = cos λ sin α``

    (θ latitude, λ longitude).

    :param x: points on the unit sphere, shape (N, 3)
    :param alpha: [optional] rotation angle with respect to the equator.
        Defaults to π/2.
    :type alpha: float
    :rtype: np.ndarray
    """
    omega = np.array([0.0, -np.sin(alpha), -np.cos(alpha)])

    return np.cross(omega, np.asarray(x, dtype=float))


def sphere_velocity_components(lam, theta, alpha=np.pi / 2):
    """
    Eastward and northward components of the solid-body rotation.

    :rtype: tuple[np.ndarray, np.ndarray]
    """
    u = np.sin(theta) * np.sin(lam) * np.sin(alpha) \
        - np.cos(theta) * np.cos(alpha)
    v = np.cos(lam) * np.sin(alpha)

    return u, v


def spherical_to_cartesian(lam, theta, u, v):
    """
    Tangent vectors ``u e_east + v e_north`` at longitude *lam* and latitude
    *theta*.

    :rtype: np.ndarray
    """
    east = np.stack([-np.sin(lam), np.cos(lam), np.zeros(np.shape(lam))],
        axis=-1)
    north = np.stack([-np.sin(theta) * np.cos(lam),
        -np.sin(theta) * np.sin(lam), np.cos(theta)], axis=-1)

    return np.asarray(u)[..., None] * east + np.asarray(v)[..., None] * north


def torus_velocity(x, R=1.0, r=1.0 / 3):
    """
    Transport field winding a (3, 2) torus knot: toroidal angular speed 3 and
    poloidal angular speed 2, so every trajectory closes after 2π.

    :param x: torus points, shape (N, 3)
    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    lam = np.arctan2(x[:, 1], x[:, 0])
    rho = np.hypot(x[:, 0], x[:, 1])
    theta = np.arctan2(x[:, 2], rho - R)
    ring = R + r * np.cos(theta)

    d_lam = np.column_stack([-ring * np.sin(lam), ring * np.cos(lam),
        np.zeros(len(x))])
    d_theta = np.column_stack([-r * np.sin(theta) * np.cos(lam),
        -r * np.sin(theta) * np.sin(lam), r * np.cos(theta)])

    return 3 * d_lam + 2 * d_theta


SPHERE_BELL_CENTER = np.array([1.0, 0.0, 0.0])

TORUS_BELL_CENTER = np.array([4.0 / 3, 0.0, 0.0])


def cosine_bell_sphere(x, radius=1.0 / 3):
    """
    Compactly supported cosine bell of great-circle radius *radius* about
    (1, 0, 0); one continuous derivative.

    :rtype: np.ndarray
    """
    r = np.arccos(np.clip(np.asarray(x, dtype=float)[:, 0], -1, 1))

    return np.where(r < radius, 0.5 * (1 + np.cos(np.pi * r / radius)), 0.0)


def gaussian_bell_sphere(x):
    d = np.asarray(x, dtype=float) - SPHERE_BELL_CENTER

    return np.exp(-6 * np.sum(d * d, axis=1))


def cosine_bells_torus(x):
    """
    ``0.1 + 0.9 (q1 + q2)`` with cosine bells of radius 1/2 about
    ``±(4/3, 0, 0)``.

    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)
    q = np.zeros(len(x))
    for center in (TORUS_BELL_CENTER, -TORUS_BELL_CENTER):
        r = np.linalg.norm(x - center, axis=1)
        q += np.where(r < 0.5, 0.5 * (1 + np.cos(2 * np.pi * r)), 0.0)

    return 0.1 + 0.9 * q


def gaussian_bells_torus(x, a=20.0):
    x = np.asarray(x, dtype=float)
    q = np.zeros(len(x))
    for sign in (1, -1):
        q += np.exp(-a * ((x[:, 0] - sign * 4.0 / 3) ** 2 + x[:, 1] ** 2)
            - 1.5 * a * x[:, 2] ** 2)

    return q


INITIAL_CONDITIONS = {
    'sphere': {
        'cosine_bell': cosine_bell_sphere,
        'gaussian_bell': gaussian_bell_sphere,
    },
    'torus': {
        'two_cosine_bells': cosine_bells_torus,
        'two_gaussian_bells': gaussian_bells_torus,
    },
}


def expanding_sphere_radius(t):
    return 1 + 0.5 * t


def expanding_sphere_exact(x, t):
    """
    ``exp(-6t) x y``

    :rtype: np.ndarray
    """
    x = np.asarray(x, dtype=float)

    return np.exp(-6 * t) * x[:, 0] * x[:, 1]


def expanding_sphere_forcing(x, t):
    """
    ``(-6 + 2/r + 6/r²) u`` with ``r = 1 + t/2``.

    :rtype: np.ndarray
    """
    r = expanding_sphere_radius(t)

    return (-6 + 2 / r + 6 / r ** 2) * expanding_sphere_exact(x, t)
