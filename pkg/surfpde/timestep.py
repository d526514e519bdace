"""
Fixed-step time integrators and sparse linear solvers
"""

import logging
from collections import namedtuple
from threading import Lock

import numpy as np
from cachetools import LRUCache
from scipy.sparse import bmat, csc_matrix, identity
from scipy.sparse.linalg import LinearOperator, bicgstab, spilu, splu

from surfpde import constants
from surfpde.operators import as_sparse


logger = logging.getLogger(__name__)


class SolverFailure(ArithmeticError):
    """
    Raised when a linear solve fails or does not converge
    """
    pass


class BlowUp(ArithmeticError):
    """
    Raised when the integrated state becomes non-finite or grows beyond the
    admitted bound
    """

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


_CacheInfo = namedtuple('CacheInfo', ['size', 'capacity', 'hits', 'misses'])

SolveInfo = namedtuple('SolveInfo', ['method', 'iterations', 'residual'])

StabilityReport = namedtuple('StabilityReport',
    ['inside', 'worst', 'amplification'])


def _resolve_method(method, N):
    if method not in constants.SOLVERS:
        raise ValueError('Unsupported solver: %s' % method)

    if method == 'auto':
        return 'direct' if N <= constants.DIRECT_SOLVE_LIMIT else 'bicgstab'

    return method


class _Factorization:

    def __init__(self, matrix, method, tol):
        self.matrix = matrix
        self.method = method
        self.tol = tol

        try:
            if method == 'direct':
                self.lu = splu(csc_matrix(matrix))
            else:
                ilu = spilu(csc_matrix(matrix), fill_factor=1, drop_tol=0)
                self.preconditioner = LinearOperator(matrix.shape,
                    ilu.solve)
        except RuntimeError as err:
            raise SolverFailure('Factorization failed: %s' % err) from err


    def solve(self, b):
        norm_b = np.linalg.norm(b)
        if norm_b == 0:
            return np.zeros_like(b), SolveInfo(self.method, 0, 0.0)

        if self.method == 'direct':
            x = self.lu.solve(b)
            residual = b - self.matrix @ x
            if np.linalg.norm(residual) > self.tol * norm_b:
                x = x + self.lu.solve(residual)
                refined = np.linalg.norm(b - self.matrix @ x) / norm_b
                if refined > self.tol:
                    logger.warning('Direct solve residual %.3e above '
                        'tolerance %.1e after refinement', refined, self.tol)
            iterations = 0
        else:
            count = [0]

            def callback(_):
                count[0] += 1

            x, status = bicgstab(self.matrix, b, rtol=self.tol, atol=0.0,
                maxiter=10 * len(b), M=self.preconditioner,
                callback=callback)
            if status != 0:
                raise SolverFailure('BiCGSTAB did not converge (status %d, '
                    '%d iterations)' % (status, count[0]))
            iterations = count[0]

        if not np.isfinite(x).all():
            raise SolverFailure('Non-finite solution')

        residual = np.linalg.norm(b - self.matrix @ x) / norm_b
        return x, SolveInfo(self.method, iterations, residual)


def linear_solve(A, b, method='auto', tol=1e-11, info=False):
    """
    Solves ``A x = b`` by sparse LU (*direct*) or by BiCGSTAB preconditioned
    with ILU at unit fill factor, an approximation of ILU(0) (*bicgstab*).
    *auto* picks the direct path up to 20000 unknowns.

    :param A: square matrix
    :param b: right-hand side
    :type b: np.ndarray
    :param method: [optional] *auto*, *direct* or *bicgstab*
    :type method: str
    :param tol: [optional] relative residual tolerance. Defaults to 1e-11.
    :type tol: float
    :param info: [optional] if *True*, also return a :class:`SolveInfo`
    :type info: bool
    :rtype: np.ndarray
    :raises SolverFailure: on singular factorizations or non-convergence
        within 10 N iterations
    """
    A = as_sparse(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError('Matrix must be square')

    b = np.asarray(b, dtype=float)
    factorization = _Factorization(A, _resolve_method(method, A.shape[0]),
        tol)
    x, details = factorization.solve(b)

    return (x, details) if info else x


class ShiftedSolver:
    """
    Solves ``(I - c A) x = b`` for a fixed matrix *A*, caching the
    factorization of each shift *c*.

    :param A: square matrix
    :param method: [optional] solver method. Defaults to *auto*.
    :type method: str
    :param tol: [optional] relative residual tolerance. Defaults to 1e-11.
    :type tol: float
    :param capacity: [optional] number of cached shifts. Defaults to 4.
    :type capacity: int
    """

    def __init__(self, A, method='auto', tol=1e-11, capacity=4):
        self.A = as_sparse(A)
        self.N = self.A.shape[0]
        self.method = _resolve_method(method, self.N)
        self.tol = tol
        self.cache = LRUCache(maxsize=capacity)
        self.hits = 0
        self.misses = 0
        self.lock = Lock()
        self.last_info = None


    def _get_factorization(self, c):
        key = float(c)
        with self.lock:
            value = self.cache.get(key)
            if value is not None:
                self.hits += 1
                return value
            self.misses += 1

        matrix = (identity(self.N, format='csr') - key * self.A).tocsr()
        value = _Factorization(matrix, self.method, self.tol)

        with self.lock:
            self.cache[key] = value

        return value


    def solve(self, c, b):
        x, self.last_info = self._get_factorization(c).solve(
            np.asarray(b, dtype=float))

        return x


    def get_cache_info(self):
        """
        Returns current cache information.

        :rtype: CacheInfo
        """
        with self.lock:
            return _CacheInfo(len(self.cache), self.cache.maxsize,
                self.hits, self.misses)


    def cache_clear(self):
        with self.lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0


class ImexSystem:
    """
    ``u' = A u + g(t, u)`` with *A* treated implicitly and *g* explicitly.

    :param implicit: square matrix, or a 2x2 nested list of blocks (entries
        may be *None* for zero blocks)
    :param explicit: [optional] callable ``g(t, u)``. Defaults to zero.
    :param dt: time step
    :type dt: float
    :param method: [optional] linear solver. Defaults to *auto*.
    :type method: str
    :param tol: [optional] solver tolerance. Defaults to 1e-11.
    :type tol: float
    :raises ValueError: for non-positive steps or inconsistent dimensions
    """

    def __init__(self, implicit, explicit=None, dt=None, method='auto',
            tol=1e-11):
        if dt is None or not dt > 0:
            raise ValueError('Time step must be positive')

        if isinstance(implicit, (list, tuple)):
            implicit = bmat([[None if A is None else as_sparse(A)
                for A in row] for row in implicit], format='csr')
        else:
            implicit = as_sparse(implicit)

        if implicit.shape[0] != implicit.shape[1]:
            raise ValueError('Implicit operator must be square')

        self.A = implicit
        self.g = explicit
        self.dt = dt
        self.solver = ShiftedSolver(implicit, method, tol)


    @property
    def size(self):
        return self.A.shape[0]


    def explicit(self, t, u):
        if self.g is None:
            return np.zeros_like(u)

        return np.asarray(self.g(t, u), dtype=float)


    def solve(self, c, b):
        return self.solver.solve(c, b)


def _check(u, step, reference=None, max_growth=None):
    if not np.isfinite(u).all():
        raise BlowUp('Non-finite state at step %d' % step, step)

    if max_growth is not None and reference:
        growth = np.linalg.norm(u) / reference
        if growth > max_growth:
            raise BlowUp('State grew by %.3g at step %d' % (growth, step),
                step)


def _as_state(u0):
    u = np.array(u0, dtype=float)
    if u.ndim != 1:
        raise ValueError('State must be a vector')

    return u


def rk4_advance(rhs, u0, dt, steps, t0=0.0, max_growth=None):
    """
    Classical four-stage Runge-Kutta.

    :param rhs: matrix (``u' = A u``) or callable ``f(t, u)``
    :param u0: initial state
    :type u0: np.ndarray
    :param dt: time step
    :type dt: float
    :param steps: number of steps
    :type steps: int
    :param t0: [optional] initial time. Defaults to 0.
    :type t0: float
    :param max_growth: [optional] admitted growth of the state norm over the
        initial norm
    :type max_growth: float
    :returns: final state
    :rtype: np.ndarray
    :raises BlowUp: naming the step at which the state became non-finite or
        exceeded the admitted growth
    """
    if not dt > 0:
        raise ValueError('Time step must be positive')

    if callable(rhs):
        f = rhs
    else:
        A = as_sparse(rhs)

        def f(t, u):
            return A @ u

    u = _as_state(u0)
    reference = np.linalg.norm(u)

    for n in range(steps):
        t = t0 + n * dt
        k1 = f(t, u)
        k2 = f(t + dt / 2, u + dt / 2 * k1)
        k3 = f(t + dt / 2, u + dt / 2 * k2)
        k4 = f(t + dt, u + dt * k3)
        u = u + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        _check(u, n + 1, reference, max_growth)

    return u


def sbdf_advance(A_implicit, f_explicit, u0, dt, steps, order=2, t0=0.0,
        method='auto', tol=1e-11):
    """
    Semi-implicit backward differentiation: one first-order step followed by
    second-order steps when *order* is 2.

    ``(I - dt A) u1 = u0 + dt f0``

    ``(3I - 2dt A) u(n+1) = 4u(n) - u(n-1) + 2dt (2f(n) - f(n-1))``

    :param A_implicit: implicit matrix, or *None* for zero
    :param f_explicit: callable ``f(t, u)``, or *None* for zero
    :param u0: initial state
    :param dt: time step
    :type dt: float
    :param steps: total number of steps, bootstrap included
    :type steps: int
    :param order: [optional] 1 or 2. Defaults to 2.
    :type order: int
    :rtype: np.ndarray
    :raises SolverFailure: if a linear solve fails
    :raises BlowUp: if the state becomes non-finite
    """
    if order not in (1, 2):
        raise ValueError('SBDF order must be 1 or 2')

    u = _as_state(u0)
    if A_implicit is None:
        A_implicit = csc_matrix((len(u), len(u)))
    system = ImexSystem(A_implicit, f_explicit, dt, method, tol)

    previous = None
    f_previous = None
    for n in range(steps):
        t = t0 + n * dt
        f_now = system.explicit(t, u)

        if order == 1 or previous is None:
            u_next = system.solve(dt, u + dt * f_now)
        else:
            rhs = (4 * u - previous + 2 * dt * (2 * f_now - f_previous)) / 3
            u_next = system.solve(2 * dt / 3, rhs)

        previous, f_previous, u = u, f_now, u_next
        _check(u, n + 1)

    logger.debug('SBDF%d: %d steps, cache %s', order, steps,
        system.solver.get_cache_info())

    return u


def imex_euler_advance(A_implicit, g_explicit, u0, dt, steps, t0=0.0,
        method='auto', tol=1e-11):
    """
    First-order implicit-explicit Euler,
    ``(I - dt A) u(n+1) = u(n) + dt g(t(n), u(n))``.

    :rtype: np.ndarray
    """
    return sbdf_advance(A_implicit, g_explicit, u0, dt, steps, 1, t0, method,
        tol)


def imex_block_advance(A11, A12, A21, A22, g1, g2, u0, w0, dt, steps,
        t0=0.0, method='auto', tol=1e-11):
    """
    First-order implicit-explicit Euler for two coupled fields,

    ``u' = A11 u + A12 w + g1(t, u, w)``

    ``w' = A21 u + A22 w + g2(t, u, w)``

    solved monolithically as one 2N x 2N system per step.

    :param A11, A12, A21, A22: implicit blocks (*None* for zero blocks;
        the diagonal blocks must not both be *None*)
    :param g1, g2: explicit callables ``g(t, u, w)``, or *None*
    :returns: final *u* and *w*
    :rtype: tuple[np.ndarray, np.ndarray]
    """
    u = _as_state(u0)
    w = _as_state(w0)
    N = len(u)
    zero = csc_matrix((N, N))
    blocks = [[zero if A is None else A for A in row]
        for row in ((A11, A12), (A21, A22))]
    system = ImexSystem(blocks, None, dt, method, tol)

    def explicit(g, t):
        return np.zeros(N) if g is None else np.asarray(g(t, u, w),
            dtype=float)

    for n in range(steps):
        t = t0 + n * dt
        rhs = np.concatenate([u + dt * explicit(g1, t),
            w + dt * explicit(g2, t)])
        state = system.solve(dt, rhs)
        u, w = state[:N], state[N:]
        _check(state, n + 1)

    return u, w


def rk4_amplification(z):
    z = np.asarray(z, dtype=complex)

    return np.abs(1 + z + z ** 2 / 2 + z ** 3 / 6 + z ** 4 / 24)


def rk4_stability_check(eigenvalues, dt, tol=0.0):
    """
    Checks whether every ``dt λ`` lies in the RK4 stability region
    ``|1 + z + z²/2 + z³/6 + z⁴/24| <= 1``.

    :param eigenvalues: complex eigenvalues
    :param dt: time step
    :type dt: float
    :param tol: [optional] slack on the unit bound. Defaults to 0.
    :type tol: float
    :returns: verdict, the worst ``dt λ`` and its amplification factor
    :rtype: StabilityReport
    """
    z = dt * np.asarray(eigenvalues, dtype=complex).ravel()
    if len(z) == 0:
        return StabilityReport(True, None, 0.0)

    amplification = rk4_amplification(z)
    worst = int(np.argmax(amplification))

    return StabilityReport(bool(amplification[worst] <= 1 + tol),
        complex(z[worst]), float(amplification[worst]))
