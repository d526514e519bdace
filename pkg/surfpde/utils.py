from math import ceil, comb, floor, log


def poly_dim(l, d):
    """
    Dimension of the space of polynomials of total degree at most *l* in *d*
    variables.

    :param l: polynomial degree
    :type l: int
    :param d: number of variables
    :type d: int
    :rtype: int
    """
    if l < 0:
        return 0

    return comb(l + d, d)


def default_stencil_size(l, d, rule='double'):
    """
    Number of on-surface stencil nodes for polynomial degree *l*.

    .. note:: Rules are *double* (``2 C(l + d, l)``), *diffusion*
        (``floor(1.5 C(l + 3, 3))``) and *advection* (``floor(2.2 C(l + 3, 3))``).

    :param l: polynomial degree
    :type l: int
    :param d: ambient dimension
    :type d: int
    :param rule: [optional] sizing rule. Defaults to *double*.
    :type rule: str
    :rtype: int
    :raises ValueError: for unknown rules
    """
    match rule:
        case 'double':
            return 2 * poly_dim(l, d)
        case 'diffusion':
            return floor(1.5 * comb(l + 3, 3))
        case 'advection':
            return floor(2.2 * comb(l + 3, 3))

    raise ValueError('Unknown stencil size rule: %s' % rule)


def default_normal_count(l):
    """
    Smallest even number of off-surface points exceeding *l*
    (``l + 2`` for even *l*, ``l + 1`` for odd *l*).

    :param l: polynomial degree
    :type l: int
    :rtype: int
    """
    return l + 2 if l % 2 == 0 else l + 1


def hyperviscosity_power(n_s):
    """
    Power *k* of the hyperviscosity term, ``floor(ln n_s)``.

    :param n_s: on-surface stencil size
    :type n_s: int
    :rtype: int
    """
    return int(floor(log(n_s)))


def hyperviscosity_coefficient(epsilon, h, k):
    """
    ``epsilon (-1)^(k + 1) h^(2k + 1)``

    :rtype: float
    """
    return epsilon * (-1) ** (k + 1) * h ** (2 * k + 1)


def time_grid(final_time, dt):
    """
    Number of steps reaching *final_time* and the step, no larger than *dt*,
    that lands on it exactly.

    :param final_time: integration horizon
    :type final_time: float
    :param dt: largest admitted step
    :type dt: float
    :rtype: tuple[int, float]
    :raises ValueError: for non-positive arguments
    """
    if not (final_time > 0 and dt > 0):
        raise ValueError('Final time and step must be positive')

    steps = max(1, ceil(final_time / dt - 1e-9))

    return steps, final_time / steps
