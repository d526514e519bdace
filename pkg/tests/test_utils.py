import pytest
from math import comb

from surfpde.utils import (default_normal_count, default_stencil_size,
    hyperviscosity_coefficient, hyperviscosity_power, poly_dim, time_grid)


@pytest.mark.parametrize('l, d, expected', [
    (0, 3, 1), (1, 3, 4), (2, 3, 10), (3, 3, 20), (4, 3, 35), (6, 3, 84),
    (2, 2, 6), (-1, 3, 0)])
def test_poly_dim(l, d, expected):
    assert poly_dim(l, d) == expected


@pytest.mark.parametrize('l', range(0, 7))
def test_default_stencil_size(l):
    assert default_stencil_size(l, 3) == 2 * comb(l + 3, 3)
    assert default_stencil_size(l, 3, 'diffusion') == int(1.5 * comb(l + 3, 3))
    assert default_stencil_size(l, 3, 'advection') == int(2.2 * comb(l + 3, 3))


def test_default_stencil_size_unknown_rule():
    with pytest.raises(ValueError):
        default_stencil_size(2, 3, 'triple')


@pytest.mark.parametrize('l, expected', [(0, 2), (1, 2), (2, 4), (3, 4),
    (4, 6), (5, 6), (6, 8)])
def test_default_normal_count(l, expected):
    n_perp = default_normal_count(l)

    assert n_perp == expected
    assert n_perp % 2 == 0
    assert n_perp > l


@pytest.mark.parametrize('n_s, k', [(15, 2), (30, 3), (52, 3), (55, 4),
    (126, 4)])
def test_hyperviscosity_power(n_s, k):
    assert hyperviscosity_power(n_s) == k


@pytest.mark.parametrize('k', [1, 2, 3, 4])
def test_hyperviscosity_coefficient_sign(k):
    gamma = hyperviscosity_coefficient(1e-3, 0.1, k)

    assert gamma == pytest.approx((-1) ** (k + 1) * 1e-3 * 0.1 ** (2 * k + 1))
    assert (gamma < 0) == (k % 2 == 0)


@pytest.mark.parametrize('final_time, dt, steps', [(1.0, 0.1, 10),
    (0.5, 0.3, 2), (2 * 3.141592653589793, 0.01, 629), (1.0, 2.0, 1)])
def test_time_grid(final_time, dt, steps):
    n, step = time_grid(final_time, dt)

    assert n == steps
    assert step <= dt
    assert n * step == pytest.approx(final_time, rel=1e-14)


@pytest.mark.parametrize('final_time, dt', [(0, 0.1), (1.0, 0), (-1, 0.1)])
def test_time_grid_rejects(final_time, dt):
    with pytest.raises(ValueError):
        time_grid(final_time, dt)
