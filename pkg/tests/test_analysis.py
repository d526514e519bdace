import numpy as np
import pytest
from scipy.sparse import diags, identity

from surfpde.analysis import (SpectrumError, eoc, imaginary_extent,
    max_condition_number, normal_projection, parameter_study, rel_error,
    spectrum)
from surfpde.geometry import fibonacci_sphere_nodes
from surfpde.rbf import PhsPolyConfig


def test_rel_error():
    exact = np.array([1.0, 2.0])
    approx = np.array([1.0, 2.2])

    assert rel_error(approx, exact) == pytest.approx(0.1)
    assert rel_error(approx, exact, 'l2') == pytest.approx(0.2 / np.sqrt(5))
    assert rel_error(exact, exact) == 0


@pytest.mark.parametrize('u_num, u_exact, norm', [
    ([1.0, 2.0], [1.0], 'linf'),
    ([1.0], [0.0], 'linf'),
    ([1.0], [1.0], 'l1'),
])
def test_rel_error_rejects(u_num, u_exact, norm):
    with pytest.raises(ValueError):
        rel_error(u_num, u_exact, norm)


def test_eoc():
    rates = eoc([1e-2, 2.5e-3, 6.25e-4], [0.2, 0.1, 0.05])

    assert rates == pytest.approx([2.0, 2.0])


@pytest.mark.parametrize('errors, hs', [
    ([1e-2], [0.2]),
    ([1e-2, 1e-3], [0.2]),
    ([1e-2, 0.0], [0.2, 0.1]),
    ([1e-2, 1e-3], [0.1, 0.2]),
])
def test_eoc_rejects(errors, hs):
    with pytest.raises(ValueError):
        eoc(errors, hs)


def test_dense_spectrum():
    report = spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]))

    assert report.method == 'dense_full'
    assert np.allclose(report.eigenvalues, [-1j, 1j])
    assert report.max_real == pytest.approx(0.0, abs=1e-14)
    assert imaginary_extent(report) == pytest.approx(1.0)


def test_extremal_spectrum():
    A = diags(-np.arange(1.0, 51.0), format='csr')

    report = spectrum(A, 'extremal', k=3)

    assert report.method == 'extremal'
    assert np.allclose(report.eigenvalues, [-3, -2, -1], atol=1e-6)
    assert report.max_real == pytest.approx(-1.0, abs=1e-6)
    assert report.min_real == pytest.approx(-3.0, abs=1e-6)


def test_dense_spectrum_size_limit():
    with pytest.raises(SpectrumError):
        spectrum(identity(6001, format='csr'))


def test_spectrum_rejects_mode():
    with pytest.raises(ValueError):
        spectrum(np.eye(3), 'shifted')


def test_normal_projection_on_sphere():
    nodes = fibonacci_sphere_nodes(400)
    u = nodes.points[:, 0] * nodes.points[:, 1]

    first, second = normal_projection(nodes, PhsPolyConfig(l=2), u)

    assert first < 1e-7
    assert second < 1e-6


def test_max_condition_number():
    nodes = fibonacci_sphere_nodes(300)

    worst = max_condition_number(nodes, PhsPolyConfig(l=2), sample=[0, 10])

    assert np.isfinite(worst)
    assert worst > 1


def test_parameter_study():
    results = parameter_study([0.05, 0.2], [4], N=100, m=5)

    assert [(p.eps_normal, p.n_perp) for p in results] == [(0.05, 4),
        (0.2, 4)]
    for point in results:
        assert 0 < point.error < 0.5
        assert point.normal_gradient < 0.5
        assert point.cond_A > 1
