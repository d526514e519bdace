import numpy as np
import pytest
import scipy.io

from surfpde.geometry import SurfaceNodeSet, fibonacci_sphere_nodes
from surfpde.operators import (AssemblyError, OperatorMatrix,
    advection_matrix, as_sparse, assemble, get_num_threads,
    gradient_matrices, hyperviscosity_config, hyperviscosity_matrix,
    interpolation_matrix, set_num_threads)
from surfpde.rbf import (InvalidConfig, LinearOperatorSpec, PhsPolyConfig,
    SingularStencil)
from tests.conftest import option, sphere_node_sets


LAPLACIAN = LinearOperatorSpec.laplacian()


def _xy(points):
    return points[:, 0] * points[:, 1]


def test_operator_matrix_layout():
    matrix = OperatorMatrix([[2, 0, 1], [1, 2, 0]],
        [[0.2, 0.0, 0.1], [1.1, 1.2, 1.0]], 3, 'test')

    assert matrix.shape == (2, 3)
    assert matrix.row_nnz().tolist() == [3, 3]
    assert matrix.columns().tolist() == [[0, 1, 2], [0, 1, 2]]
    assert matrix.values().tolist() == [[0.0, 0.1, 0.2], [1.0, 1.1, 1.2]]
    assert np.allclose(matrix @ np.ones(3), [0.3, 3.3])
    assert np.allclose(matrix.scaled(2).toarray(), 2 * matrix.toarray())


def test_operator_matrix_rejects_repeats_and_nan():
    with pytest.raises(AssemblyError) as err:
        OperatorMatrix([[0, 1], [1, 1]], [[1.0, 1.0], [1.0, 1.0]], 2)
    assert err.value.node == 1

    with pytest.raises(AssemblyError) as err:
        OperatorMatrix([[0, 1], [0, 1]], [[1.0, np.nan], [1.0, 1.0]], 2)
    assert err.value.node == 0


def test_as_sparse():
    dense = np.eye(3)

    assert (as_sparse(dense) != as_sparse(dense).T).nnz == 0
    assert as_sparse(as_sparse(dense)).shape == (3, 3)


@pytest.mark.parametrize('nodes', sphere_node_sets())
@pytest.mark.parametrize('l', [2, 3, 4])
def test_assemble_laplacian(nodes, l):
    config = PhsPolyConfig(l=l)
    L = assemble(nodes, config, LAPLACIAN)
    N = len(nodes)

    assert L.shape == (N, N)
    assert (L.row_nnz() == config.n_s).all()
    assert (np.diff(L.columns(), axis=1) > 0).all()

    rows = L.values()
    assert (np.abs(rows.sum(axis=1)) <= 1e-9 * np.abs(rows).sum(axis=1)).all()

    u = _xy(nodes.points)
    assert np.abs(L @ u + 6 * u).max() < 1e-7


def test_assemble_is_thread_independent():
    nodes = fibonacci_sphere_nodes(300)
    config = PhsPolyConfig(l=2)

    serial = assemble(nodes, config, LAPLACIAN, threads=1)
    threaded = assemble(nodes, config, LAPLACIAN, threads=4)

    assert np.array_equal(serial.columns(), threaded.columns())
    assert np.array_equal(serial.values(), threaded.values())


def test_assemble_is_permutation_equivariant():
    nodes = fibonacci_sphere_nodes(300)
    config = PhsPolyConfig(l=2)
    order = np.random.default_rng(3).permutation(len(nodes))

    L = assemble(nodes, config, LAPLACIAN).toarray()
    P = assemble(nodes.permuted(order), config, LAPLACIAN).toarray()

    assert np.allclose(P, L[np.ix_(order, order)],
        atol=1e-8 * np.abs(L).max())


def test_assembly_error_names_node():
    points = np.column_stack([np.ones(30), 1e-3 * np.arange(30),
        np.zeros(30)])
    nodes = SurfaceNodeSet(points, np.tile([1.0, 0.0, 0.0], (30, 1)))

    with pytest.raises(AssemblyError) as err:
        assemble(nodes, PhsPolyConfig(l=2), LAPLACIAN, threads=1)

    assert err.value.node == 0
    assert isinstance(err.value.__cause__, SingularStencil)


def test_gradient_matrices():
    nodes = fibonacci_sphere_nodes(500)
    x = nodes.points
    u = _xy(x)
    ambient = np.column_stack([x[:, 1], x[:, 0], np.zeros(len(x))])
    tangential = ambient - 2 * u[:, None] * x

    G = gradient_matrices(nodes, PhsPolyConfig(l=2))

    assert len(G) == 3
    for a in range(3):
        assert np.abs(G[a] @ u - tangential[:, a]).max() < 1e-7


@pytest.mark.parametrize('l', [2, 4])
def test_advection_matrix(l):
    nodes = fibonacci_sphere_nodes(500)
    x = nodes.points
    velocity = np.column_stack([-x[:, 1], x[:, 0], np.zeros(len(x))])

    D = advection_matrix(nodes, PhsPolyConfig(l=l), velocity)

    assert D.label == 'advection'
    assert np.abs(D @ _xy(x) - (x[:, 0] ** 2 - x[:, 1] ** 2)).max() < 1e-7


def test_advection_matrix_rejects_velocity():
    nodes = fibonacci_sphere_nodes(100)

    with pytest.raises(InvalidConfig):
        advection_matrix(nodes, PhsPolyConfig(l=2), np.zeros((99, 3)))

    with pytest.raises(InvalidConfig):
        advection_matrix(nodes, PhsPolyConfig(l=2),
            np.full((100, 3), np.inf))


@pytest.mark.parametrize('l, m, expected', [(2, 5, 5), (4, 5, 9), (3, 7, 7),
    (6, 5, 11)])
def test_hyperviscosity_config(l, m, expected):
    config = PhsPolyConfig(l=l, m=m)

    assert hyperviscosity_config(config).m == expected


def test_hyperviscosity_matrix():
    nodes = fibonacci_sphere_nodes(400)
    config = PhsPolyConfig(l=2)

    H = hyperviscosity_matrix(nodes, config, 1e-3)
    Z = hyperviscosity_matrix(nodes, config, 0)

    assert H.label == 'hyperviscosity'
    assert (Z.row_nnz() == config.n_s).all()
    assert not Z.values().any()

    u = np.cos(3 * nodes.points[:, 2])
    assert u @ (H @ u) < 0

    with pytest.raises(InvalidConfig):
        hyperviscosity_matrix(nodes, PhsPolyConfig(l=4), 1e-3)


def test_hyperviscosity_matrix_high_degree_sphere():
    nodes = fibonacci_sphere_nodes(400)
    config = hyperviscosity_config(PhsPolyConfig(l=4))

    H = hyperviscosity_matrix(nodes, config, 1e-3)

    assert np.isfinite(H.values()).all()
    rows = H.values()
    assert (np.abs(rows.sum(axis=1)) <= 1e-8 * np.abs(rows).sum(axis=1)).all()


def test_interpolation_at_nodes_is_identity():
    nodes = fibonacci_sphere_nodes(300)

    M = interpolation_matrix(nodes, PhsPolyConfig(l=2), nodes.points,
        nodes.normals)

    assert np.allclose(M.toarray(), np.eye(len(nodes)), atol=1e-7)


def test_interpolation_between_spheres():
    source = fibonacci_sphere_nodes(500)
    target = fibonacci_sphere_nodes(321)

    M = interpolation_matrix(source, PhsPolyConfig(l=2), target.points,
        target.normals)

    assert M.shape == (321, 500)
    assert np.abs(M @ np.ones(500) - 1).max() < 1e-10
    assert np.abs(M @ _xy(source.points) - _xy(target.points)).max() < 1e-8


def test_thread_count(monkeypatch):
    try:
        set_num_threads(None)
        monkeypatch.setenv('SURFPDE_THREADS', '3')
        assert get_num_threads() == 3

        set_num_threads(2)
        assert get_num_threads() == 2

        monkeypatch.delenv('SURFPDE_THREADS')
        set_num_threads(None)
        assert get_num_threads() == 1
    finally:
        set_num_threads(option.threads)


def test_save(tmp_path):
    nodes = fibonacci_sphere_nodes(100)
    L = assemble(nodes, PhsPolyConfig(l=2), LAPLACIAN)
    path = str(tmp_path / 'laplacian.mtx')

    L.save(path)

    assert np.allclose(scipy.io.mmread(path).toarray(), L.toarray())
