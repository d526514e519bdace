import numpy as np
import pytest

from surfpde.geometry import SurfaceNodeSet, fibonacci_sphere_nodes
from surfpde.rbf import PhsPolyConfig
from surfpde.stencil import (InsufficientNeighbors, NeighborIndex,
    build_neighbor_index, build_stencil, build_target_stencil)
from tests.conftest import sphere_node_sets


def test_query_breaks_ties_by_index():
    index = NeighborIndex([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [2.0, 0.0]])

    distances, indices = index.query([0.0, 0.0], 2)

    assert indices.tolist() == [[0, 1]]
    assert distances.tolist() == [[0.0, 1.0]]


def test_query_caps_k():
    index = NeighborIndex([[0.0, 0.0], [1.0, 0.0]])

    _, indices = index.query([[0.0, 0.0]], 5)

    assert indices.shape == (1, 2)


@pytest.mark.parametrize('nodes', sphere_node_sets())
@pytest.mark.parametrize('l', [2, 3, 4])
def test_build_stencil(nodes, l):
    config = PhsPolyConfig(l=l)
    index = build_neighbor_index(nodes)

    for i in (0, len(nodes) // 2, len(nodes) - 1):
        stencil = build_stencil(nodes, i, config, index=index)
        members = nodes.points[stencil.surface_indices]
        distances = np.linalg.norm(members - nodes.points[i], axis=1)

        assert stencil.ref_index == i
        assert stencil.surface_indices[0] == i
        assert stencil.n_s == config.n_s
        assert len(set(stencil.surface_indices.tolist())) == config.n_s
        assert (np.diff(distances) >= 0).all()

        assert stencil.n_perp == config.n_perp
        step = config.eps_normal * nodes.h
        offsets = (stencil.offsurface_points - nodes.points[i]) \
            @ nodes.normals[i]
        expected = np.repeat(np.arange(1, config.n_perp // 2 + 1), 2) \
            * np.tile([1, -1], config.n_perp // 2) * step
        assert np.allclose(offsets, expected)


def test_build_stencil_minimum_separation():
    nodes = fibonacci_sphere_nodes(400)
    config = PhsPolyConfig(l=2)
    min_sep = 0.5 * nodes.h

    stencil = build_stencil(nodes, 7, config, min_sep)
    members = nodes.points[stencil.surface_indices]
    distances = np.linalg.norm(members[:, None] - members[None], axis=-1)
    np.fill_diagonal(distances, np.inf)

    assert stencil.surface_indices[0] == 7
    assert stencil.n_s == config.n_s
    assert distances.min() >= min_sep


def test_build_stencil_insufficient_neighbors():
    nodes = fibonacci_sphere_nodes(12)
    config = PhsPolyConfig(l=2, n_s=20)

    with pytest.raises(InsufficientNeighbors):
        build_stencil(nodes, 0, config)


def test_build_stencil_unreachable_separation():
    nodes = fibonacci_sphere_nodes(100)
    config = PhsPolyConfig(l=2)

    with pytest.raises(InsufficientNeighbors):
        build_stencil(nodes, 0, config, min_sep=1.5)


def test_stencil_is_permutation_equivariant():
    nodes = fibonacci_sphere_nodes(300)
    config = PhsPolyConfig(l=2)
    order = np.random.default_rng(1).permutation(len(nodes))
    inverse = np.argsort(order)
    permuted = nodes.permuted(order)

    stencil = build_stencil(nodes, 5, config)
    moved = build_stencil(permuted, inverse[5], config)

    assert set(order[moved.surface_indices]) == set(stencil.surface_indices)


def test_build_target_stencil():
    nodes = fibonacci_sphere_nodes(400)
    config = PhsPolyConfig(l=2)
    x = np.array([0.6, 0.0, 0.8])

    stencil = build_target_stencil(nodes, x, x, config)

    assert stencil.ref_index is None
    assert stencil.n_s == config.n_s
    assert np.allclose(stencil.center, x)
    nearest = np.argmin(np.linalg.norm(nodes.points - x, axis=1))
    assert stencil.surface_indices[0] == nearest


def test_planar_stencil():
    theta = 2 * np.pi * np.arange(40) / 40
    points = np.column_stack([np.cos(theta), np.sin(theta)])
    nodes = SurfaceNodeSet(points, points)
    config = PhsPolyConfig(m=3, l=1, n_s=5, n_perp=2, dim=2)

    stencil = build_stencil(nodes, 0, config)

    assert sorted(stencil.surface_indices.tolist()) == [0, 1, 2, 38, 39]
    assert stencil.offsurface_points.shape == (2, 2)
