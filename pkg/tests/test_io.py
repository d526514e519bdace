import numpy as np
import pytest
import scipy.io
from scipy.sparse import random as sparse_random

from surfpde import io
from surfpde.geometry import fibonacci_sphere_nodes


def test_ply_keeps_positions_normals_and_fields(tmp_path):
    path = str(tmp_path / 'nodes.ply')
    nodes = fibonacci_sphere_nodes(50)
    u = nodes.points[:, 0] * nodes.points[:, 1]

    io.write_ply(path, nodes, {'u': u})
    points, normals, fields = io.read_ply(path)

    assert np.array_equal(points, nodes.points)
    assert np.array_equal(normals, nodes.normals)
    assert list(fields) == ['u']
    assert np.array_equal(fields['u'], u)


def test_read_ply_rejects_magic(tmp_path):
    path = tmp_path / 'bad.ply'
    path.write_text('plx\nformat ascii 1.0\n')

    with pytest.raises(io.PointCloudError, match=':1:'):
        io.read_ply(str(path))


def test_read_ply_rejects_binary(tmp_path):
    path = tmp_path / 'bad.ply'
    path.write_text('ply\nformat binary_little_endian 1.0\n')

    with pytest.raises(io.PointCloudError, match='ASCII'):
        io.read_ply(str(path))


def test_read_ply_short_body(tmp_path):
    path = tmp_path / 'short.ply'
    path.write_text('ply\nformat ascii 1.0\nelement vertex 3\n'
        'property float x\nproperty float y\nproperty float z\nend_header\n'
        '0 0 1\n0 1 0\n')

    with pytest.raises(io.PointCloudError, match='end of file'):
        io.read_ply(str(path))


def test_read_xyz_csv(tmp_path):
    path = tmp_path / 'cloud.csv'
    path.write_text('x,y,z,nx,ny,nz\n1,0,0,1,0,0\n0,1,0,0,1,0\n')

    points, normals = io.read_xyz_csv(str(path))

    assert points.shape == (2, 3)
    assert np.array_equal(points, normals)


def test_read_xyz_csv_without_normals(tmp_path):
    path = tmp_path / 'cloud.csv'
    path.write_text('1,0,0\n0,1,0\n0,0,1\n')

    points, normals = io.read_xyz_csv(str(path))

    assert points.shape == (3, 3)
    assert normals is None


@pytest.mark.parametrize('body, message', [
    ('1,0,0\n0,1,0\nzero,0,1\n', ':3: non-numeric'),
    ('1,0,0\n0,1\n', ':2: expected 3 or 6 columns'),
    ('1,0,0\n0,1,0,0,1,0\n', ':2: inconsistent'),
    ('1,0,0\n0,inf,0\n', ':2: non-finite'),
    ('1.0.0,0,0\n0,1,0\n', ':1: non-numeric'),
    ('x,0,0\n0,1,0\n', ':1: non-numeric'),
])
def test_read_xyz_csv_names_line(tmp_path, body, message):
    path = tmp_path / 'cloud.csv'
    path.write_text(body)

    with pytest.raises(io.PointCloudError, match=message):
        io.read_xyz_csv(str(path))


def test_write_csv_is_deterministic(tmp_path):
    rows = [[1, 0.1, 1 / 3], [2, 1e-17, '']]
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'

    io.write_csv(str(first), ['n', 'h', 'error'], rows)
    io.write_csv(str(second), ['n', 'h', 'error'], rows)

    assert first.read_bytes() == second.read_bytes()
    assert first.read_text().splitlines() == ['n,h,error',
        '1,0.1,0.3333333333333333', '2,1e-17,']


def test_write_spectrum_csv(tmp_path):
    path = tmp_path / 'spectrum.csv'

    io.write_spectrum_csv(str(path), [-1.0 + 2.0j, -3.0])

    assert path.read_text().splitlines() == ['re,im', '-1.0,2.0',
        '-3.0,0.0']


def test_write_matrix_market(tmp_path):
    path = str(tmp_path / 'operator.mtx')
    matrix = sparse_random(20, 20, density=0.2, format='csr',
        random_state=0)

    io.write_matrix_market(path, matrix)

    assert np.allclose(scipy.io.mmread(path).toarray(), matrix.toarray())


def test_write_manifest(tmp_path):
    path = tmp_path / 'manifest.txt'

    io.write_manifest(str(path), {'surface': 'sphere', 'l': 2, 'n_s': None,
        'resolutions': [0.2, 0.1], 'eps_normal': 0.05})

    assert path.read_text().splitlines() == ['eps_normal = 0.05', 'l = 2',
        'resolutions = 0.2,0.1', 'surface = sphere']
