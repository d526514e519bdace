import logging

import numpy as np
import pytest

from surfpde import cli, io
from surfpde.operators import set_num_threads
from surfpde.rbf import SingularStencil
from tests.conftest import option


@pytest.fixture(autouse=True)
def restore_threads():
    yield
    set_num_threads(option.threads)


def _lines(path):
    return path.read_text().splitlines()


def test_help(capsys):
    assert cli.run(['--help']) == 0
    assert 'usage' in capsys.readouterr().out


def test_unknown_flag(capsys):
    assert cli.run(['nodes', '--colour', 'red']) == 1
    assert 'usage' in capsys.readouterr().err


def test_missing_command():
    assert cli.run([]) == 1


def test_nodes_torus(tmp_path, capsys):
    out = tmp_path / 'torus.ply'

    assert cli.run(['nodes', '--surface', 'torus', '--n', '2000',
        '--out', str(out)]) == 0

    points, normals, fields = io.read_ply(str(out))
    assert abs(len(points) - 2000) <= 100
    assert normals is not None and not fields
    assert capsys.readouterr().out.startswith('nodes: N=%d' % len(points))

    manifest = _lines(tmp_path / 'torus.manifest.txt')
    assert 'surface = torus' in manifest
    assert 'n = 2000' in manifest
    assert 'command = nodes' in manifest


def test_nodes_csv_round_trip(tmp_path):
    first = tmp_path / 'sphere.csv'
    second = tmp_path / 'copy.ply'

    assert cli.run(['nodes', '--n', '300', '--out', str(first)]) == 0
    assert cli.run(['nodes', '--input', str(first), '--out',
        str(second)]) == 0

    points, _, _ = io.read_ply(str(second))
    assert len(points) == 300


def test_nodes_rejects_extension(tmp_path):
    assert cli.run(['nodes', '--n', '100', '--out',
        str(tmp_path / 'nodes.vtk')]) == 1


def test_weights(tmp_path, capsys):
    out = tmp_path / 'weights'

    assert cli.run(['weights', '--n', '400', '--node', '5', '--l', '2',
        '--out', str(out)]) == 0

    lines = _lines(out / 'weights.csv')
    assert lines[0] == 'index,x,y,z,weight'
    assert len(lines) == 21
    assert int(lines[1].split(',')[0]) == 5
    values = [float(line.split(',')[-1]) for line in lines[1:]]
    assert abs(sum(values)) <= 1e-8 * sum(abs(v) for v in values)
    assert 'weights: node 5, 20 weights' in capsys.readouterr().out


def test_weights_rejects_node(tmp_path):
    assert cli.run(['weights', '--n', '100', '--node', '100', '--out',
        str(tmp_path)]) == 1


def test_assemble_gradient(tmp_path):
    out = tmp_path / 'assemble'

    assert cli.run(['assemble', '--n', '300', '--operator', 'gradient',
        '--out', str(out)]) == 0

    for axis in 'xyz':
        assert (out / ('operator_%s.mtx' % axis)).exists()


def test_assemble_rejects_directional(tmp_path, capsys):
    assert cli.run(['assemble', '--n', '300', '--operator', 'directional',
        '--out', str(tmp_path)]) == 1
    assert 'operator' in capsys.readouterr().err


def test_spectrum(tmp_path, capsys):
    out = tmp_path / 'spectrum'

    assert cli.run(['spectrum', '--n', '200', '--out', str(out)]) == 0

    lines = _lines(out / 'spectrum.csv')
    assert lines[0] == 're,im'
    assert len(lines) == 201
    assert 'max Re(lambda)' in capsys.readouterr().out


def test_config_file_constraint(tmp_path, capsys):
    path = tmp_path / 'run.cfg'
    path.write_text('l = 2\nn_perp = 3\n')

    assert cli.run(['weights', '--config', str(path), '--out',
        str(tmp_path)]) == 1
    assert 'n_perp' in capsys.readouterr().err


def test_flag_overrides_config_file(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('l = 2\nn_perp = 3\n')

    assert cli.run(['weights', '--config', str(path), '--n', '400',
        '--n-perp', '4', '--out', str(tmp_path / 'weights')]) == 0


def test_missing_input(tmp_path):
    assert cli.run(['nodes', '--input', str(tmp_path / 'absent.csv'),
        '--out', str(tmp_path / 'nodes.ply')]) == 1


def test_poisson(tmp_path, capsys):
    out = tmp_path / 'poisson'

    assert cli.run(['poisson', '--h', '0.3', '--test', 'u2', '--out',
        str(out)]) == 0

    summary = capsys.readouterr().out
    assert summary.startswith('poisson: N=')
    assert 'error=' in summary

    errors = _lines(out / 'errors.csv')
    assert errors[0] == 'resolution,N,h,error,eoc'
    assert float(errors[1].split(',')[3]) <= 1e-8
    assert (out / 'solution.ply').exists()
    assert (out / 'timings.csv').exists()
    assert 'problem = poisson' in _lines(out / 'manifest.txt')


def test_converge_poisson(tmp_path, capsys):
    out = tmp_path / 'converge'

    assert cli.run(['converge', 'poisson', '--test', 'u1', '--resolutions',
        '0.4,0.3', '--out', str(out)]) == 0

    assert len(_lines(out / 'errors.csv')) == 3
    assert 'eoc=' in capsys.readouterr().out


def test_converge_rejects_problem():
    assert cli.run(['converge', 'turing']) == 1


def test_problem_rejects_surface(tmp_path):
    assert cli.run(['heat', '--surface', 'tooth', '--out',
        str(tmp_path)]) == 1


def test_numerical_failure(tmp_path, monkeypatch, capsys):
    def singular(*args, **kwargs):
        raise SingularStencil('saddle system is singular', 0)

    monkeypatch.setattr(cli, 'surface_operator_weights', singular)

    assert cli.run(['weights', '--n', '100', '--out', str(tmp_path)]) == 2
    assert 'numerical failure' in capsys.readouterr().err


def test_configure_logging_is_idempotent():
    cli.configure_logging()
    cli.configure_logging(verbose=True)

    logger = logging.getLogger('surfpde')
    assert logger.level == logging.DEBUG
    assert logger.handlers.count(cli._handler) == 1
    cli.configure_logging()


def test_problem_name():
    assert cli.problem_name('heat', None) == 'heat_sphere'
    assert cli.problem_name('advect', 'torus') == 'advect_torus'
    assert cli.problem_name('poisson', 'tooth') == 'poisson'


def test_resolution_sweep():
    config = cli.RunConfig(resolutions='500,1000')

    assert cli._sweep(config, 'heat') == [500, 1000]
    assert cli._sweep(cli.RunConfig(), 'moving') == [0.4, 0.2]
    assert cli._resolution(cli.RunConfig(n=700), 'turing') == 700
    assert np.isclose(cli._resolution(cli.RunConfig(), 'poisson'), 0.1)


def test_turing_surface_and_spacing():
    problem = cli._problem(cli.RunConfig(surface='tooth', h=0.2), 'turing')

    assert problem.params['surface'] == 'tooth'
    assert problem.params['h'] == 0.2
