import pytest

from surfpde.config import (SCHEMA, ConfigError, RunConfig, load_config,
    parse_config)
from surfpde.rbf import PhsPolyConfig


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('# nothing set\n\n')

    config = load_config(str(path))

    assert config.as_dict() == {key: default
        for key, (_, default) in SCHEMA.items()}
    assert config.method_config() == PhsPolyConfig()


def test_override_takes_precedence(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text('l = 2\nn_perp = 6  # even\n')

    assert load_config(str(path)).l == 2
    assert load_config(str(path), l=4).l == 4
    assert load_config(str(path), l=None).l == 2


def test_parse_config():
    values = parse_config('surface = torus\nresolutions = 0.2, 0.1\n')

    assert values == {'surface': 'torus', 'resolutions': '0.2, 0.1'}
    assert RunConfig(**values).resolutions == [0.2, 0.1]


@pytest.mark.parametrize('text, match', [
    ('surface torus\n', ':1: expected key = value'),
    ('l = 2\nbogus = 1\n', ':2: unknown key bogus'),
])
def test_parse_config_names_line(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text, 'run.cfg')


@pytest.mark.parametrize('values, key', [
    ({'l': 2, 'n_perp': 3}, 'n_perp'),
    ({'m': 4}, 'm'),
    ({'l': 'two'}, 'l'),
    ({'h': '-0.1'}, 'h'),
    ({'n': 0}, 'n'),
    ({'surface': 'cube'}, 'surface'),
    ({'operator': 'curl'}, 'operator'),
    ({'solver': 'cg'}, 'solver'),
    ({'resolutions': 'a,b'}, 'resolutions'),
    ({'colour': 'red'}, 'colour'),
])
def test_config_errors_name_key(values, key):
    with pytest.raises(ConfigError) as err:
        RunConfig(**values)

    assert err.value.key == key


def test_config_error_is_value_error():
    assert issubclass(ConfigError, ValueError)


def test_run_config_is_read_only():
    config = RunConfig(n=100)

    with pytest.raises(AttributeError):
        config.n = 200

    with pytest.raises(AttributeError):
        config.missing


def test_method_config_defaults():
    config = RunConfig(l=4)

    assert config.method_config(n_perp=14).n_perp == 14
    assert config.method_config(l=2).l == 4
    assert config.method_config(dim=2).dim == 2


def test_driver_params():
    config = RunConfig(l=4, solver='direct', seed=2)

    params = config.driver_params(['l', 'm', 'method', 'seed'])

    assert params == {'l': 4, 'method': 'direct', 'seed': 2}


def test_updated():
    config = RunConfig(resolutions='0.2,0.1', l=2)

    updated = config.updated(l=4, n=None)

    assert updated.l == 4
    assert updated.resolutions == [0.2, 0.1]
    assert config.l == 2
