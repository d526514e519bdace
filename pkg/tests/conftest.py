import pytest

from surfpde import fibonacci_sphere_nodes
from surfpde.operators import set_num_threads


DEFAULT_SPHERE_SIZES = [400, 800]


def pytest_addoption(parser):
    parser.addoption('--extended', action='store_true', default=False,
        help='Run the acceptance-scale convergence and stability studies')
    parser.addoption('--threads', type=int, default=None,
        help='Worker threads used for operator assembly')

option = None

def pytest_configure(config):
    global option
    option = config.option
    set_num_threads(option.threads)


extended = pytest.mark.skipif('not config.getoption("extended")',
    reason='acceptance-scale run, use --extended')


def sphere_node_sets():
    return [fibonacci_sphere_nodes(N) for N in DEFAULT_SPHERE_SIZES]


@pytest.fixture(scope='session')
def sphere():
    return fibonacci_sphere_nodes(DEFAULT_SPHERE_SIZES[0])
