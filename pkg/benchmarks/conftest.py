import pytest

from surfpde.operators import set_num_threads

DEFAULT_SIZE = 10000
DEFAULT_DEGREE = 4
DEFAULT_ROUNDS = 10
DEFAULT_NODE = 0


def pytest_addoption(parser):
    parser.addoption('--size', type=int, default=DEFAULT_SIZE,
        help='Nr nodes on the unit sphere')
    parser.addoption('--degree', type=int, default=DEFAULT_DEGREE,
        help='Polynomial degree of the stencils')
    parser.addoption('--node', type=int, default=DEFAULT_NODE,
        help='Reference node of the single-stencil benchmark')
    parser.addoption('--rounds', type=int, default=DEFAULT_ROUNDS,
        help='Nr rounds per benchmark')
    parser.addoption('--randomize', action='store_true', default=False,
        help='Randomize the reference node and right-hand side per round')
    parser.addoption('--threads', type=int, default=None,
        help='Worker threads used for operator assembly')

option = None

def pytest_configure(config):
    global option
    option = config.option
    set_num_threads(option.threads)
