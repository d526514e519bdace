"""
Run stencil, assembly and time-stepping operations for profiling purposes
"""

import sys
import argparse
from random import randint

import numpy as np

from surfpde import fibonacci_sphere_nodes
from surfpde.operators import assemble, set_num_threads
from surfpde.rbf import LinearOperatorSpec, PhsPolyConfig, \
    surface_operator_weights
from surfpde.timestep import ShiftedSolver, rk4_advance

DEFAULT_SIZE = 10000
DEFAULT_DEGREE = 4
DEFAULT_ROUNDS = 1


def parse_cli_args():
    config = {'prog': sys.argv[0], 'usage': 'python %s' % sys.argv[0],
              'description': __doc__, 'epilog': '\n',
              'formatter_class': argparse.ArgumentDefaultsHelpFormatter}
    parser = argparse.ArgumentParser(**config)

    parser.add_argument('--size', type=int, default=DEFAULT_SIZE,
        help='Nr nodes on the unit sphere')
    parser.add_argument('--degree', type=int, default=DEFAULT_DEGREE,
        help='Polynomial degree')
    parser.add_argument('--rounds', type=int, default=DEFAULT_ROUNDS,
        help='Nr rounds')
    parser.add_argument('--threads', type=int, default=None,
        help='Assembly threads')
    parser.add_argument('--randomize', action='store_true', default=False,
        help='Randomize function input per round')

    operation = parser.add_subparsers(dest='operation', required=True)

    weights = operation.add_parser('weights',
        help='Run `surface_operator_weights`')
    weights.add_argument('--node', type=int, default=0,
        help='Reference node')

    operation.add_parser('assemble', help='Run `assemble`')

    step = operation.add_parser('step',
        help='Run RK4 or implicit steps on the assembled Laplacian')
    step.add_argument('--implicit', action='store_true', default=False,
        help='Profile the shifted implicit solve instead of RK4')

    return parser.parse_args()


if __name__ == '__main__':
    cli = parse_cli_args()
    set_num_threads(cli.threads)

    nodes = fibonacci_sphere_nodes(cli.size)
    config = PhsPolyConfig(l=cli.degree)
    laplacian = LinearOperatorSpec.laplacian()
    dt = 0.5 / cli.size

    match cli.operation:
        case 'weights':
            func = surface_operator_weights

            def get_args():
                return (nodes, cli.node, config, laplacian)

            if cli.randomize:
                def get_args():
                    return (nodes, randint(0, cli.size - 1), config,
                        laplacian)

        case 'assemble':
            func = assemble

            def get_args():
                return (nodes, config, laplacian)

        case 'step':
            L = assemble(nodes, config, laplacian).csr
            u0 = nodes.points[:, 0] * nodes.points[:, 1]
            rng = np.random.default_rng(0)
            solver = ShiftedSolver(L)

            if cli.implicit:
                func = solver.solve

                def get_args():
                    b = rng.standard_normal(cli.size) if cli.randomize \
                        else u0
                    return (dt, b)
            else:
                func = rk4_advance

                def get_args():
                    return (L, u0, dt, 1)

    count = 0
    while count < cli.rounds:
        args = get_args()
        print('round %d:' % count, cli.operation)
        func(*args)
        count += 1

    if cli.operation == 'step':
        print("\033[92m {}\033[00m".format(solver.get_cache_info()))
