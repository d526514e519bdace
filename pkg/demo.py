"""
surfpde demo
"""

import sys
import argparse
import numpy as np
from surfpde import (
    fibonacci_sphere_nodes,
    PhsPolyConfig,
    assemble,
    spectrum,
    poisson_bvp,
)
from surfpde.rbf import LinearOperatorSpec


def parse_cli_args():
    config = {'prog': sys.argv[0], 'usage': 'python %s' % sys.argv[0],
              'description': __doc__, 'epilog': '\n',
              'formatter_class': argparse.ArgumentDefaultsHelpFormatter}

    parser = argparse.ArgumentParser(**config)

    parser.add_argument('--n', type=int, metavar='N', default=1000,
            help='Number of sphere nodes')
    parser.add_argument('--degree', type=int, choices=range(2, 7),
            default=4, help='Polynomial degree')
    parser.add_argument('--n-perp', type=int, default=10,
            help='Normal nodes per stencil')
    parser.add_argument('--eps-normal', type=float, default=0.05,
            help='Normal offset relative to spacing')
    parser.add_argument('--h', type=float, default=0.15,
            help='Spacing of the Poisson run')

    return parser.parse_args()


def strtable(rows):
    template = '\n    {label:<24}{value}'

    return ''.join(template.format(label=label, value=value)
        for label, value in rows)


if __name__ == '__main__':
    args = parse_cli_args()

    config = PhsPolyConfig(l=args.degree, n_perp=args.n_perp,
        eps_normal=args.eps_normal)
    nodes = fibonacci_sphere_nodes(args.n)

    # Laplace-Beltrami of xy is -6xy on the unit sphere
    L = assemble(nodes, config, LinearOperatorSpec.laplacian())
    xy = nodes.points[:, 0] * nodes.points[:, 1]
    residual = np.abs(L @ xy + 6 * xy).max()

    report = spectrum(L)

    sys.stdout.write('\n nr nodes: %d' % len(nodes))
    sys.stdout.write(strtable([
        ('stencil size', L.stencil_size),
        ('max |L xy + 6 xy|', '%.3e' % residual),
        ('max Re(lambda)', '%.3e' % report.max_real),
        ('min Re(lambda)', '%.3e' % report.min_real),
    ]))

    # Manufactured Poisson problem on the sphere
    run = poisson_bvp('sphere', 'u1', l=args.degree, m=config.m,
        n_perp=args.n_perp, eps_normal=args.eps_normal, h=args.h)

    sys.stdout.write('\n\n poisson:')
    sys.stdout.write(strtable([
        ('nodes', run.records[-1].N),
        ('relative error', '%.3e' % run.error),
        ('wall time', '%.2fs' % run.wall_time),
    ]))
    sys.stdout.write('\n\n')
