"""
surfpde command line: node generation, stencil weights, operator assembly,
spectra and the benchmark problems
"""

import argparse
import logging
import os
import sys

import numpy as np

from surfpde import io
from surfpde.analysis import spectrum
from surfpde.config import SCHEMA, ConfigError, RunConfig, load_config
from surfpde.geometry import (IMPLICIT_SURFACES, bumpy_sphere_nodes,
    fibonacci_sphere_nodes, implicit_surface_nodes, load_point_cloud,
    rose_curve_nodes, torus_nodes)
from surfpde.operators import assemble, set_num_threads
from surfpde.problems import REGISTRY, converge
from surfpde.rbf import LinearOperatorSpec, surface_operator_weights


logger = logging.getLogger(__name__)

_handler = None


class _StderrHandler(logging.StreamHandler):
    """
    Stream handler writing to whatever *sys.stderr* currently is
    """

    def __init__(self):
        super().__init__(sys.stderr)


    @property
    def stream(self):
        return sys.stderr


    @stream.setter
    def stream(self, value):
        pass


HELP = {
    'surface': 'Surface preset',
    'input': 'Point cloud file (csv or ply) used instead of a preset',
    'n': 'Node count',
    'h': 'Target node spacing',
    'dx': 'Grid width of the moving sphere',
    'resolutions': 'Comma-separated resolutions for converge',
    'm': 'PHS exponent',
    'l': 'Polynomial degree',
    'n_s': 'On-surface stencil size',
    'n_perp': 'Number of off-surface points',
    'eps_normal': 'Off-surface spacing relative to h',
    'epsilon_hyper': 'Hyperviscosity scaling',
    'operator': 'Differential operator',
    'node': 'Reference node of the weights command',
    'mode': 'Spectrum mode',
    'k': 'Number of extremal eigenvalues',
    'test': 'Poisson test function',
    'init': 'Initial condition of the advection problem',
    'pattern': 'Turing pattern preset',
    'dt': 'Time step',
    'final_time': 'Final time',
    'solver': 'Linear solver',
    'gamma': 'Bump amplitude of the bumpy sphere',
    'bumps': 'Bump frequency of the bumpy sphere',
    'r0': 'Radial offset of the rose curve',
    'petals': 'Petal count of the rose curve',
    'seed': 'Random seed',
    'threads': 'Assembly threads (falls back to SURFPDE_THREADS)',
    'out': 'Output file (nodes) or directory',
}

# command -> (resolution key, default resolution, default converge sweep)
PROBLEM_COMMANDS = {
    'poisson': ('h', 0.1, [0.2, 0.1]),
    'heat': ('n', 1000, [500, 1000]),
    'advect': ('n', 1000, [500, 1000]),
    'turing': ('n', 4000, None),
    'moving': ('dx', 0.2, [0.4, 0.2]),
}

CONVERGENT = [name for name, (_, _, sweep) in PROBLEM_COMMANDS.items()
    if sweep is not None]


class UsageError(ValueError):
    """
    Raised on malformed command lines
    """
    pass


class _Parser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError('%s\n%s: error: %s' % (self.format_usage().rstrip(),
            self.prog, message))


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument('--config', metavar='PATH',
        help='Configuration file of key = value lines')
    common.add_argument('--verbose', action='store_true', default=False,
        help='Log at debug level')
    for key, (_, default) in SCHEMA.items():
        text = HELP[key]
        if default is not None:
            text += ' (default: %s)' % default
        common.add_argument('--' + key.replace('_', '-'), dest=key,
            metavar=key.upper(), help=text)

    parser = _Parser(prog='surfpde', description=__doc__)
    command = parser.add_subparsers(dest='command', required=True,
        parser_class=_Parser)

    command.add_parser('nodes', parents=[common],
        help='Generate or load a node set and write it as PLY or CSV')
    command.add_parser('weights', parents=[common],
        help='Collapsed stencil weights at one node')
    command.add_parser('assemble', parents=[common],
        help='Assemble an operator matrix in Matrix-Market format')
    command.add_parser('spectrum', parents=[common],
        help='Eigenvalues of an assembled operator')
    command.add_parser('poisson', parents=[common],
        help='Surface Poisson problem')
    command.add_parser('heat', parents=[common],
        help='Heat equation on the sphere or forced heat on the torus')
    command.add_parser('advect', parents=[common],
        help='Transport with hyperviscosity over one period')
    command.add_parser('turing', parents=[common],
        help='Turing pattern formation')
    command.add_parser('moving', parents=[common],
        help='Diffusion on the expanding sphere')
    sweep = command.add_parser('converge', parents=[common],
        help='Error table over increasing resolutions')
    sweep.add_argument('problem', choices=CONVERGENT,
        help='Problem to refine')

    return parser


def resolve_config(args):
    """
    Configuration file values overridden by the provided flags.

    :rtype: RunConfig
    :raises ConfigError: naming the offending key
    """
    overrides = {key: getattr(args, key) for key in SCHEMA}
    if args.config:
        return load_config(args.config, **overrides)

    return RunConfig(**overrides)


def configure_logging(verbose=False):
    global _handler

    root = logging.getLogger('surfpde')
    if _handler is None:
        _handler = _StderrHandler()
        _handler.setFormatter(logging.Formatter(
            '%(levelname)s %(name)s: %(message)s'))
        root.addHandler(_handler)

    root.setLevel(logging.DEBUG if verbose else logging.INFO)


def build_nodes(config, surface='sphere'):
    """
    Node set of the configured surface, or of the input point cloud.

    :rtype: SurfaceNodeSet
    """
    if config.input:
        return load_point_cloud(config.input)

    surface = config.surface or surface
    match surface:
        case 'sphere':
            if config.h is not None and config.n is None:
                return implicit_surface_nodes(IMPLICIT_SURFACES['sphere'](),
                    config.h, config.seed)
            return fibonacci_sphere_nodes(config.n or 2500)
        case 'torus':
            return torus_nodes(config.n or 2000)
        case 'tooth' | 'dziuk':
            return implicit_surface_nodes(IMPLICIT_SURFACES[surface](),
                config.h or 0.1, config.seed)
        case 'bumpy_sphere':
            return bumpy_sphere_nodes(config.gamma, config.bumps,
                config.n or 5000)
        case 'rose':
            return rose_curve_nodes(config.r0, config.petals,
                config.h or 0.05)

    raise ConfigError('surface: unsupported surface %s' % surface, 'surface')


def operator_specs(name, dim=3):
    """
    Operators behind an operator name, with a column suffix each.

    :rtype: list[tuple[str, LinearOperatorSpec]]
    :raises ConfigError: for operators needing a velocity field
    """
    match name:
        case 'identity':
            return [('', LinearOperatorSpec.identity())]
        case 'laplacian':
            return [('', LinearOperatorSpec.laplacian())]
        case 'laplacian_power':
            return [('', LinearOperatorSpec.laplacian_power(2))]
        case 'gradient':
            return [('_' + axis, LinearOperatorSpec.gradient(a))
                for a, axis in enumerate('xyz'[:dim])]

    raise ConfigError('operator: %s needs a velocity field, run advect '
        'instead' % name, 'operator')


def _output_dir(config, command):
    out = config.out or command
    os.makedirs(out, exist_ok=True)

    return out


def _manifest(path, config, **extra):
    io.write_manifest(path, dict(config.as_dict(), **extra))


def cmd_nodes(config, args):
    node_set = build_nodes(config)
    out = config.out or 'nodes.ply'
    stem, ext = os.path.splitext(out)

    if os.path.dirname(out):
        os.makedirs(os.path.dirname(out), exist_ok=True)

    match ext.lower():
        case '.ply':
            io.write_ply(out, node_set)
        case '.csv':
            io.write_xyz_csv(out, node_set)
        case _:
            raise ConfigError('out: node files end in .ply or .csv', 'out')

    _manifest(stem + '.manifest.txt', config, command='nodes')

    return 'nodes: N=%d h=%.6g -> %s' % (len(node_set), node_set.h, out)


def cmd_weights(config, args):
    node_set = build_nodes(config)
    method = config.method_config(dim=node_set.dim)
    i = config.node
    if not 0 <= i < len(node_set):
        raise ConfigError('node: index %d outside 0..%d' % (i,
            len(node_set) - 1), 'node')

    specs = operator_specs(config.operator, node_set.dim)
    weights = [surface_operator_weights(node_set, i, method, op)
        for _, op in specs]
    indices = weights[0].indices
    coordinates = 'xyz'[:node_set.dim]

    out = _output_dir(config, 'weights')
    header = ['index'] + list(coordinates) + ['weight' + suffix
        for suffix, _ in specs]
    rows = [[j, *node_set.points[j], *(w.values[c] for w in weights)]
        for c, j in enumerate(indices)]
    io.write_csv(os.path.join(out, 'weights.csv'), header, rows)
    _manifest(os.path.join(out, 'manifest.txt'), config, command='weights')

    sums = ', '.join('%.6g' % np.sum(w.values) for w in weights)
    return 'weights: node %d, %d weights, sum %s' % (i, len(indices), sums)


def cmd_assemble(config, args):
    node_set = build_nodes(config)
    method = config.method_config(dim=node_set.dim)
    out = _output_dir(config, 'assemble')

    nnz = 0
    for suffix, op in operator_specs(config.operator, node_set.dim):
        matrix = assemble(node_set, method, op)
        io.write_matrix_market(os.path.join(out, 'operator%s.mtx' % suffix),
            matrix.csr)
        nnz += matrix.csr.nnz

    _manifest(os.path.join(out, 'manifest.txt'), config, command='assemble')

    return 'assemble: %s on N=%d, nnz=%d' % (config.operator, len(node_set),
        nnz)


def cmd_spectrum(config, args):
    node_set = build_nodes(config)
    specs = operator_specs(config.operator, node_set.dim)
    if len(specs) > 1:
        raise ConfigError('operator: spectra need a scalar operator',
            'operator')

    method = config.method_config(dim=node_set.dim)
    matrix = assemble(node_set, method, specs[0][1])
    report = spectrum(matrix, config.mode, config.k)

    out = _output_dir(config, 'spectrum')
    io.write_spectrum_csv(os.path.join(out, 'spectrum.csv'),
        report.eigenvalues)
    _manifest(os.path.join(out, 'manifest.txt'), config, command='spectrum')

    return 'spectrum: N=%d max Re(lambda) = %.6e, min Re(lambda) = %.6e' % (
        len(node_set), report.max_real, report.min_real)


def problem_name(command, surface):
    """
    Registered driver behind a problem command on the provided surface.

    :rtype: str
    :raises ConfigError: for surfaces the problem does not run on
    """
    match command:
        case 'heat' | 'advect':
            if surface not in (None, 'sphere', 'torus'):
                raise ConfigError('surface: %s runs on sphere or torus'
                    % command, 'surface')
            suffix = 'torus' if surface == 'torus' else 'sphere'
            return '%s_%s' % (command, suffix)

    return command


def _resolution(config, command):
    key, default, _ = PROBLEM_COMMANDS[command]
    value = getattr(config, key)
    value = default if value is None else value

    return int(value) if key == 'n' else value


def _sweep(config, command):
    key, _, sweep = PROBLEM_COMMANDS[command]
    values = config.resolutions or sweep

    return [int(v) for v in values] if key == 'n' else list(values)


def write_run(out, run):
    """
    Writes the error table, the wall times, the final fields and any
    problem-specific statistics of a run.
    """
    io.write_csv(os.path.join(out, 'errors.csv'),
        ['resolution', 'N', 'h', 'error', 'eoc'], run.error_rows())
    io.write_csv(os.path.join(out, 'timings.csv'),
        ['resolution', 'N', 'wall_time'], run.timing_rows())

    if run.node_set is not None:
        io.write_ply(os.path.join(out, 'solution.ply'), run.node_set,
            run.fields)

    stats = dict(run.stats)
    history = stats.pop('history', None)
    if history is not None:
        io.write_csv(os.path.join(out, 'history.csv'),
            ['time', 'N', 'radius', 'error'], history)

    if stats:
        io.write_csv(os.path.join(out, 'stats.csv'), ['name', 'value'],
            sorted(stats.items()))


def _summary(name, run):
    record = run.records[-1]
    text = '%s: N=%d h=%.4g' % (name, record.N, record.h)

    if record.error is not None:
        text += ' error=%.6e' % record.error

    orders = run.eoc()
    if orders:
        text += ' eoc=%s' % ','.join('%.3f' % order for order in orders)

    if 'u_std' in run.stats:
        text += ' u_std=%.4g' % run.stats['u_std']

    return text


def _problem(config, command):
    name = problem_name(command, config.surface)
    cls = REGISTRY[name]

    return cls(**config.driver_params(cls.defaults))


def cmd_problem(config, args):
    command = args.command
    problem = _problem(config, command)

    if config.input:
        run = problem.run_on(load_point_cloud(config.input))
    else:
        run = problem.run(_resolution(config, command))

    out = _output_dir(config, command)
    write_run(out, run)
    _manifest(os.path.join(out, 'manifest.txt'), config, command=command,
        problem=problem.name)

    return _summary(problem.name, run)


def cmd_converge(config, args):
    problem = _problem(config, args.problem)
    run = converge(problem, _sweep(config, args.problem))

    out = _output_dir(config, 'converge')
    write_run(out, run)
    _manifest(os.path.join(out, 'manifest.txt'), config, command='converge',
        problem=problem.name)

    return _summary(problem.name, run)


COMMANDS = {
    'nodes': cmd_nodes,
    'weights': cmd_weights,
    'assemble': cmd_assemble,
    'spectrum': cmd_spectrum,
    'poisson': cmd_problem,
    'heat': cmd_problem,
    'advect': cmd_problem,
    'turing': cmd_problem,
    'moving': cmd_problem,
    'converge': cmd_converge,
}


def run(argv=None):
    """
    Runs one command.

    :param argv: [optional] arguments without the program name. Defaults to
        ``sys.argv[1:]``.
    :type argv: list[str]
    :returns: 0 on success, 1 on usage or configuration errors, 2 on
        numerical failures
    :rtype: int
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose)
        config = resolve_config(args)
        set_num_threads(config.threads)
        summary = COMMANDS[args.command](config, args)
    except SystemExit as err:
        return 0 if err.code is None else err.code
    except (ValueError, OSError) as err:
        sys.stderr.write('%s\n' % err)
        return 1
    except ArithmeticError as err:
        logger.error('%s failed: %s', ' '.join(argv or sys.argv[1:]), err)
        sys.stderr.write('numerical failure: %s\n' % err)
        return 2
    finally:
        set_num_threads(None)

    sys.stdout.write(summary + '\n')

    return 0


def main():
    sys.exit(run())
