"""
Abstract problem driver and run records
"""

import logging
import time
from abc import ABCMeta, abstractmethod
from collections import namedtuple

from surfpde.analysis import eoc


logger = logging.getLogger(__name__)


REGISTRY = {}


RunRecord = namedtuple('RunRecord',
    ['resolution', 'N', 'h', 'error', 'wall_time'])


class ProblemRun:
    """
    Outcome of one or more runs of a problem driver at increasing
    resolution.

    :param problem: problem name
    :type problem: str
    :param params: resolved configuration
    :type params: dict
    :param records: one record per resolution, coarsest first
    :type records: list[RunRecord]
    :param node_set: [optional] nodes of the finest run
    :type node_set: SurfaceNodeSet
    :param fields: [optional] final fields of the finest run
    :type fields: dict
    :param stats: [optional] summary statistics of the finest run
    :type stats: dict
    :raises ValueError: on negative errors or an empty record list
    """

    __slots__ = ('problem', 'params', 'records', 'node_set', 'fields',
        'stats')

    def __init__(self, problem, params, records, node_set=None, fields=None,
            stats=None):
        records = tuple(records)
        if not records:
            raise ValueError('A run needs at least one record')

        for record in records:
            if record.error is not None and not record.error >= 0:
                raise ValueError('Recorded errors must be nonnegative')

        self.problem = problem
        self.params = dict(params)
        self.records = records
        self.node_set = node_set
        self.fields = dict(fields or {})
        self.stats = dict(stats or {})


    def __repr__(self):
        return '<ProblemRun %s runs=%d error=%s>' % (self.problem,
            len(self.records), self.error)


    @property
    def error(self):
        return self.records[-1].error


    @property
    def errors(self):
        return [record.error for record in self.records]


    @property
    def hs(self):
        return [record.h for record in self.records]


    @property
    def wall_time(self):
        return sum(record.wall_time for record in self.records)


    def eoc(self):
        """
        Empirical orders between consecutive resolutions; empty for a single
        run or when errors are unavailable.

        :rtype: list[float]
        """
        if len(self.records) < 2 or None in self.errors:
            return []

        return eoc(self.errors, self.hs)


    def error_rows(self):
        """
        Rows ``resolution, N, h, error, eoc`` with an empty order on the
        first row.

        :rtype: list[list]
        """
        orders = [''] + self.eoc()
        if len(orders) != len(self.records):
            orders = [''] * len(self.records)

        return [[r.resolution, r.N, r.h, '' if r.error is None else r.error,
            order] for r, order in zip(self.records, orders)]


    def timing_rows(self):
        return [[r.resolution, r.N, r.wall_time] for r in self.records]


    @classmethod
    def merged(cls, runs):
        """
        Joins single-resolution runs of the same problem, keeping the fields
        of the last one.

        :rtype: ProblemRun
        """
        runs = list(runs)
        last = runs[-1]
        records = [record for run in runs for record in run.records]

        return cls(last.problem, last.params, records, last.node_set,
            last.fields, last.stats)


class BaseProblem(metaclass=ABCMeta):
    """
    Abstract base class of the benchmark drivers.

    .. note:: Concrete drivers declare their parameters with defaults in
        *defaults* and implement node generation and the solve. Named
        subclasses are registered in :data:`REGISTRY`.

    :raises ValueError: on unknown parameters
    """

    name = None
    defaults = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.name:
            REGISTRY[cls.name] = cls


    def __init__(self, **params):
        unknown = set(params) - set(self.defaults)
        if unknown:
            raise ValueError('Unknown parameter(s) for %s: %s' % (self.name,
                ', '.join(sorted(unknown))))

        self.params = dict(self.defaults)
        self.params.update({key: value for key, value in params.items()
            if value is not None})


    def __repr__(self):
        return '<%s %s>' % (type(self).__name__, self.params)


    @abstractmethod
    def discretize(self, resolution):
        """
        Node set at the provided resolution (node count or spacing,
        depending on the problem).

        :rtype: SurfaceNodeSet
        """


    @abstractmethod
    def solve(self, node_set):
        """
        Runs the problem on *node_set*.

        :returns: final fields, the relative error (*None* if the problem has
            no exact solution) and summary statistics
        :rtype: tuple[dict, float, dict]
        """


    def spacing(self, node_set):
        return node_set.h


    def run(self, resolution):
        """
        Discretizes and solves at one resolution.

        :rtype: ProblemRun
        """
        start = time.perf_counter()
        node_set = self.discretize(resolution)

        return self.run_on(node_set, resolution, start)


    def run_on(self, node_set, resolution=None, start=None):
        """
        Solves on a given node set; the resolution defaults to its size.

        :rtype: ProblemRun
        """
        if start is None:
            start = time.perf_counter()
        resolution = len(node_set) if resolution is None else resolution
        fields, error, stats = self.solve(node_set)
        elapsed = time.perf_counter() - start

        record = RunRecord(resolution, len(node_set), self.spacing(node_set),
            error, elapsed)
        logger.info('%s at %s: N=%d error=%s (%.2fs)', self.name, resolution,
            len(node_set), error, elapsed)

        return ProblemRun(self.name, self.params, [record], node_set, fields,
            stats)


def converge(problem, resolutions, **params):
    """
    Runs a driver over increasing resolutions and tabulates the empirical
    orders of convergence.

    :param problem: configured driver, or the registered name of one
    :type problem: BaseProblem | str
    :param resolutions: resolutions, coarsest first
    :type resolutions: list
    :param params: driver parameters when *problem* is a name
    :rtype: ProblemRun
    :raises ValueError: for unknown problem names
    """
    if isinstance(problem, str):
        if problem not in REGISTRY:
            raise ValueError('Unknown problem: %s' % problem)
        problem = REGISTRY[problem](**params)

    run = ProblemRun.merged(problem.run(resolution)
        for resolution in resolutions)

    for row in run.error_rows():
        logger.info('%s: %s', problem.name, row)

    return run
