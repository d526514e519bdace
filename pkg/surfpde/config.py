"""
Run configuration: flat ``key = value`` files and command-line overrides
"""

import logging
import os

from surfpde import constants
from surfpde.rbf import InvalidConfig, PhsPolyConfig


logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """
    Raised on unknown keys, malformed values or violated constraints
    """

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


def _floats(value):
    if isinstance(value, str):
        value = [item for item in value.split(',') if item.strip()]

    return [float(item) for item in value]


# key -> (type, default)
SCHEMA = {
    'surface': (str, None),
    'input': (str, None),
    'n': (int, None),
    'h': (float, None),
    'dx': (float, None),
    'resolutions': (_floats, None),
    'm': (int, None),
    'l': (int, None),
    'n_s': (int, None),
    'n_perp': (int, None),
    'eps_normal': (float, None),
    'epsilon_hyper': (float, None),
    'operator': (str, 'laplacian'),
    'node': (int, 0),
    'mode': (str, 'dense_full'),
    'k': (int, 6),
    'test': (str, None),
    'init': (str, None),
    'pattern': (str, None),
    'dt': (float, None),
    'final_time': (float, None),
    'solver': (str, None),
    'gamma': (float, 0.1),
    'bumps': (int, 21),
    'r0': (float, 5.0),
    'petals': (int, 25),
    'seed': (int, 0),
    'threads': (int, None),
    'out': (str, None),
}

METHOD_KEYS = ('m', 'l', 'n_s', 'n_perp', 'eps_normal')


def _convert(key, value):
    if key not in SCHEMA:
        raise ConfigError('Unknown configuration key: %s' % key, key)

    if value is None:
        return None

    kind = SCHEMA[key][0]
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError('%s: expected %s, got %r' % (key,
            getattr(kind, '__name__', 'list').lstrip('_'), value),
            key) from None


class RunConfig:
    """
    Resolved configuration of one command-line run. Keys missing from the
    provided values take their schema defaults; *None* means the driver's
    own default applies.

    :param values: key to value mapping
    :type values: dict
    :raises ConfigError: naming the offending key
    """

    def __init__(self, **values):
        resolved = {key: default for key, (_, default) in SCHEMA.items()}
        for key, value in values.items():
            value = _convert(key, value)
            if value is not None:
                resolved[key] = value

        self.__dict__['values'] = resolved
        self.validate()


    def __getattr__(self, key):
        try:
            return self.__dict__['values'][key]
        except KeyError:
            raise AttributeError(key) from None


    def __setattr__(self, key, value):
        raise AttributeError('RunConfig is read-only')


    def __repr__(self):
        return 'RunConfig(%s)' % ', '.join('%s=%r' % item
            for item in self.as_dict().items() if item[1] is not None)


    def as_dict(self):
        return dict(self.__dict__['values'])


    def validate(self):
        """
        :raises ConfigError: on choices or method constraints violated
        """
        values = self.__dict__['values']

        if values['surface'] is not None and \
                values['surface'] not in constants.SURFACES:
            raise ConfigError('surface: must be one of %s' %
                ', '.join(constants.SURFACES), 'surface')

        if values['operator'] not in constants.OPERATORS:
            raise ConfigError('operator: must be one of %s' %
                ', '.join(constants.OPERATORS), 'operator')

        if values['mode'] not in constants.SPECTRUM_MODES:
            raise ConfigError('mode: must be one of %s' %
                ', '.join(constants.SPECTRUM_MODES), 'mode')

        if values['solver'] is not None and \
                values['solver'] not in constants.SOLVERS:
            raise ConfigError('solver: must be one of %s' %
                ', '.join(constants.SOLVERS), 'solver')

        for key in ('n', 'n_s', 'threads', 'k'):
            if values[key] is not None and values[key] < 1:
                raise ConfigError('%s: must be positive' % key, key)

        for key in ('h', 'dx', 'dt', 'final_time', 'eps_normal'):
            if values[key] is not None and not values[key] > 0:
                raise ConfigError('%s: must be positive' % key, key)

        if any(values[key] is not None for key in METHOD_KEYS):
            try:
                self.method_config()
            except InvalidConfig as err:
                key = str(err).split(':')[0].split(',')[0].strip()
                raise ConfigError(str(err), key) from err


    def method_config(self, dim=3, **defaults):
        """
        Validated method parameters; unset keys fall back to *defaults* and
        then to the library defaults.

        :rtype: PhsPolyConfig
        :raises InvalidConfig: on violated method constraints
        """
        params = {key: value for key, value in defaults.items()
            if value is not None}
        params.update({key: getattr(self, key) for key in METHOD_KEYS
            if getattr(self, key) is not None})

        return PhsPolyConfig(dim=dim, **params)


    def driver_params(self, accepted):
        """
        Set values among the accepted driver parameters, with *solver*
        passed on as *method*.

        :rtype: dict
        """
        values = dict(self.as_dict(), method=self.solver)

        return {key: values[key] for key in accepted
            if values.get(key) is not None}


    def updated(self, **values):
        """
        :rtype: RunConfig
        """
        merged = self.as_dict()
        merged.update({key: value for key, value in values.items()
            if value is not None})

        return RunConfig(**merged)


def parse_config(text, source='<string>'):
    """
    Parses ``key = value`` lines with ``#`` comments into raw values.

    :rtype: dict
    :raises ConfigError: on malformed lines and unknown keys, naming the line
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ConfigError('%s:%d: expected key = value' % (source,
                lineno))

        if key not in SCHEMA:
            raise ConfigError('%s:%d: unknown key %s' % (source, lineno, key),
                key)

        values[key] = value.strip()

    return values


def load_config(path, **overrides):
    """
    Loads a configuration file; non-*None* overrides take precedence over
    file values.

    :param path: configuration file
    :type path: str
    :rtype: RunConfig
    :raises ConfigError: on unknown keys, type mismatches or constraint
        violations, naming the offending key
    """
    with open(path, encoding='utf-8') as f:
        values = parse_config(f.read(), os.path.basename(path))

    values.update({key: value for key, value in overrides.items()
        if value is not None})
    logger.debug('Loaded %d key(s) from %s', len(values), path)

    return RunConfig(**values)
