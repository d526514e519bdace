"""
Readers and writers for point clouds, result tables, operators and run
manifests
"""

import csv
import logging

import numpy as np
import scipy.io


logger = logging.getLogger(__name__)


class PointCloudError(ValueError):
    """
    Raised when a point cloud file cannot be parsed
    """
    pass


def _format(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))

    return str(value)


def _parse_row(values, path, lineno):
    try:
        row = [float(v) for v in values]
    except ValueError:
        raise PointCloudError('%s:%d: non-numeric value' % (path, lineno))

    if not np.isfinite(row).all():
        raise PointCloudError('%s:%d: non-finite value' % (path, lineno))

    return row


def _is_number(value):
    try:
        float(value)
    except ValueError:
        return False
    return True


def read_xyz_csv(path):
    """
    Reads rows ``x,y,z[,nx,ny,nz]``. A first line without any numeric field
    is taken as header; a partly numeric one is a malformed row.

    :param path: file path
    :type path: str
    :returns: points and normals (*None* if absent)
    :rtype: tuple
    :raises PointCloudError: on malformed rows, naming the line number
    """
    rows = []
    width = None

    with open(path, 'r', encoding='utf-8', newline='') as f:
        for lineno, values in enumerate(csv.reader(f), start=1):
            values = [v.strip() for v in values if v.strip()]
            if not values:
                continue

            if lineno == 1 and not any(map(_is_number, values)):
                continue

            if len(values) not in (3, 6):
                raise PointCloudError('%s:%d: expected 3 or 6 columns, got %d'
                    % (path, lineno, len(values)))

            if width is None:
                width = len(values)
            elif len(values) != width:
                raise PointCloudError('%s:%d: inconsistent column count'
                    % (path, lineno))

            rows.append(_parse_row(values, path, lineno))

    data = np.array(rows, dtype=float).reshape(-1, width or 3)
    normals = data[:, 3:6] if width == 6 else None

    return data[:, :3], normals


def read_ply(path):
    """
    Reads the vertex element of an ASCII PLY file.

    :param path: file path
    :type path: str
    :returns: points, normals (*None* if absent) and a dict of any further
        scalar vertex properties
    :rtype: tuple
    :raises PointCloudError: on unsupported or malformed files
    """
    with open(path, 'r', encoding='utf-8') as f:
        lines = f.read().splitlines()

    if not lines or lines[0].strip() != 'ply':
        raise PointCloudError('%s:1: missing ply magic' % path)

    count = None
    properties = []
    current = None
    body = None

    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens or tokens[0] in ('comment', 'obj_info'):
            continue

        match tokens[0]:
            case 'format':
                if tokens[1:2] != ['ascii']:
                    raise PointCloudError('%s:%d: only ASCII PLY supported'
                        % (path, lineno))
            case 'element':
                current = tokens[1]
                if current == 'vertex':
                    count = int(tokens[2])
            case 'property':
                if current == 'vertex':
                    properties.append(tokens[-1])
            case 'end_header':
                body = lineno
                break

    if body is None or count is None:
        raise PointCloudError('%s: incomplete PLY header' % path)

    for name in ('x', 'y', 'z'):
        if name not in properties:
            raise PointCloudError('%s: vertex property %s missing'
                % (path, name))

    rows = []
    for lineno in range(body + 1, body + 1 + count):
        if lineno > len(lines):
            raise PointCloudError('%s:%d: unexpected end of file'
                % (path, lineno))
        values = lines[lineno - 1].split()
        if len(values) != len(properties):
            raise PointCloudError('%s:%d: expected %d values, got %d'
                % (path, lineno, len(properties), len(values)))
        rows.append(_parse_row(values, path, lineno))

    data = np.array(rows, dtype=float).reshape(-1, len(properties))
    column = {name: data[:, j] for j, name in enumerate(properties)}
    points = np.column_stack([column['x'], column['y'], column['z']])

    normals = None
    if all(name in column for name in ('nx', 'ny', 'nz')):
        normals = np.column_stack([column['nx'], column['ny'], column['nz']])

    fields = {name: values for name, values in column.items()
        if name not in ('x', 'y', 'z', 'nx', 'ny', 'nz')}

    return points, normals, fields


def _as_3d(array):
    array = np.asarray(array, dtype=float)
    if array.shape[1] == 2:
        array = np.column_stack([array, np.zeros(len(array))])

    return array


def write_ply(path, node_set, fields=None):
    """
    Writes an ASCII PLY file with positions, normals and optional per-vertex
    scalar fields.

    :param path: output path
    :type path: str
    :param node_set: nodes to write
    :type node_set: SurfaceNodeSet
    :param fields: [optional] name to length-N array mapping
    :type fields: dict
    """
    fields = fields or {}
    points = _as_3d(node_set.points)
    normals = _as_3d(node_set.normals)
    columns = [points, normals] + [np.asarray(v, dtype=float)[:, None]
        for v in fields.values()]
    data = np.hstack(columns)

    header = ['ply', 'format ascii 1.0', 'element vertex %d' % len(points)]
    header += ['property double %s' % name
        for name in ['x', 'y', 'z', 'nx', 'ny', 'nz'] + list(fields)]
    header += ['end_header']

    with open(path, 'w', encoding='utf-8') as f:
        f.write('\n'.join(header) + '\n')
        for row in data:
            f.write(' '.join(_format(v) for v in row) + '\n')

    logger.debug('Wrote %d vertices to %s', len(points), path)


def write_xyz_csv(path, node_set):
    rows = np.hstack([node_set.points, node_set.normals])
    write_csv(path, None, rows)


def write_csv(path, header, rows):
    """
    Writes a table with full-precision, locale-independent float formatting.

    :param path: output path
    :type path: str
    :param header: [optional] column names
    :type header: list[str]
    :param rows: iterable of rows
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if header:
            writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])


def write_spectrum_csv(path, eigenvalues):
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    write_csv(path, ['re', 'im'], zip(eigenvalues.real, eigenvalues.imag))


def write_matrix_market(path, matrix):
    """
    Exports a sparse matrix in Matrix-Market coordinate real general format.
    """
    scipy.io.mmwrite(path, matrix, field='real', symmetry='general')


def write_manifest(path, config):
    """
    Echoes a resolved configuration as sorted ``key = value`` lines.

    :param path: output path
    :type path: str
    :param config: configuration mapping
    :type config: dict
    """
    with open(path, 'w', encoding='utf-8') as f:
        for key in sorted(config):
            value = config[key]
            if value is None:
                continue
            if isinstance(value, (list, tuple)):
                value = ','.join(_format(v) for v in value)
            f.write('%s = %s\n' % (key, _format(value)))
