"""
CSV and manifest emission for experiment results.
"""
import csv
import json
import logging
import math
from pathlib import Path

from .constants import CSV_FLOAT_FORMAT, CSV_LINE_TERMINATOR, DISPLAB_VERSION
from .exceptions import SchemaError

logger = logging.getLogger(__name__)


# Column names and types per experiment, in file order
CSV_SCHEMAS = {
    'region': (('s', float), ('inv_p', float), ('status', int), ('source', str)),
    'ratio': (('seed', int), ('M', float), ('lhs', float), ('mc_norm', float), ('sobolev', float), ('ratio', float)),
    'freq-local': (('k', int), ('lhs', float), ('mc_norm', float), ('scale', float), ('ratio', float)),
    'sharpness': (('M', float), ('lhs', float), ('mc_norm', float), ('ratio', float)),
    'mcnorm': (
        ('weight', str), ('alpha', float), ('p', float), ('gamma', float), ('value', float),
        ('witness_x', str), ('witness_t', float), ('witness_r', float), ('lp_norm', float),
        ('homogeneity_error', float), ('maximal_ratio', float), ('a2_max', float),
    ),
    'solve': (
        ('seed', int), ('scale', float), ('iterations', int), ('residual', float), ('max_contraction', float),
        ('lhs1', float), ('rhs1', float), ('lhs2', float), ('rhs2', float), ('mass_drift', float),
    ),
    'kdv': (('seed', int), ('M', float), ('lhs', float), ('mc_norm', float), ('ratio', float)),
    'smoothing': (('seed', int), ('trace_norm', float), ('sobolev', float), ('ratio', float)),
}


def _format(value, kind, row_number, name):
    if isinstance(value, bool):
        raise SchemaError(f'row {row_number}: column {name!r} got a boolean')
    if kind is float and isinstance(value, (int, float)):
        return format(float(value), CSV_FLOAT_FORMAT)
    if kind is int and isinstance(value, int):
        return str(value)
    if kind is str and isinstance(value, str):
        return value
    raise SchemaError(f'row {row_number}: column {name!r} expects {kind.__name__}, got {value!r}')


def format_rows(rows, schema):
    """
    Convert rows to CSV text cells.

    Raises:
        SchemaError: if a row has the wrong width or a cell the wrong type.
    """
    formatted = []
    for number, row in enumerate(rows):
        if len(row) != len(schema):
            raise SchemaError(f'row {number} has {len(row)} cells, schema has {len(schema)} columns')
        formatted.append([_format(value, kind, number, name) for value, (name, kind) in zip(row, schema)])
    return formatted


def emit_csv(rows, schema, path):
    """
    Write rows as CSV with a header line.

    Floats carry 17 significant digits so that parsing them back gives the
    same doubles; lines end with CRLF.

    Args:
        rows: sequence of tuples matching ``schema``.
        schema: sequence of ``(column name, type)`` pairs with type
            ``float``, ``int`` or ``str``.
        path: destination; parent directories are created.

    Raises:
        SchemaError: on a row that does not match the schema; nothing is written.
        OSError: on I/O failure.
    """
    cells = format_rows(rows, schema)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', encoding='utf-8', newline='') as handle:
        writer = csv.writer(handle, lineterminator=CSV_LINE_TERMINATOR)
        writer.writerow([name for name, _ in schema])
        writer.writerows(cells)
    logger.debug('wrote %d rows to %s', len(cells), path)
    return path


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(item) for item in value]
    return value


def manifest_path(csv_path):
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.name + '.manifest')


def write_manifest(csv_path, experiment, digest, wall_time, rows, summary):
    """
    Write the one-line JSON run manifest next to the CSV.

    Returns:
        The manifest path.
    """
    record = {
        'version': DISPLAB_VERSION,
        'experiment': experiment,
        'config_sha256': digest,
        'wall_time': round(wall_time, 6),
        'rows': rows,
        'summary': _json_safe(summary),
    }
    path = manifest_path(csv_path)
    path.write_text(json.dumps(record, sort_keys=True) + '\n', encoding='utf-8')
    return path
