"""
Helpers shared by the test modules.
"""
import csv
from pathlib import Path

from lab.exceptions import SchemaError


def read_csv(path, schema):
    """Parse a file written by ``emit_csv`` back into typed rows."""
    with Path(path).open(encoding='utf-8', newline='') as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != [name for name, _ in schema]:
            raise SchemaError(f'header {header} does not match the schema')
        return [tuple(kind(cell) for cell, (_, kind) in zip(row, schema)) for row in reader]
