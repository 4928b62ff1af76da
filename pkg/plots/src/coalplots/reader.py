"""CSV loading and schema validation for figure input files.

The figure renderers consume CSV files produced by the simulation
harness.  Each figure kind has a fixed set of required columns; anything
extra is ignored.  Header matching is case-insensitive (an exact-case
header wins over a case-folded one) because trajectory files in the wild
carry both lowercase and uppercase spellings of the coordinate columns.
All validation problems raise SchemaError naming the offending column,
before any output file is touched.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

FIG1_COLUMNS = ("ell", "L", "tau_pow")
FIG2_COLUMNS = ("j", "x", "y", "ref_curve")


class SchemaError(ValueError):
    """Input CSV does not match the contract for the requested figure."""


def _column_indices(header, required, path):
    exact = {}
    folded = {}
    for idx, name in enumerate(header):
        cleaned = name.strip()
        exact.setdefault(cleaned, idx)
        folded.setdefault(cleaned.lower(), idx)
    indices = {}
    missing = []
    for name in required:
        if name in exact:
            indices[name] = exact[name]
        elif name.lower() in folded:
            indices[name] = folded[name.lower()]
        else:
            missing.append(name)
    if missing:
        raise SchemaError(
            f"{path}: missing required column(s): {', '.join(missing)}")
    return indices


def load_columns(path, required):
    """Read the required columns of a CSV file as float arrays.

    Returns a dict keyed by the canonical column names in ``required``.
    Raises SchemaError for an empty file, a missing column, a short row,
    or a non-numeric cell, always naming the column involved.
    """
    path = Path(path)
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    rows = [row for row in rows if row]
    if not rows:
        raise SchemaError(f"{path}: empty file, expected a header row")
    indices = _column_indices(rows[0], required, path)
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows")
    data = {name: np.empty(len(rows) - 1) for name in required}
    for row_number, row in enumerate(rows[1:], start=2):
        for name, idx in indices.items():
            if idx >= len(row):
                raise SchemaError(
                    f"{path}: row {row_number} has no value for column "
                    f"'{name}'")
            try:
                data[name][row_number - 2] = float(row[idx])
            except ValueError:
                raise SchemaError(
                    f"{path}: row {row_number}, column '{name}': "
                    f"could not parse {row[idx]!r} as a number") from None
    return data
