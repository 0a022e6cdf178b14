"""Comma-separated result files: one header row, floats in full-precision scientific notation."""

import csv
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from zaremba.types import BoolArray, ComplexArray
from zaremba.utils.inflect import count

Cell = float | int | str | bool | None

GRID_COLUMNS = ("x", "y", "re_z", "im_z", "inside", "evaluated")


class ReportError(OSError):
    """A result file could not be written."""

    pass


@dataclass(frozen=True)
class GridSamples:
    """Field values on a rectangular grid, row-major, NaN where not evaluated."""

    points: ComplexArray
    values: ComplexArray
    inside: BoolArray
    """Winding-number test against the curve"""

    evaluated: BoolArray
    """Inside and clear of the boundary distance floor and the source"""


def format_cell(value: Cell) -> str:
    """
    >>> format_cell(0.1)
    '1.00000000000000006e-01'
    >>> format_cell(True), format_cell(3), format_cell(None), format_cell(float("nan"))
    ('1', '3', '', 'nan')
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17e}" if np.isfinite(value) else str(value)
    return value


def _write(path: Path, header: Sequence[str], rows: Sequence[Sequence[str]]):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise ReportError(f"Cannot write {path}: {e.strerror or e}") from e
    logging.debug(f"Wrote {count('row', len(rows))} to {path}")


def emit_table(
    records: Sequence[Mapping[str, Cell]], path: Path, *, columns: Sequence[str] | None = None
):
    """
    Write records as a table. Columns default to the keys of the first record;
    an empty record list needs them spelled out and gives a header-only file.
    """
    if columns is None:
        if not records:
            raise ValueError("emit_table needs columns when there are no records")
        columns = list(records[0].keys())
    rows = [[format_cell(record.get(c)) for c in columns] for record in records]
    _write(path, columns, rows)


def emit_grid(samples: GridSamples, path: Path):
    """Write (x, y, Re Z, Im Z, inside, evaluated) rows; unevaluated rows carry empty field values."""
    points = samples.points.ravel()
    values = samples.values.ravel()
    inside = samples.inside.ravel()
    evaluated = samples.evaluated.ravel()
    rows: list[list[str]] = []
    for z, value, is_inside, is_evaluated in zip(points, values, inside, evaluated):
        field = (float(value.real), float(value.imag)) if is_evaluated else (None, None)
        cells: list[Cell] = [float(z.real), float(z.imag), *field, bool(is_inside), bool(is_evaluated)]
        rows.append([format_cell(c) for c in cells])
    _write(path, GRID_COLUMNS, rows)
