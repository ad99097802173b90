"""Readers for the delimited outputs of the simulation harness.

The language boundary is text: this package never touches binary snapshots.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path


class CsvFormatError(ValueError):
    """Missing file, empty table, or unexpected header."""


@dataclass
class SweepTable:
    eps: list[float]
    columns: dict[str, list[float]]
    rates: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    # rates: column -> (exponent, intercept, r2) from the '#rate,' footer


def read_sweep(path: Path | str) -> SweepTable:
    path = Path(path)
    if not path.exists():
        raise CsvFormatError(f"no such CSV: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 2 or rows[0][0] != "eps":
        raise CsvFormatError(f"{path}: expected a sweep table with an 'eps' header")
    names = rows[0][1:]
    table = SweepTable(eps=[], columns={n: [] for n in names})
    for row in rows[1:]:
        if not row:
            continue
        if row[0].startswith("#rate"):
            parts = row if len(row) >= 5 else row[0].split(",")
            _, name, expo, inter, r2 = parts[:5]
            table.rates[name] = (float(expo), float(inter), float(r2))
            continue
        table.eps.append(float(row[0]))
        for name, val in zip(names, row[1:]):
            table.columns[name].append(float(val))
    if not table.eps:
        raise CsvFormatError(f"{path}: table has no data rows")
    return table


def read_columns(path: Path | str, required: tuple[str, ...] = ()) -> dict[str, list[float]]:
    """Plain header + float rows; `required` names must be present."""
    path = Path(path)
    if not path.exists():
        raise CsvFormatError(f"no such CSV: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise CsvFormatError(f"{path}: empty CSV")
    names = rows[0]
    for need in required:
        if need not in names:
            raise CsvFormatError(f"{path}: missing required column {need!r}")
    out: dict[str, list[float]] = {n: [] for n in names}
    for row in rows[1:]:
        if not row:
            continue
        for name, val in zip(names, row):
            try:
                out[name].append(float(val))
            except ValueError:
                out[name].append(float("nan"))
    if not out[names[0]]:
        raise CsvFormatError(f"{path}: table has no data rows")
    return out
