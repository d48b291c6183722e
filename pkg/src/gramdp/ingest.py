"""CSV loading, strict numeric column extraction and bounds handling.

Input must already be clean: empty cells, NaN and infinities are refused,
never imputed or dropped. Numbers use a decimal point and no thousands
separators.
"""

from __future__ import annotations

import csv
import math
import re
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import (
    EmptyCell,
    EmptyColumn,
    MalformedCsv,
    NonNumericCell,
    NoSuchColumn,
    PrivacyWarning,
    RaggedRow,
)
from .sensitivity import BoundedDomain

DEGENERATE_WIDEN = 0.5

_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


@dataclass(frozen=True)
class Table:
    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        for i, row in enumerate(self.rows, start=2):
            if len(row) != len(self.header):
                raise RaggedRow(i, len(self.header), len(row))


@dataclass(frozen=True)
class NumericColumn:
    name: str
    values: tuple[float, ...]
    source_row_count: int

    def __post_init__(self):
        if len(self.values) != self.source_row_count:
            raise ValueError("column length differs from its source row count")

    def __len__(self):
        return len(self.values)


def load_csv(path: str | Path) -> Table:
    """Parse a UTF-8, comma-delimited CSV whose first record is the header.

    Raises:
        FileNotFoundError: ``path`` does not exist.
        MalformedCsv: bad quoting, undecodable bytes or a missing header.
        RaggedRow: a record whose cell count differs from the header's.
            Line numbers count the header as line 1.
    """
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = next(reader, None)
            if header is None:
                raise MalformedCsv(1, "file is empty, expected a header row")
            for record in reader:
                if len(record) != len(header):
                    raise RaggedRow(reader.line_num, len(header), len(record))
                rows.append(tuple(record))
        except csv.Error as exc:
            raise MalformedCsv(reader.line_num, str(exc)) from exc
        except UnicodeDecodeError as exc:
            raise MalformedCsv(reader.line_num + 1, "file is not valid UTF-8") from exc
    return Table(tuple(header), tuple(rows))


def write_csv(table: Table, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        writer.writerows(table.rows)


def parse_decimal(text: str) -> float | None:
    """Return the finite value of a plain decimal literal, or None."""
    text = text.strip()
    if not _DECIMAL.fullmatch(text):
        return None
    value = float(text)
    return value if math.isfinite(value) else None


def select_numeric_column(t: Table, name: str) -> NumericColumn:
    """Extract column ``name`` as floats.

    Row numbers in errors are 1-based data rows (the header is not counted).
    """
    try:
        idx = t.header.index(name)
    except ValueError:
        raise NoSuchColumn(name, t.header) from None
    values = []
    for row_no, row in enumerate(t.rows, start=1):
        cell = row[idx]
        if cell.strip() == "":
            raise EmptyCell(row_no)
        value = parse_decimal(cell)
        if value is None:
            raise NonNumericCell(row_no, cell)
        values.append(value)
    return NumericColumn(name, tuple(values), len(t.rows))


def _values(c) -> Sequence[float]:
    return c.values if isinstance(c, NumericColumn) else c


def infer_bounds(c, widen: float = DEGENERATE_WIDEN, warn: bool = True) -> tuple[BoundedDomain, bool]:
    """Bounds from the column's own min and max.

    A constant column is widened by ``widen`` on each side so the domain
    stays non-degenerate. Data-derived bounds leak information about the
    extreme records, so a :class:`PrivacyWarning` is issued unless ``warn``
    is false.

    Returns:
        ``(domain, True)``; the flag marks the bounds as inferred.
    """
    values = _values(c)
    if len(values) == 0:
        raise EmptyColumn(getattr(c, "name", ""))
    lo, hi = float(min(values)), float(max(values))
    if lo == hi:
        lo, hi = lo - widen, hi + widen
    if warn:
        warnings.warn(
            f"bounds [{lo:g}, {hi:g}] were inferred from the data; "
            "this leaks the column's extremes and weakens the privacy guarantee",
            PrivacyWarning,
            stacklevel=2,
        )
    return BoundedDomain(lo, hi), True


def clamp_to_bounds(c, d: BoundedDomain):
    """Clamp every value into ``[d.lower, d.upper]``; keeps the input's type."""
    clamped = tuple(min(max(float(v), d.lower), d.upper) for v in _values(c))
    if isinstance(c, NumericColumn):
        return NumericColumn(c.name, clamped, c.source_row_count)
    return list(clamped)
