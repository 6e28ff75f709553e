"""File formats: contingency tables, raw observations, heatmaps and JSON reports.

Count tables are CSV files laid out the way the tables are printed: a header
row of ``X1`` labels ``0..m1-1`` and one row per ``X2`` label, from ``m2-1``
at the top down to ``0``.  The top-left cell is free text.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError
from .inference import CountTable
from .torus import TorusGrid, compass_to_index

__all__ = [
    "CALM_TOKENS",
    "ObservationSummary",
    "parse_count_table",
    "read_count_table",
    "format_count_table",
    "write_count_table",
    "parse_observations",
    "emit_heatmap",
    "parse_heatmap",
    "fit_to_json",
    "gof_to_json",
    "format_number",
]

CALM_TOKENS = frozenset({"calm", "c", "-", "na"})
SIG_DIGITS = 12


def format_number(x):
    """Twelve significant digits, exact for integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if not math.isfinite(x):
        return str(x)
    return f"{x:.{SIG_DIGITS}g}"


def _rows(text):
    return [(i + 1, row) for i, row in enumerate(csv.reader(_io.StringIO(text)))
            if any(cell.strip() for cell in row)]


def _int_cell(cell, line, what):
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"{what} {cell!r} is not a number", line=line) from None
    if value != int(value):
        raise ParseError(f"{what} {cell!r} is not an integer", line=line)
    return int(value)


def parse_count_table(text, m1=None, m2=None):
    """Parse the printed-orientation CSV layout into a :class:`CountTable`.

    Parameters
    ----------
    text : str
        File contents.
    m1, m2 : int, optional
        Expected grid size; inferred from the header and row count if omitted.
    """
    rows = _rows(text)
    if len(rows) < 2:
        raise ParseError("count table needs a header row and at least one data row")
    hline, header = rows[0]
    labels = [_int_cell(c.strip(), hline, "column label") for c in header[1:]]
    m1 = len(labels) if m1 is None else int(m1)
    m2 = len(rows) - 1 if m2 is None else int(m2)
    if labels != list(range(m1)):
        raise ParseError(f"header labels must be 0..{m1 - 1}", line=hline)
    if len(rows) - 1 != m2:
        raise ParseError(f"expected {m2} data rows, found {len(rows) - 1}", line=rows[-1][0])
    counts = np.zeros((m1, m2), dtype=np.int64)
    for expect, (line, row) in zip(range(m2 - 1, -1, -1), rows[1:]):
        if len(row) != m1 + 1:
            raise ParseError(f"expected {m1 + 1} fields, found {len(row)}", line=line)
        label = _int_cell(row[0].strip(), line, "row label")
        if label != expect:
            raise ParseError(f"row label {label} out of order, expected {expect}", line=line)
        for k, cell in enumerate(row[1:]):
            v = _int_cell(cell.strip(), line, "count")
            if v < 0:
                raise ParseError(f"negative count {v}", line=line)
            counts[k, label] = v
    return CountTable(TorusGrid(m1, m2), counts)


def read_count_table(path, m1=None, m2=None):
    return parse_count_table(Path(path).read_text(), m1, m2)


def format_count_table(table):
    m1, m2 = table.grid.shape
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x2\\x1"] + list(range(m1)))
    for l in range(m2 - 1, -1, -1):
        w.writerow([l] + [int(v) for v in table.counts[:, l]])
    return out.getvalue()


def write_count_table(table, path):
    Path(path).write_text(format_count_table(table))


@dataclass(frozen=True)
class ObservationSummary:
    table: CountTable
    calm_dropped: int
    rows_read: int


def _label(cell, line, m):
    cell = cell.strip()
    if cell.lstrip("-").isdigit():
        v = int(cell)
        if not 0 <= v < m:
            raise ParseError(f"index {v} outside 0..{m - 1}", line=line)
        return v
    if m != 16:
        raise ParseError(f"compass label {cell!r} needs a 16-point grid", line=line)
    try:
        return compass_to_index(cell)
    except ParseError as exc:
        raise ParseError(str(exc), line=line) from None


def _is_label(cell, m):
    try:
        _label(cell, 0, m)
    except ParseError:
        return False
    return True


def parse_observations(text, m1=16, m2=16):
    """Tally a two-column CSV of direction pairs.

    Each field is a compass label (``N`` .. ``NNW``) or an integer index.
    Rows where either field is a calm marker are dropped and counted.  A
    first row that contains no valid direction is treated as a header.
    """
    rows = _rows(text)
    pairs, calm = [], 0
    for pos, (line, row) in enumerate(rows):
        if len(row) != 2:
            raise ParseError(f"expected 2 fields, found {len(row)}", line=line)
        if any(c.strip().lower() in CALM_TOKENS for c in row):
            calm += 1
            continue
        if pos == 0 and not (_is_label(row[0], m1) or _is_label(row[1], m2)):
            continue
        pairs.append((_label(row[0], line, m1), _label(row[1], line, m2)))
    if not pairs:
        raise DomainError("no non-calm observations")
    table = CountTable.from_pairs(TorusGrid(m1, m2), pairs)
    return ObservationSummary(table, calm, len(rows))


def emit_heatmap(table, path=None):
    """Long-format ``k,l,value`` CSV in row-major order.

    ``table`` is a PmfTable (probabilities) or CountTable (counts).
    Returns the text; also writes it when ``path`` is given.
    """
    values = table.p if hasattr(table, "p") else table.counts
    m1, m2 = values.shape
    out = _io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["k", "l", "value"])
    for k in range(m1):
        for l in range(m2):
            w.writerow([k, l, format_number(values[k, l])])
    text = out.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def parse_heatmap(text):
    """Inverse of :func:`emit_heatmap`; returns the value matrix."""
    rows = _rows(text)
    if not rows or [c.strip() for c in rows[0][1]] != ["k", "l", "value"]:
        raise ParseError("heatmap header must be k,l,value", line=1)
    cells = []
    for line, row in rows[1:]:
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, found {len(row)}", line=line)
        try:
            cells.append((int(row[0]), int(row[1]), float(row[2])))
        except ValueError:
            raise ParseError("malformed heatmap row", line=line) from None
    m1 = max(c[0] for c in cells) + 1
    m2 = max(c[1] for c in cells) + 1
    if len(cells) != m1 * m2:
        raise ParseError(f"expected {m1 * m2} cells, found {len(cells)}")
    out = np.zeros((m1, m2))
    for k, l, v in cells:
        out[k, l] = v
    return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format_number(x)) if math.isfinite(x) else None
    return obj


def fit_to_json(fit, **extra):
    """FitResult as JSON text: family, params, loglik, aic, se, converged, evaluations."""
    payload = fit.as_dict()
    payload.update(extra)
    return json.dumps(_jsonable(payload), indent=2)


def gof_to_json(report, **extra):
    payload = report.as_dict()
    payload.update(extra)
    return json.dumps(_jsonable(payload), indent=2)
