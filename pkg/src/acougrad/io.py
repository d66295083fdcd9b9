"""Text serialization of grids, coefficients, traces, fields and reports.

CSV layouts (header row first):

* trace        ``j,t,value``
* coefficient  ``i,x,value``
* field        ``i,j,x,t,value`` (long form, j fastest)
* medium       ``z,c,rho``

Floats are written with ``repr`` (shortest round-trip decimal), so
``read(write(x)) == x`` bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .grid import CoefficientVector, Field, Grid, ObservedTrace
from .transforms import MediumProfile

REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["name", "params", "metrics", "series", "seed"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "params": {"type": "object"},
        "metrics": {"type": "object", "additionalProperties": {"type": "number"}},
        "series": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": {"type": "number"}},
        },
        "seed": {"type": ["integer", "null"]},
    },
}


def _fmt(v):
    return repr(float(v))


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_rows(path, header):
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ValidationError(f"{path}: cannot open ({exc.strerror})") from None
    with fh:
        reader = csv.reader(fh)
        try:
            got = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty file") from None
        if [h.strip() for h in got] != list(header):
            raise ValidationError(f"{path}: expected header {','.join(header)}, got {','.join(got)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ValidationError(f"{path}: row {lineno}: expected {len(header)} columns")
            try:
                vals = [float(v) for v in row]
            except ValueError:
                raise ValidationError(f"{path}: row {lineno}: unparsable number") from None
            if not all(math.isfinite(v) for v in vals):
                raise ValidationError(f"{path}: row {lineno}: non-finite value")
            rows.append(vals)
    if not rows:
        raise ValidationError(f"{path}: no data rows")
    return np.array(rows)


def _check_index(path, col, n, what):
    if col.shape[0] != n or np.any(col != np.arange(n)):
        raise ValidationError(f"{path}: {what} column must run 0..{n - 1}")


def write_trace_csv(path, trace: ObservedTrace):
    g = trace.grid
    _write_rows(path, ("j", "t", "value"),
                ((j, _fmt(t), _fmt(v)) for j, (t, v) in enumerate(zip(g.t, trace.values))))


def read_trace_csv(path, grid: Grid) -> ObservedTrace:
    a = _read_rows(path, ("j", "t", "value"))
    _check_index(path, a[:, 0], grid.M + 1, "j")
    return ObservedTrace(grid, a[:, 2])


def write_coeff_csv(path, p: CoefficientVector):
    g = p.grid
    _write_rows(path, ("i", "x", "value"),
                ((i, _fmt(x), _fmt(v)) for i, (x, v) in enumerate(zip(g.x, p.values))))


def read_coeff_csv(path, grid: Grid) -> CoefficientVector:
    a = _read_rows(path, ("i", "x", "value"))
    _check_index(path, a[:, 0], grid.N + 1, "i")
    return CoefficientVector(grid, a[:, 2])


def write_field_csv(path, y: Field):
    g = y.grid
    x, t, v = g.x, g.t, y.values

    def rows():
        for i in range(g.N + 1):
            xi = _fmt(x[i])
            for j in range(g.M + 1):
                yield (i, j, xi, _fmt(t[j]), _fmt(v[i, j]))

    _write_rows(path, ("i", "j", "x", "t", "value"), rows())


def read_field_csv(path, grid: Grid) -> Field:
    a = _read_rows(path, ("i", "j", "x", "t", "value"))
    if a.shape[0] != (grid.N + 1) * (grid.M + 1):
        raise ValidationError(f"{path}: expected {(grid.N + 1) * (grid.M + 1)} rows, got {a.shape[0]}")
    return Field(grid, a[:, 4].reshape(grid.N + 1, grid.M + 1))


def write_medium_csv(path, m: MediumProfile):
    _write_rows(path, ("z", "c", "rho"), ((_fmt(z), _fmt(c), _fmt(r)) for z, c, r in zip(m.z, m.c, m.rho)))


def read_medium_csv(path) -> MediumProfile:
    a = _read_rows(path, ("z", "c", "rho"))
    return MediumProfile(a[:, 0], a[:, 1], a[:, 2])


def report_json(report) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + "\n"


def write_report_json(path, report):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report_json(report))


def write_series_csv(path, report):
    """Series of a report as columns (shorter series padded with empty cells)."""
    keys = list(report.series)
    n = max((len(report.series[k]) for k in keys), default=0)
    rows = []
    for k in range(n):
        rows.append([_fmt(report.series[c][k]) if k < len(report.series[c]) else "" for c in keys])
    _write_rows(path, keys, rows)


def parse_config(text, source="<config>") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment. Values stay strings."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{source}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ValidationError(f"{source}:{lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out


def read_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"{path}: cannot open ({exc.strerror})") from None
    return parse_config(text, str(path))
