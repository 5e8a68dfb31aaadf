"""Tabular export: CSV with a JSON metadata line, or a single JSON document.

Floats are written with ``repr`` so files round-trip bit-identically.
"""
from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

FORMATS = ("csv", "json")


def _clean(value):
    """Metadata values as JSON-friendly builtins."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else repr(v)
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _cell(v):
    if isinstance(v, (str, np.str_)):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _as_columns(columns):
    cols = {str(k): (list(v) if not isinstance(v, np.ndarray) else v.tolist()) for k, v in columns.items()}
    lengths = {len(v) for v in cols.values()}
    if len(lengths) > 1:
        raise ValueError(f"columns have unequal lengths {sorted(lengths)}")
    return cols


def format_csv(columns, meta=None):
    """CSV text: ``# {json}`` line, header line, one row per sample."""
    cols = _as_columns(columns)
    buf = io.StringIO()
    buf.write("# " + json.dumps(_clean(meta or {}), sort_keys=True) + "\n")
    buf.write(",".join(cols) + "\n")
    for row in zip(*cols.values()):
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def format_json(columns, meta=None):
    cols = _as_columns(columns)
    doc = {"meta": _clean(meta or {}), "columns": {k: [_clean(v) for v in vals] for k, vals in cols.items()}}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def format_table(columns, meta=None, fmt="csv"):
    if fmt == "csv":
        return format_csv(columns, meta)
    if fmt == "json":
        return format_json(columns, meta)
    raise ValueError(f"unknown format {fmt!r}; expected csv or json")


def write_table(path, columns, meta=None, fmt="csv"):
    text = format_table(columns, meta, fmt)
    Path(path).write_text(text)
    return text


def _parse_cell(s):
    try:
        return int(s) if s.lstrip("-").isdigit() else float(s)
    except ValueError:
        return s


def parse_csv(text):
    """Inverse of :func:`format_csv`; numeric columns become float arrays."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing metadata line")
    meta = json.loads(lines[0][1:])
    names = lines[1].split(",") if len(lines) > 1 else []
    raw = [ln.split(",") for ln in lines[2:] if ln]
    columns = {}
    for j, name in enumerate(names):
        vals = [_parse_cell(r[j]) for r in raw]
        if all(isinstance(v, float) for v in vals):
            columns[name] = np.array(vals, dtype=float)
        else:
            columns[name] = vals
    return meta, columns


def parse_json(text):
    doc = json.loads(text)
    cols = {}
    for k, vals in doc["columns"].items():
        cols[k] = np.array(vals, dtype=float) if all(isinstance(v, float) for v in vals) else vals
    return doc["meta"], cols


def read_table(path):
    """``(meta, columns)`` from a file written by :func:`write_table`."""
    text = Path(path).read_text()
    return parse_json(text) if text.lstrip().startswith("{") else parse_csv(text)


def field_columns(field):
    """Columns of an :class:`ActionField`: ``x, X, X1, X2, Y`` and ``XE`` when present."""
    cols = {"x": field.grid, "X": field.X, "X1": field.X1, "X2": field.X2, "Y": field.Y}
    if field.XE is not None:
        cols["XE"] = field.XE
    return cols


def field_meta(field):
    meta = {"region": field.region, "E": field.E, "x1": field.slice.x1, "x2": field.slice.x2,
            "model": field.slice.model.describe()}
    meta.update({k: v for k, v in field.meta.items() if k != "seed"})
    return meta


def momentum_columns(series):
    return {"x": series.grid, "re_p": series.re, "im_p": series.im}


def coarse_columns(coarse):
    return {"bin_center": coarse.bin_centers, "bin_mean": coarse.bin_means}


def eigen_columns(results):
    return {"n": [r.n for r in results], "E": [r.E for r in results],
            "mismatch": [r.mismatch for r in results], "method": [r.method for r in results]}


def rows_columns(rows):
    """Column view of a list of dict rows sharing their keys in first-seen order."""
    keys = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    return {k: [r.get(k, math.nan) for r in rows] for k in keys}
