"""Report writers shared by the CLI subcommands.

All numeric output goes through :func:`fmt` so files are byte-stable:
at most 12 significant digits, shortest form, ``nan`` spelled out only in
gnuplot column files (CSV leaves missing values empty).
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import json
import math

import numpy as np


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return ""
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        # .12g drops trailing zeros, so short values print as themselves
        return format(v, ".12g")
    if isinstance(value, dt.date):
        return value.isoformat()
    return str(value)


def json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v) or math.isinf(v):
            return None
        return float(fmt(v))
    if isinstance(value, dt.date):
        return value.isoformat()
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def header_lines(meta: dict) -> str:
    return "".join(f"# {k}={fmt(v)}\n" for k, v in meta.items())


def write_csv(path, columns, rows, meta=None) -> None:
    buf = io.StringIO()
    if meta:
        buf.write(header_lines(meta))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_json(path, columns, rows, meta=None) -> None:
    doc = {
        "config": {k: json_value(v) for k, v in (meta or {}).items()},
        "rows": [{c: json_value(v) for c, v in zip(columns, row)}
                 for row in rows],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=False)
        fh.write("\n")


def write_table(path_stem, fmt_name, columns, rows, meta=None):
    """Write ``rows`` as CSV or JSON; returns the path written."""
    rows = list(rows)
    if fmt_name == "json":
        path = f"{path_stem}.json"
        write_json(path, columns, rows, meta)
    else:
        path = f"{path_stem}.csv"
        write_csv(path, columns, rows, meta)
    return path


def write_columns(path, columns, rows, meta=None) -> None:
    """Whitespace-separated columns for gnuplot; missing values as ``nan``."""
    with open(path, "w") as fh:
        if meta:
            fh.write(header_lines(meta))
        fh.write("# " + " ".join(columns) + "\n")
        for row in rows:
            cells = []
            for v in row:
                s = fmt(v)
                cells.append(s if s else "nan")
            fh.write(" ".join(cells) + "\n")
