"""Deterministic serialization of audit rows (JSON lines and CSV)."""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

FLOAT_DIGITS = 15


def canonical(obj):
    """Plain JSON-ready data: Fractions become ``{num, den}``, floats keep 15 significant digits."""
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.{FLOAT_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [canonical(v) for v in obj]
    return obj


def dumps(row):
    return json.dumps(canonical(row), sort_keys=True, separators=(",", ":"))


def to_jsonl(rows):
    return "".join(dumps(r) + "\n" for r in rows)


def to_csv(rows, columns):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _cell(v):
    v = canonical(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    if v is None:
        return ""
    return v
