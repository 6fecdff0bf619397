"""Deterministic JSON serialisation for CLI reports.

Floats are written with 17 significant digits and keys keep insertion order,
so identical inputs give byte-identical files.
"""

from __future__ import annotations

from enum import Enum
from fractions import Fraction
import json
import math
from pathlib import Path

import numpy as np

REPORT_KEYS = ("config", "design", "diagonalization", "gate_report", "scan", "notes", "pass")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, Enum):
        return json.dumps(obj.value)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, Fraction):
        return dumps({"num": obj.numerator, "den": obj.denominator}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{end}}}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[\n" + ",\n".join(f"{pad}{dumps(v, indent, _level + 1)}" for v in seq) + f"\n{end}]"
    if hasattr(obj, "to_dict"):
        return dumps(obj.to_dict(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def empty_report(config: dict) -> dict:
    report = {k: None for k in REPORT_KEYS}
    report["config"] = config
    report["notes"] = []
    report["pass"] = False
    return report


def write_report(report: dict, path: str | Path | None) -> str:
    text = dumps(report) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
