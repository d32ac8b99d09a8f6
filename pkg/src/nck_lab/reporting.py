"""Report containers and bit-stable emission (JSON / CSV).

Floats are serialized with 17 significant digits so every numeric field
round-trips exactly; CSV rows carry a fixed 12-column schema.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1"

CSV_COLUMNS = ["cell_id", "p", "q", "s", "theta", "R", "dim", "n_terms",
               "constant", "std_error", "seed", "runtime_ms"]


@dataclass
class Report:
    config: dict
    cells: list = field(default_factory=list)
    schema_version: str = SCHEMA_VERSION
    library_version: str = "0.1.0"

    def to_document(self):
        return {
            "schema_version": self.schema_version,
            "library_version": self.library_version,
            "config": self.config,
            "cells": self.cells,
        }


def matrix_to_pairs(m):
    """Row-major list of (re, im) pairs for witness serialization."""
    m = np.asarray(m, dtype=complex)
    return [[float(v.real), float(v.imag)] for v in m.ravel()]


def _json_scalar(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if x != x:
            return '"nan"'
        if x in (float("inf"), float("-inf")):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    raise TypeError("unsupported scalar %r" % (v,))


def to_json(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + '  ' + _json_scalar(str(k)) + ": " + to_json(v, indent + 1)
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [pad + '  ' + to_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, np.ndarray):
        return to_json(obj.tolist(), indent)
    return _json_scalar(obj)


def emit(report: Report, fmt, path):
    """Write the report as JSON (full document) or CSV (one row per cell)."""
    if fmt == "json":
        text = to_json(report.to_document()) + "\n"
        with open(path, "w") as fh:
            fh.write(text)
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for cell in report.cells:
            row = []
            for col in CSV_COLUMNS:
                v = cell.get(col, "")
                if isinstance(v, (float, np.floating)):
                    v = format(float(v), ".17g")
                row.append(v)
            writer.writerow(row)
        with open(path, "w") as fh:
            fh.write(buf.getvalue())
    else:
        raise ValueError("format must be 'json' or 'csv'")
    return path
