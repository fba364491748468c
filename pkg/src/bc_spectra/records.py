"""Serialized records emitted by the command line tool.

JSON output is byte-stable: keys keep insertion order and every float is
written with 17 significant digits. Non-finite floats become ``null``.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

SCHEMA_VERSION = "1.0"


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_entries(m) -> list[list[list[float]]]:
    return [[complex_pair(z) for z in row] for row in np.asarray(m)]


def to_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)  # RFC 4180: CRLF terminated, minimal quoting
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


SPECTRUM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SpectrumRecord",
    "type": "object",
    "required": [
        "schema_version", "command", "input", "params", "spectral_class",
        "zero_mode", "points", "solver",
    ],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"const": "spectrum"},
        "input": {"type": "object"},
        "params": {
            "type": "object",
            "required": ["eta", "m0", "m1", "m2", "m3"],
            "additionalProperties": {"type": "number"},
        },
        "spectral_class": {
            "type": "object",
            "required": ["eta", "m0", "m1"],
            "additionalProperties": {"type": "number"},
        },
        "zero_mode": {"type": "boolean"},
        "physical_scale": {
            "type": "object",
            "required": ["length_m", "mass_kg", "hbar_Js", "energy_unit_J"],
        },
        "points": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["x", "eps_hat", "multiplicity", "branch"],
                "properties": {
                    "x": {"type": "number", "minimum": 0},
                    "eps_hat": {"type": "number"},
                    "multiplicity": {"enum": [1, 2]},
                    "branch": {"enum": ["positive", "zero", "negative"]},
                    "E_physical": {"type": "number"},
                },
                "additionalProperties": False,
            },
        },
        "solver": {
            "type": "object",
            "required": ["window", "tolerances", "version", "diagnostics"],
        },
    },
    "additionalProperties": False,
}
