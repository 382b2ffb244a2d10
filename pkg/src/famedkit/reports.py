"""Run reports and their JSON / CSV rendering.

Floats are written with 17 significant digits so that parsing a report and
rendering it again reproduces the text byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from . import FORMAT_VERSION, __version__, kernels

__all__ = ["RunReport", "to_plain", "render_json", "render_csv", "fmt_float"]


def fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    # keep floats recognizable as floats after a round trip
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def to_plain(obj):
    """Convert numpy, sympy and complex values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, sp.MatrixBase):
        return [[str(obj[i, j]) for j in range(obj.cols)] for i in range(obj.rows)]
    if isinstance(obj, sp.Basic):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def _render(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_render(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(_render(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _render(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot render {type(obj).__name__}")


def render_json(obj) -> str:
    return _render(to_plain(obj), 0) + "\n"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def versions() -> dict:
    return {
        "famedkit": __version__,
        "format": FORMAT_VERSION,
        "backend": kernels.BACKEND,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    versions: dict = field(default_factory=versions)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timings": self.timings,
            "versions": self.versions,
        }

    def to_json(self) -> str:
        return render_json(self.as_dict())

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        return cls(d["command"], d["inputs"], d["outputs"], d["timings"], d["versions"])
