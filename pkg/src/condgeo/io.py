"""JSON and CSV serialization.

Matrices use the schema

    {"n": int, "m": int, "field": "real" | "complex", "re": [...], "im": [...]}

with ``re``/``im`` flattened in row-major order (nested row lists are also
accepted on input; ``im`` is omitted for real matrices).  A point of the
solution variety adds ``x_re``/``x_im``.  Floats are written with Python's
shortest round-trip repr, so a fixed input always produces the same bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import MalformedInputError, ShapeMismatchError
from .matcore import COMPLEX, REAL, field_of

TRACE_COLUMNS = ("t", "sigma_min", "log_alpha", "speed")


def _floats(values) -> list[float]:
    return [float(v) for v in np.asarray(values, dtype=float).ravel()]


def _real_array(obj, key: str, size: int) -> np.ndarray:
    if key not in obj:
        raise MalformedInputError(f"missing key {key!r}")
    try:
        arr = np.asarray(obj[key], dtype=float).ravel()
    except (TypeError, ValueError):
        raise MalformedInputError(f"{key!r} must be an array of numbers") from None
    if arr.size != size:
        raise ShapeMismatchError(f"{key!r} has {arr.size} entries, expected {size}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{key!r} contains non-finite values")
    return arr


def matrix_to_json(A) -> dict:
    A = np.asarray(A)
    if A.ndim != 2:
        raise ShapeMismatchError("a matrix must be 2-D")
    f = field_of(A)
    out = {"n": int(A.shape[0]), "m": int(A.shape[1]), "field": f, "re": _floats(np.real(A))}
    if f == COMPLEX:
        out["im"] = _floats(np.imag(A))
    return out


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MalformedInputError("a matrix must be a JSON object")
    try:
        n, m = int(obj["n"]), int(obj["m"])
    except KeyError as exc:
        raise MalformedInputError(f"missing key {exc.args[0]!r}") from None
    except (TypeError, ValueError):
        raise MalformedInputError("'n' and 'm' must be integers") from None
    if n < 1 or m < 1:
        raise ShapeMismatchError("'n' and 'm' must be positive")
    field = obj.get("field", REAL)
    if field not in (REAL, COMPLEX):
        raise MalformedInputError(f"unknown field {field!r}")
    re = _real_array(obj, "re", n * m).reshape(n, m)
    if field == REAL:
        if "im" in obj and np.any(_real_array(obj, "im", n * m) != 0):
            raise MalformedInputError("a real matrix cannot carry a nonzero 'im'")
        return re
    im = _real_array(obj, "im", n * m).reshape(n, m) if "im" in obj else np.zeros((n, m))
    return re + 1j * im


def point_to_json(p) -> dict:
    out = matrix_to_json(p.A)
    out["x_re"] = _floats(np.real(p.x))
    if np.iscomplexobj(p.x):
        out["x_im"] = _floats(np.imag(p.x))
    return out


def point_from_json(obj):
    """A VarietyPoint; without ``x_re`` the kernel of A is used."""
    from .variety import VarietyPoint, kernel_point

    A = matrix_from_json(obj)
    if "x_re" not in obj:
        return kernel_point(A)
    m = A.shape[1]
    x = _real_array(obj, "x_re", m)
    if "x_im" in obj:
        x = x + 1j * _real_array(obj, "x_im", m)
    return VarietyPoint(A, x)


def path_to_json(nodes, times=None) -> dict:
    nodes = np.asarray(nodes)
    out = {"nodes": [matrix_to_json(M) for M in nodes]}
    if times is not None:
        out["times"] = _floats(times)
    return out


def path_from_json(obj):
    """(nodes, times) from {"nodes": [matrix, ...], "times": [...]}; times may be absent."""
    if not isinstance(obj, dict) or not isinstance(obj.get("nodes"), list):
        raise MalformedInputError("a path needs a 'nodes' list")
    mats = [matrix_from_json(M) for M in obj["nodes"]]
    if len(mats) < 2:
        raise MalformedInputError("a path needs at least two nodes")
    if len({M.shape for M in mats}) != 1:
        raise ShapeMismatchError("all nodes must have the same shape")
    dtype = complex if any(np.iscomplexobj(M) for M in mats) else float
    nodes = np.array(mats, dtype=dtype)
    times = None
    if "times" in obj:
        times = _real_array(obj, "times", len(mats))
    return nodes, times


def dumps(obj) -> str:
    """Deterministic UTF-8 JSON text with a trailing newline."""
    return json.dumps(_plain(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def load_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: {exc.msg} at line {exc.lineno}") from None


def save_json(path, obj) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(load_json(path))


def csv_text(header, rows) -> str:
    """RFC 4180 CSV (CRLF line ends) with a header row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows))


def geodesic_trace_rows(nodes, times, seg_lengths) -> list[tuple]:
    """Rows (t, sigma_min, log_alpha, speed) for each node.

    The speed at a node averages the condition speeds of its adjacent
    segments (one-sided at the endpoints).
    """
    nodes = np.asarray(nodes)
    times = np.asarray(times, dtype=float)
    s = np.linalg.svd(nodes, compute_uv=False)[:, -1]
    dt = np.diff(times)
    seg_speed = np.divide(seg_lengths, dt, out=np.zeros_like(dt), where=dt > 0)
    speed = np.empty(len(nodes))
    speed[0], speed[-1] = seg_speed[0], seg_speed[-1]
    speed[1:-1] = (seg_speed[:-1] + seg_speed[1:]) / 2.0
    return [(float(t), float(si), float(-2.0 * np.log(si)), float(v)) for t, si, v in zip(times, s, speed)]
