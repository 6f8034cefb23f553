"""JSON encoding of matrices, certificates and reports.

Matrices are stored as ``{"rows", "cols", "re", "im"}`` with row-major real
and imaginary parts. Python writes floats with the shortest repr that parses
back to the same double, so a dump/load cycle is bit exact. Non-finite
floats are not valid JSON; they are written as the strings ``"inf"``,
``"-inf"`` and ``"nan"``.

:func:`dumps` fixes key order and separators so equal inputs give equal bytes.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from typing import Any

import numpy as np

from .errors import DimensionError
from .orbit import OrbitCertificate, OrbitTerm, Relation

_NONFINITE = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


def encode_float(x: float) -> float | str:
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def decode_float(x) -> float:
    if isinstance(x, str):
        try:
            return _NONFINITE[x]
        except KeyError:
            raise ValueError(f"unrecognized float token {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError(f"expected a number, got {x!r}")
    return float(x)


def matrix_to_dict(X) -> dict:
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {X.shape}")
    flat = X.reshape(-1)
    return {
        "rows": int(X.shape[0]),
        "cols": int(X.shape[1]),
        "re": [float(v) for v in flat.real],
        "im": [float(v) for v in flat.imag],
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    if not isinstance(d, dict):
        raise ValueError("matrix must be a JSON object")
    try:
        rows, cols, re, im = d["rows"], d["cols"], d["re"], d["im"]
    except KeyError as exc:
        raise ValueError(f"matrix is missing field {exc.args[0]!r}") from None
    if not (isinstance(rows, int) and isinstance(cols, int) and rows > 0 and cols > 0):
        raise ValueError("rows and cols must be positive integers")
    if not (isinstance(re, list) and isinstance(im, list)):
        raise ValueError("re and im must be arrays")
    if len(re) != rows * cols or len(im) != rows * cols:
        raise DimensionError(f"expected {rows * cols} entries, got {len(re)} and {len(im)}")
    real = np.array([decode_float(v) for v in re], dtype=float)
    imag = np.array([decode_float(v) for v in im], dtype=float)
    if not (np.all(np.isfinite(real)) and np.all(np.isfinite(imag))):
        raise ValueError("matrix entries must be finite")
    return (real + 1j * imag).reshape(rows, cols)


def certificate_to_dict(cert: OrbitCertificate) -> dict:
    return {
        "label": cert.label,
        "relation": cert.relation.value,
        "residual": encode_float(cert.residual),
        "target": matrix_to_dict(cert.target),
        "terms": [
            {"witness": matrix_to_dict(t.witness), "operand": matrix_to_dict(t.operand),
             "weight": encode_float(t.weight)}
            for t in cert.terms
        ],
    }


def certificate_from_dict(d: dict) -> OrbitCertificate:
    """Rebuild a certificate; the stored residual is kept but never trusted."""
    try:
        terms = [OrbitTerm(matrix_from_dict(t["witness"]), matrix_from_dict(t["operand"]),
                           decode_float(t["weight"])) for t in d["terms"]]
        return OrbitCertificate(matrix_from_dict(d["target"]), terms, Relation(d["relation"]),
                                residual=decode_float(d.get("residual", "nan")),
                                label=str(d.get("label", "")))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed certificate: {exc}") from None


def to_jsonable(obj: Any) -> Any:
    """Recursively convert reports, enums, arrays and numpy scalars."""
    if isinstance(obj, OrbitCertificate):
        return certificate_to_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return matrix_to_dict(obj) if obj.ndim == 2 else [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": encode_float(obj.real), "im": encode_float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    return obj


def dumps(obj: Any, indent: int | None = None) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=indent,
                      separators=(",", ": ") if indent else (",", ":"), allow_nan=False)


def loads(text: str) -> Any:
    return json.loads(text)
