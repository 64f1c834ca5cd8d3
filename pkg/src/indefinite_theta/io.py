"""JSON input and deterministic JSON output.

Input schema::

    {"gram": [[...], ...], "vectors": [[...], ...],
     "basis": [[...], ...],   # optional, one row per lattice basis vector
     "mu": [...]}             # optional, lattice coordinates

Scalars are bare integers or ``"p/q"`` strings.  Floats are rejected.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .incidence import ConeConfig
from .quadform import Lattice, QuadraticSpace, as_rational, format_rational, transpose
from .theta import config_digest

SCHEMA_KEYS = {"gram", "vectors", "basis", "mu"}


class SchemaError(ValueError):
    """Input does not match the configuration schema."""

    def __init__(self, message: str, code: str = "schema", line: int | None = None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"[{code}] {message}{where}")
        self.code = code
        self.line = line


@dataclass(frozen=True)
class LoadedConfig:
    config: ConeConfig
    lattice: Lattice
    digest: str
    source: dict


def _scalar(v, where: str) -> Fraction:
    try:
        return as_rational(v)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}", code="scalar") from None


def _rows(obj, where: str) -> list[list[Fraction]]:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SchemaError(f"{where} must be a non-empty list of lists", code="shape")
    return [[_scalar(v, f"{where}[{i}][{k}]") for k, v in enumerate(r)] for i, r in enumerate(obj)]


def parse_config(data: Any) -> LoadedConfig:
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object", code="shape")
    unknown = set(data) - SCHEMA_KEYS
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}", code="keys")
    for key in ("gram", "vectors"):
        if key not in data:
            raise SchemaError(f"missing key {key!r}", code="keys")
    gram = _rows(data["gram"], "gram")
    n = len(gram)
    if any(len(r) != n for r in gram):
        raise SchemaError("gram must be square", code="shape")
    if any(gram[i][k] != gram[k][i] for i in range(n) for k in range(i)):
        raise SchemaError("gram must be symmetric", code="shape")
    vectors = _rows(data["vectors"], "vectors")
    if any(len(v) != n for v in vectors):
        raise SchemaError(f"every vector needs {n} entries", code="shape")
    basis = None
    if data.get("basis") is not None:
        rows = _rows(data["basis"], "basis")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise SchemaError(f"basis must list {n} vectors of length {n}", code="shape")
        basis = transpose(rows)
    mu = None
    if data.get("mu") is not None:
        if not isinstance(data["mu"], list) or len(data["mu"]) != n:
            raise SchemaError(f"mu must have {n} entries", code="shape")
        mu = [_scalar(v, f"mu[{i}]") for i, v in enumerate(data["mu"])]
    try:
        space = QuadraticSpace(gram)
        config = ConeConfig(space, vectors)
        lattice = Lattice(space, basis, mu)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(str(exc), code="config") from None
    return LoadedConfig(config, lattice, config_digest(config, lattice), data)


def load_config(path: str | Path) -> LoadedConfig:
    text = Path(path).read_text()
    return loads_config(text)


def loads_config(text: str) -> LoadedConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, code="json", line=exc.lineno) from None
    return parse_config(data)


def config_to_dict(config: ConeConfig, lattice: Lattice | None = None) -> dict:
    out = {"gram": [[format_rational(v) for v in r] for r in config.space.gram],
           "vectors": [[format_rational(v) for v in c] for c in config.vectors]}
    if lattice is not None:
        n = lattice.dim
        if any(lattice.basis[i][k] != (i == k) for i in range(n) for k in range(n)):
            out["basis"] = [[format_rational(v) for v in r] for r in transpose(lattice.basis)]
        if any(lattice.mu):
            out["mu"] = [format_rational(v) for v in lattice.mu]
    return out


def to_jsonable(obj):
    """Recursively convert results to plain JSON types, deterministically."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (complex, np.complexfloating)):
        obj = complex(obj)
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"
