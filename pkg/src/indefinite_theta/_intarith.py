"""Integer-scaled numpy views of exact rational data.

Signs of rational bilinear values are unchanged by positive rescaling, so
bulk evaluation runs on integer arrays.  Object dtype is used whenever the
int64 range could be exceeded.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

_INT64_SAFE = 2 ** 62


def lcm_den(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, Fraction(v).denominator)
    return d


def scale_to_int(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Positive integer multiple of a rational matrix, columnwise."""
    rows = [list(r) for r in rows]
    ncol = len(rows[0]) if rows else 0
    out = [[0] * ncol for _ in rows]
    for c in range(ncol):
        d = lcm_den(r[c] for r in rows)
        for i, r in enumerate(rows):
            out[i][c] = int(r[c] * d)
    return out


def int_array(rows) -> np.ndarray:
    big = max((abs(int(x)) for r in rows for x in r), default=0)
    dtype = np.int64 if big < 2 ** 31 else object
    return np.array(rows, dtype=dtype)


def safe_matmul(x: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Exact integer product, promoting to Python ints when int64 could overflow."""
    if x.dtype == object or a.dtype == object:
        return np.asarray(x, dtype=object) @ np.asarray(a, dtype=object)
    xmax = int(np.abs(x).max()) if x.size else 0
    amax = int(np.abs(a).max()) if a.size else 0
    if xmax * amax * max(a.shape[0], 1) >= _INT64_SAFE:
        return x.astype(object) @ a.astype(object)
    return x @ a


def quad_values(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Row-wise ``x_i^t g x_i`` exactly."""
    if x.dtype != object and g.dtype != object:
        xmax = int(np.abs(x).max()) if x.size else 0
        gmax = int(np.abs(g).max()) if g.size else 0
        if xmax * xmax * gmax * g.shape[0] ** 2 < _INT64_SAFE:
            return np.einsum("ij,jk,ik->i", x, g, x)
    xo = np.asarray(x, dtype=object)
    return ((xo @ np.asarray(g, dtype=object)) * xo).sum(axis=1)


def signs(values: np.ndarray) -> np.ndarray:
    if values.dtype == object:
        return np.array([[(v > 0) - (v < 0) for v in row] for row in values], dtype=np.int64).reshape(values.shape)
    return np.sign(values).astype(np.int64)
