"""Input checks for the estimator wrappers."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .quadform import as_rational


def rational_rows(X, n_features: int | None = None) -> list[tuple[Fraction, ...]]:
    """Rows of ``X`` as exact rationals.

    Integers, Fractions and ``"p/q"`` strings are taken as is.  Floats are
    converted exactly (a float is a dyadic rational), so ``0.1`` means
    ``3602879701896397/36028797018963968`` rather than ``1/10``.
    """
    arr = np.asarray(X, dtype=object)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d array, got {arr.ndim} dimensions")
    if n_features is not None and arr.shape[1] != n_features:
        raise ValueError(f"X has {arr.shape[1]} features, expected {n_features}")
    rows = []
    for r in arr:
        row = []
        for v in r:
            if isinstance(v, (float, np.floating)):
                if not np.isfinite(v):
                    raise ValueError("X contains NaN or infinity")
                row.append(Fraction(float(v)))
            elif isinstance(v, np.integer):
                row.append(Fraction(int(v)))
            else:
                row.append(as_rational(v))
        rows.append(tuple(row))
    return rows


def tau_array(taus) -> np.ndarray:
    t = np.atleast_1d(np.asarray(taus, dtype=complex)).ravel()
    if np.any(t.imag <= 0):
        raise ValueError("every tau must have positive imaginary part")
    return t
