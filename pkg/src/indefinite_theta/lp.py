"""Exact rational feasibility for systems ``A x >= b`` with free ``x``.

Phase I of the tableau simplex method over :class:`fractions.Fraction`,
with Bland's rule so that cycling cannot occur.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def feasible_point(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """Return an exact solution of ``a @ x >= b`` or ``None`` if there is none."""
    m = len(a)
    if m == 0:
        return ()
    d = len(a[0])
    # columns: x+ (d), x- (d), surplus (m), artificial (m), rhs
    ncol = 2 * d + 2 * m
    rows = []
    for i in range(m):
        ai = [Fraction(v) for v in a[i]]
        row = ai + [-v for v in ai] + [Fraction(-(k == i)) for k in range(m)]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        row += [Fraction(int(k == i)) for k in range(m)] + [rhs]
        rows.append(row)
    basis = [2 * d + m + i for i in range(m)]
    # reduced costs of  min sum(artificial)
    obj = [Fraction(0)] * (ncol + 1)
    for i in range(m):
        obj = [o - r for o, r in zip(obj, rows[i])]
    for k in range(2 * d + m, ncol):
        obj[k] = Fraction(0)

    while True:
        enter = next((k for k in range(ncol) if obj[k] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(m):
            if rows[i][enter] > 0:
                ratio = rows[i][-1] / rows[i][enter]
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:  # unbounded direction; cannot happen in phase I
            break
        i = best[1]
        p = rows[i][enter]
        rows[i] = [v / p for v in rows[i]]
        for r in range(m):
            if r != i and rows[r][enter] != 0:
                f = rows[r][enter]
                rows[r] = [u - f * v for u, v in zip(rows[r], rows[i])]
        f = obj[enter]
        obj = [u - f * v for u, v in zip(obj, rows[i])]
        basis[i] = enter

    if -obj[-1] != 0:
        return None
    val = [Fraction(0)] * ncol
    for i, k in enumerate(basis):
        val[k] = rows[i][-1]
    return tuple(val[k] - val[d + k] for k in range(d))
