"""Exact rational linear algebra for quadratic spaces.

Every Gram matrix is held as a tuple of tuples of :class:`fractions.Fraction`.
Signature is decided by symmetric Gaussian congruence, never by eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]


class DegenerateFormError(ValueError):
    """The bilinear form has a nontrivial radical."""


class SignatureError(ValueError):
    """The form does not have the signature a caller requires."""


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a reduced Fraction.

    Floats are refused: a float Gram entry almost never means what the
    caller intended and would silently poison exact verdicts.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rational scalars")
    if isinstance(value, (Integral, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse rational {value!r}") from exc
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(value).__name__}")


def format_rational(q: Fraction) -> int | str:
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def as_vector(values: Iterable) -> Vector:
    return tuple(as_rational(v) for v in values)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(as_vector(r) for r in rows)
    if m and any(len(r) != len(m) for r in m):
        raise ValueError("matrix must be square")
    return m


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else ()


def matmul(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> Matrix:
    bt = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence[Fraction]], x: Sequence[Fraction]) -> Vector:
    return tuple(sum((p * q for p, q in zip(row, x)), Fraction(0)) for row in a)


def dot(x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    return sum((p * q for p, q in zip(x, y)), Fraction(0))


def bilinear(gram: Matrix, x: Sequence[Fraction], y: Sequence[Fraction]) -> Fraction:
    if len(x) != len(gram) or len(y) != len(gram):
        raise ValueError(f"dimension mismatch: form has dimension {len(gram)}, "
                         f"got vectors of length {len(x)} and {len(y)}")
    return dot(x, matvec(gram, y))


def inverse(a: Matrix) -> Matrix:
    """Exact Gauss-Jordan inverse."""
    n = len(a)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return tuple(tuple(row[n:]) for row in aug)


def nullspace(rows: Sequence[Sequence[Fraction]], dim: int) -> list[Vector]:
    """Exact basis of ``{x : row . x = 0 for every row}``."""
    mat = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(dim):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        p = mat[r][c]
        mat[r] = [v / p for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [v - f * w for v, w in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * dim
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -mat[i][fc]
        basis.append(tuple(x))
    return basis


def congruence_diagonalize(gram: Matrix) -> tuple[Matrix, Vector]:
    """Return ``(T, d)`` with ``T^t gram T = diag(d)`` in exact arithmetic.

    Zero diagonal pivots are repaired with a swap when a later diagonal entry
    is nonzero, otherwise with the rank-one update ``col_k += col_i`` which
    turns an off-diagonal entry into a nonzero pivot.
    """
    n = len(gram)
    for i in range(n):
        for j in range(i):
            if gram[i][j] != gram[j][i]:
                raise ValueError("Gram matrix is not symmetric")
    a = [list(r) for r in gram]
    t = [list(r) for r in identity(n)]

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in t:
            row[i], row[j] = row[j], row[i]

    def add_col(src, dst, f):
        # column/row dst += f * column/row src
        for row in a:
            row[dst] += f * row[src]
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        for row in t:
            row[dst] += f * row[src]

    for k in range(n):
        if a[k][k] == 0:
            i = next((i for i in range(k + 1, n) if a[i][i] != 0), None)
            if i is not None:
                swap(i, k)
            else:
                i = next((i for i in range(k + 1, n) if a[k][i] != 0), None)
                if i is None:
                    raise DegenerateFormError(f"form is degenerate (zero row at pivot {k})")
                add_col(i, k, Fraction(1))
        p = a[k][k]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                add_col(k, j, -a[k][j] / p)
    return tuple(tuple(r) for r in t), tuple(a[i][i] for i in range(n))


@dataclass(frozen=True)
class QuadraticSpace:
    """A nondegenerate rational quadratic space.

    Parameters
    ----------
    gram : square symmetric matrix of rationals (ints, Fractions or "p/q").
    """

    gram: Matrix
    diagonalizer: Matrix = field(init=False, repr=False)
    diag: Vector = field(init=False, repr=False)

    def __post_init__(self):
        g = as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        t, d = congruence_diagonalize(g)
        if any(x == 0 for x in d):
            raise DegenerateFormError("form is degenerate (zero diagonal entry after congruence)")
        object.__setattr__(self, "diagonalizer", t)
        object.__setattr__(self, "diag", d)

    @classmethod
    def diagonal(cls, entries) -> "QuadraticSpace":
        e = as_vector(entries)
        return cls(tuple(tuple(e[i] if i == j else Fraction(0) for j in range(len(e)))
                         for i in range(len(e))))

    @property
    def dim(self) -> int:
        return len(self.gram)

    @property
    def dim_pos(self) -> int:
        return sum(1 for x in self.diag if x > 0)

    @property
    def dim_neg(self) -> int:
        return sum(1 for x in self.diag if x < 0)

    def negative_directions(self) -> list[Vector]:
        """Columns of the diagonalizer whose diagonal entry is negative."""
        cols = transpose(self.diagonalizer)
        return [cols[i] for i, x in enumerate(self.diag) if x < 0]

    def positive_directions(self) -> list[Vector]:
        cols = transpose(self.diagonalizer)
        return [cols[i] for i, x in enumerate(self.diag) if x > 0]

    def require_n2(self) -> "QuadraticSpace":
        if self.dim_neg != 2:
            raise SignatureError(
                f"signature ({self.dim_pos},{self.dim_neg}) given, (n,2) required")
        return self


def inner_product(space: QuadraticSpace, x, y) -> Fraction:
    return bilinear(space.gram, as_vector(x), as_vector(y))


def certify_signature(space: QuadraticSpace, require_n2: bool = False):
    """Return ``(n_pos, n_neg, diagonalizer)``.

    With ``require_n2`` a :class:`SignatureError` is raised unless exactly
    two diagonal entries are negative.
    """
    if require_n2:
        space.require_n2()
    return space.dim_pos, space.dim_neg, space.diagonalizer


@dataclass(frozen=True)
class MajorantForm:
    gram_pos: Matrix

    def __call__(self, x, y=None) -> Fraction:
        x = as_vector(x)
        return bilinear(self.gram_pos, x, x if y is None else as_vector(y))


def build_majorant(space: QuadraticSpace) -> MajorantForm:
    """Flip the negative squares of the diagonalized form and transport back.

    In diagonal coordinates ``y = T^{-1} x`` the form is ``sum d_i y_i^2``;
    the majorant is ``sum |d_i| y_i^2``, so it dominates ``|(x, x)|`` and
    agrees with ``(x, x)`` on the positive directions.
    """
    tinv = inverse(space.diagonalizer)
    absd = [abs(d) for d in space.diag]
    scaled = tuple(tuple(absd[i] * v for v in tinv[i]) for i in range(len(absd)))
    return MajorantForm(matmul(transpose(tinv), scaled))


@dataclass(frozen=True)
class Lattice:
    """The coset ``mu + L`` with ``L`` spanned by the columns of ``basis``.

    ``mu`` is given in lattice coordinates, so the ambient points are
    ``basis @ (mu + l)`` for integral ``l``.
    """

    ambient: QuadraticSpace
    basis: Matrix | None = None
    mu: Vector | None = None

    def __post_init__(self):
        n = self.ambient.dim
        b = identity(n) if self.basis is None else as_matrix(self.basis)
        if len(b) != n:
            raise ValueError("lattice basis must be square of ambient dimension")
        inverse(b)  # raises when singular
        object.__setattr__(self, "basis", b)
        mu = tuple(Fraction(0) for _ in range(n)) if self.mu is None else as_vector(self.mu)
        if len(mu) != n:
            raise ValueError("coset offset has wrong length")
        object.__setattr__(self, "mu", mu)

    @property
    def dim(self) -> int:
        return self.ambient.dim

    @property
    def gram(self) -> Matrix:
        """Gram matrix pulled back to lattice coordinates."""
        return matmul(transpose(self.basis), matmul(self.ambient.gram, self.basis))

    def to_ambient(self, coords) -> Vector:
        return matvec(self.basis, as_vector(coords))

    def is_dual_coset(self) -> bool:
        """True when ``(mu, l)`` is integral for every basis vector ``l``."""
        return all(v.denominator == 1 for v in matvec(self.gram, self.mu))
