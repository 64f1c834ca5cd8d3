"""Sign-pairing weight, reference weight, winding count and path audits."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _intarith as ia
from .incidence import ConeConfig, check_all
from .quadform import QuadraticSpace, Vector, as_vector, bilinear, matvec, nullspace, transpose


class InvalidConfigError(ValueError):
    """The configuration fails the incidence conditions and no override was given."""


class NotRegularError(ValueError):
    """A vector lies on at least one wall ``C_j^perp``."""


class ReferenceSearchError(RuntimeError):
    """No negative regular vector was found within the search budget."""


class AuditError(RuntimeError):
    """Sampled weights disagree on the negative cone of a valid configuration."""


class PathLeavesNegativeConeError(ValueError):
    """Some point of a polyline has nonnegative norm."""


def _sgn(q) -> int:
    return (q > 0) - (q < 0)


def sign_vector(config: ConeConfig, x) -> tuple[int, ...]:
    x = as_vector(x)
    g = config.space.gram
    return tuple(_sgn(bilinear(g, x, c)) for c in config.vectors)


def is_regular(config: ConeConfig, x) -> bool:
    return all(sign_vector(config, x))


def w_from_signs(s: Sequence[int]) -> int:
    n = len(s)
    return sum(s[j] * s[(j + 1) % n] for j in range(n))


def evaluate_w(config: ConeConfig, x) -> int:
    return w_from_signs(sign_vector(config, x))


# --------------------------------------------------------------------------
# vectorized evaluation on integer point clouds

def pairing_matrix(config: ConeConfig, basis=None) -> np.ndarray:
    """Integer matrix ``P`` with ``sgn(y @ P[:, j]) = sgn((B y, C_j))``.

    ``B`` is ``basis`` (identity by default), so ``y`` may be lattice
    coordinates.
    """
    g = config.space.gram
    cols = [matvec(g, c) for c in config.vectors]          # G C_j
    if basis is not None:
        bt = transpose(basis)
        cols = [matvec(bt, c) for c in cols]                # B^t G C_j
    return ia.int_array(ia.scale_to_int(transpose(cols)))


def integer_gram(gram) -> np.ndarray:
    d = ia.lcm_den(v for row in gram for v in row)
    return ia.int_array([[int(v * d) for v in row] for row in gram])


def sign_matrix(config: ConeConfig, points: np.ndarray, basis=None) -> np.ndarray:
    return ia.signs(ia.safe_matmul(points, pairing_matrix(config, basis)))


def w_values(config: ConeConfig, points: np.ndarray, basis=None) -> np.ndarray:
    """``w`` for every row of an integer point array."""
    s = sign_matrix(config, points, basis)
    return (s * np.roll(s, -1, axis=1)).sum(axis=1)


def sample_negative_vectors(space: QuadraticSpace, count: int, rng: np.random.Generator,
                            radius: int = 1000, pos_radius: int | None = None) -> np.ndarray:
    """Random integer vectors of negative norm, ambient coordinates.

    Points are drawn in the diagonalizing frame (negative coordinates up to
    ``radius``, positive ones up to ``pos_radius``), then mapped back and
    cleared of denominators.  Negativity is checked exactly.
    """
    t = space.diagonalizer
    # positive column scaling keeps the diagonal signs, so this is still a frame
    tint = ia.int_array(ia.scale_to_int(t))
    neg = [i for i, v in enumerate(space.diag) if v < 0]
    pos = [i for i, v in enumerate(space.diag) if v > 0]
    if pos_radius is None:
        pos_radius = radius
    g = integer_gram(space.gram)
    out = []
    have = 0
    while have < count:
        m = max(2 * (count - have), 64)
        y = np.zeros((m, space.dim), dtype=np.int64)
        y[:, neg] = rng.integers(-radius, radius + 1, size=(m, len(neg)))
        if pos:
            y[:, pos] = rng.integers(-pos_radius, pos_radius + 1, size=(m, len(pos)))
        x = ia.safe_matmul(y, tint.T)
        nrm = ia.quad_values(x, g)
        keep = x[np.asarray(nrm < 0, dtype=bool)]
        out.append(keep)
        have += len(keep)
    return np.concatenate(out)[:count]


# --------------------------------------------------------------------------
# reference weight

@dataclass(frozen=True)
class ReferenceWeight:
    w_c: int
    witness: Vector
    audited: bool = False
    audit_samples: int = 0


def _candidate_ladder(config: ConeConfig, seed: int, budget: int):
    a, b = config.space.negative_directions()
    pos = config.space.positive_directions()
    grid = sorted(((p, q) for p in range(-6, 7) for q in range(-6, 7) if (p, q) != (0, 0)),
                  key=lambda pq: (max(abs(pq[0]), abs(pq[1])), pq))
    for p, q in grid:
        yield tuple(p * x + q * y for x, y in zip(a, b))
    rng = random.Random(seed)
    for _ in range(budget):
        p, q = rng.randint(-50, 50), rng.randint(-50, 50)
        v = [p * x + q * y for x, y in zip(a, b)]
        for e in pos:
            eps = Fraction(rng.randint(-10, 10), rng.randint(1, 20))
            v = [s + eps * t for s, t in zip(v, e)]
        yield tuple(v)


def find_negative_regular(config: ConeConfig, seed: int = 0, budget: int = 2000) -> Vector:
    g = config.space.gram
    for v in _candidate_ladder(config, seed, budget):
        if any(v) and bilinear(g, v, v) < 0 and is_regular(config, v):
            return v
    raise ReferenceSearchError(f"no negative regular vector found within budget {budget}")


def audit_constancy(config: ConeConfig, samples: int = 1000, seed: int = 0,
                    radius: int = 1000) -> np.ndarray:
    """``w`` at ``samples`` random negative regular vectors."""
    rng = np.random.default_rng(seed)
    pts = []
    have = 0
    while have < samples:
        x = sample_negative_vectors(config.space, 2 * (samples - have) + 16, rng, radius)
        s = sign_matrix(config, x)
        ok = np.all(s != 0, axis=1)
        pts.append((s * np.roll(s, -1, axis=1)).sum(axis=1)[ok])
        have += int(ok.sum())
    return np.concatenate(pts)[:samples]


def reference_weight(config: ConeConfig, audit_samples: int = 1000, seed: int = 0,
                     allow_invalid: bool = False, budget: int = 2000) -> ReferenceWeight:
    """``w`` on the negative cone, with a sampling audit of its constancy.

    Invalid configurations are refused unless ``allow_invalid`` is set, in
    which case the value at the first ladder witness is returned unaudited.
    """
    valid = check_all(config).overall
    if not valid and not allow_invalid:
        raise InvalidConfigError("configuration fails the incidence conditions; "
                                 "pass an explicit reference or allow_invalid=True")
    v = find_negative_regular(config, seed, budget)
    wc = evaluate_w(config, v)
    if not valid or audit_samples <= 0:
        return ReferenceWeight(wc, v, False, 0)
    vals = audit_constancy(config, audit_samples, seed)
    bad = vals[vals != wc]
    if bad.size:
        raise AuditError(f"w is not constant on sampled negative vectors: "
                         f"{wc} at the witness, also {sorted(set(int(b) for b in bad))}")
    return ReferenceWeight(wc, v, True, int(vals.size))


def phi(config: ConeConfig, x, reference: ReferenceWeight | int | None = None) -> int:
    if reference is None:
        reference = reference_weight(config)
    wc = reference if isinstance(reference, int) else reference.w_c
    return evaluate_w(config, x) - wc


def winding_count(config: ConeConfig, v) -> int:
    """Half the number of cyclic sign changes of ``(v, C_j)``; ``w = N - 4r``."""
    s = sign_vector(config, v)
    if not all(s):
        raise NotRegularError(f"vector is not regular (zero pairing at "
                              f"{[j + 1 for j, x in enumerate(s) if x == 0]})")
    n = len(s)
    changes = sum(1 for j in range(n) if s[j] * s[(j + 1) % n] < 0)
    return changes // 2


# --------------------------------------------------------------------------
# path audit

@dataclass
class PathVerdict:
    constant: bool
    w_values: list[int]
    samples: int
    crossings: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)

    @property
    def first_violation(self) -> dict | None:
        return self.violations[0] if self.violations else None


def _segment_stays_negative(gram, p: Vector, q: Vector) -> bool:
    # (p + t(q-p), same) = A t^2 + B t + C on [0, 1]
    d = tuple(b - a for a, b in zip(p, q))
    a2 = bilinear(gram, d, d)
    b1 = 2 * bilinear(gram, p, d)
    c0 = bilinear(gram, p, p)
    vals = [c0, a2 + b1 + c0]
    if a2 < 0:
        t = -b1 / (2 * a2)
        if 0 < t < 1:
            vals.append(a2 * t * t + b1 * t + c0)
    return max(vals) < 0


def path_constancy_check(config: ConeConfig, path: Sequence, steps: int = 1000) -> PathVerdict:
    """Walk a polyline in the negative cone and audit ``w`` along it.

    Samples are a uniform grid of ``steps`` per segment refined with every
    exact wall crossing and the midpoints between crossings.  At each wall
    point the neighbour product ``sgn(x, C_{j-1}) sgn(x, C_{j+1})`` must be
    ``-1``; at regular points ``w`` must not change.
    """
    pts = [as_vector(p) for p in path]
    if len(pts) < 2:
        raise ValueError("a path needs at least two vertices")
    g = config.space.gram
    for k, (p, q) in enumerate(zip(pts, pts[1:])):
        if not _segment_stays_negative(g, p, q):
            raise PathLeavesNegativeConeError(f"segment {k} leaves the negative cone")
    n = config.N
    verdict = PathVerdict(True, [], 0)
    first_w = None
    for k, (p, q) in enumerate(zip(pts, pts[1:])):
        a = [bilinear(g, p, c) for c in config.vectors]
        b = [bilinear(g, q, c) for c in config.vectors]
        events = sorted({x / (x - y) for x, y in zip(a, b) if x != y and 0 <= x / (x - y) <= 1})
        ts = {Fraction(i, steps) for i in range(steps + 1)} | set(events)
        ev = [Fraction(0)] + events + [Fraction(1)]
        ts |= {(u + v) / 2 for u, v in zip(ev, ev[1:])}
        for t in sorted(ts):
            x = tuple((1 - t) * u + t * v for u, v in zip(p, q))
            s = [(1 - t) * u + t * v for u, v in zip(a, b)]
            s = [_sgn(v) for v in s]
            verdict.samples += 1
            walls = [j for j in range(n) if s[j] == 0]
            for j in walls:
                prod = s[(j - 1) % n] * s[(j + 1) % n]
                verdict.crossings.append({"segment": k, "t": t, "wall": j + 1, "neighbor_product": prod})
                if prod != -1:
                    verdict.constant = False
                    verdict.violations.append({"kind": "wall_neighbors", "segment": k, "t": t,
                                               "wall": j + 1, "neighbor_product": prod, "x": x})
            if walls:
                continue
            w = w_from_signs(s)
            if first_w is None:
                first_w = w
            if w not in verdict.w_values:
                verdict.w_values.append(w)
            if w != first_w and not any(v["kind"] == "w_jump" and v["to"] == w for v in verdict.violations):
                verdict.constant = False
                verdict.violations.append({"kind": "w_jump", "segment": k, "t": t,
                                           "from": first_w, "to": w, "x": x})
    return verdict


# --------------------------------------------------------------------------
# wall points

def wall_vectors(config: ConeConfig, j: int, count: int, seed: int = 0,
                 radius: int = 50) -> list[Vector]:
    """Random negative vectors ``v`` with ``(v, C_j) = 0`` exactly (``j`` 0-based)."""
    g = config.space.gram
    basis = nullspace([matvec(g, config.vectors[j])], config.space.dim)
    rng = random.Random(seed)
    out: list[Vector] = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > 200 * count + 1000:
            raise ReferenceSearchError(f"wall {j + 1} has no negative points found")
        coef = [rng.randint(-radius, radius) for _ in basis]
        v = tuple(sum((c * b[i] for c, b in zip(coef, basis)), Fraction(0))
                  for i in range(config.space.dim))
        if any(v) and bilinear(g, v, v) < 0:
            out.append(v)
    return out


def wall_lemma_audit(config: ConeConfig, per_wall: int = 1000, seed: int = 0) -> dict:
    """Neighbour products at constructed negative wall points, per wall."""
    result = {}
    for j in range(config.N):
        pts = wall_vectors(config, j, per_wall, seed + j)
        prods = [sign_vector(config, v) for v in pts]
        n = config.N
        bad = sum(1 for s in prods if s[(j - 1) % n] * s[(j + 1) % n] != -1)
        result[j + 1] = {"samples": len(pts), "exceptions": bad}
    return result


def winding_audit(config: ConeConfig, samples: int = 1000, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    x = sample_negative_vectors(config.space, 4 * samples, rng)
    s = sign_matrix(config, x)
    s = s[np.all(s != 0, axis=1)][:samples]
    w = (s * np.roll(s, -1, axis=1)).sum(axis=1)
    r = (s * np.roll(s, -1, axis=1) < 0).sum(axis=1) // 2
    ok = w == config.N - 4 * r
    return {"samples": int(len(s)), "mismatches": int((~ok).sum())}
