"""Cyclic cone configurations and their incidence conditions.

All tested quantities are exact rationals.  Indices in reports are 1-based
so that they read the same way as the usual ``C_1, ..., C_N`` labelling.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .quadform import QuadraticSpace, Vector, as_vector, bilinear


class GenerationError(RuntimeError):
    """Random configuration generation gave up after its rejection budget."""


@dataclass(frozen=True)
class ConeConfig:
    """Nonzero vectors ``C_1..C_N`` read cyclically (``C_{N+1} = C_1``)."""

    space: QuadraticSpace
    vectors: tuple[Vector, ...]
    gram_cache: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        self.space.require_n2()
        vecs = tuple(as_vector(v) for v in self.vectors)
        if len(vecs) < 2:
            raise ValueError(f"a cone configuration needs N >= 2 vectors, got {len(vecs)}")
        for j, v in enumerate(vecs, 1):
            if len(v) != self.space.dim:
                raise ValueError(f"C_{j} has length {len(v)}, ambient dimension is {self.space.dim}")
            if not any(v):
                raise ValueError(f"C_{j} is the zero vector")
        object.__setattr__(self, "vectors", vecs)
        g = self.space.gram
        object.__setattr__(self, "gram_cache",
                           tuple(tuple(bilinear(g, a, b) for b in vecs) for a in vecs))

    @property
    def N(self) -> int:
        return len(self.vectors)

    def ip(self, i: int, j: int) -> Fraction:
        """``(C_i, C_j)`` with 0-based cyclic indices."""
        n = self.N
        return self.gram_cache[i % n][j % n]

    def norm(self, j: int) -> Fraction:
        return self.ip(j, j)

    def rotated(self, k: int = 1) -> "ConeConfig":
        k %= self.N
        return ConeConfig(self.space, self.vectors[k:] + self.vectors[:k])

    def reversed(self) -> "ConeConfig":
        return ConeConfig(self.space, self.vectors[::-1])


@dataclass(frozen=True)
class Verdict:
    index: int          # 1-based
    passed: bool
    value: Fraction     # the exact tested quantity
    branch: str = ""


@dataclass(frozen=True)
class IncidenceReport:
    i1: tuple[Verdict, ...]
    i2: tuple[Verdict, ...]
    i3: tuple[Verdict, ...]
    no_three_nulls: bool

    @property
    def overall(self) -> bool:
        return all(v.passed for v in self.i1 + self.i2 + self.i3) and self.no_three_nulls

    @property
    def violations(self) -> list[tuple[str, int, Fraction]]:
        out = []
        for name, items in (("I.1", self.i1), ("I.2", self.i2), ("I.3", self.i3)):
            out.extend((name, v.index, v.value) for v in items if not v.passed)
        return out

    def holds(self, condition: str) -> bool:
        items = {"I.1": self.i1, "I.2": self.i2, "I.3": self.i3}[condition]
        return all(v.passed for v in items)


def check_I1(config: ConeConfig) -> tuple[Verdict, ...]:
    return tuple(Verdict(j + 1, config.norm(j) <= 0, config.norm(j), "norm<=0")
                 for j in range(config.N))


def check_I2(config: ConeConfig) -> tuple[Verdict, ...]:
    """One verdict per cyclic pair ``(C_j, C_{j+1})``, indexed by ``j``.

    When one of the norms vanishes the pair must be orthogonal; the report
    records ``(C_j, C_{j+1})`` as the tested value on that branch.
    """
    out = []
    for j in range(config.N):
        prod = config.norm(j) * config.norm(j + 1)
        if prod > 0:
            det = prod - config.ip(j, j + 1) ** 2
            out.append(Verdict(j + 1, det > 0, det, "det>0"))
        elif prod == 0:
            ip = config.ip(j, j + 1)
            out.append(Verdict(j + 1, ip == 0, ip, "inner=0"))
        else:
            # only reachable when (I.1) already fails; no branch constrains it
            out.append(Verdict(j + 1, True, prod, "vacuous"))
    return tuple(out)


def check_I3(config: ConeConfig) -> tuple[Verdict, ...]:
    out = []
    for j in range(config.N):
        nj = config.norm(j)
        if nj < 0:
            q = nj * config.ip(j - 1, j + 1) - config.ip(j, j - 1) * config.ip(j, j + 1)
            out.append(Verdict(j + 1, q < 0, q, "negative"))
        elif nj == 0:
            q = config.ip(j - 1, j + 1)
            out.append(Verdict(j + 1, q > 0, q, "null"))
        else:
            out.append(Verdict(j + 1, True, nj, "vacuous"))
    return tuple(out)


def check_no_three_nulls(config: ConeConfig) -> bool:
    null = [config.norm(j) == 0 for j in range(config.N)]
    n = config.N
    if n < 3:
        return not all(null)
    return not any(null[j] and null[(j + 1) % n] and null[(j + 2) % n] for j in range(n))


def check_all(config: ConeConfig) -> IncidenceReport:
    return IncidenceReport(check_I1(config), check_I2(config), check_I3(config),
                           check_no_three_nulls(config))


# --------------------------------------------------------------------------
# random generation

def _circle_point(theta: float, max_den: int) -> tuple[Fraction, Fraction]:
    """Rational point on the unit circle near angle ``theta`` (tan half-angle)."""
    theta = math.remainder(theta, 2 * math.pi)
    flip = abs(theta) > math.pi / 2
    if flip:
        theta = math.remainder(theta + math.pi, 2 * math.pi)
    u = Fraction(math.tan(theta / 2)).limit_denominator(max_den)
    c = (1 - u * u) / (1 + u * u)
    s = 2 * u / (1 + u * u)
    return (-c, -s) if flip else (c, s)


def _monotone_angles(rng: random.Random, n: int, margin: float) -> list[float]:
    for _ in range(10_000):
        gaps = [rng.expovariate(1.0) for _ in range(n)]
        total = sum(gaps)
        gaps = [2 * math.pi * g / total for g in gaps]
        if all(margin < g < math.pi - margin for g in gaps):
            start = rng.uniform(0, 2 * math.pi)
            return [start + sum(gaps[:k]) for k in range(n)]
    raise GenerationError(f"could not draw {n} monotone steps with margin {margin}")


def _plane_vectors(space: QuadraticSpace, angles: Sequence[float], max_den: int) -> list[Vector]:
    a, b = space.negative_directions()
    out = []
    for th in angles:
        c, s = _circle_point(th, max_den)
        out.append(tuple(c * x + s * y for x, y in zip(a, b)))
    return out


def _perturb(space, vectors, rng: random.Random, size: float, max_den: int):
    pos = space.positive_directions()
    out = []
    for v in vectors:
        w = list(v)
        for p in pos:
            eps = Fraction(rng.uniform(-size, size)).limit_denominator(max_den)
            w = [x + eps * y for x, y in zip(w, p)]
        out.append(tuple(w))
    return out


def random_valid_config(space: QuadraticSpace, N: int, mode: str = "planar", seed: int = 0,
                        perturbation: float = 0.3, max_tries: int = 200,
                        max_den: int = 64) -> ConeConfig:
    """Draw a configuration that passes :func:`check_all`.

    ``planar`` puts the vectors on a rational circle of a negative plane with
    steps strictly between 0 and pi winding once; ``perturbed`` then adds
    rational noise along the positive directions and rejects until valid.
    """
    if N < 3:
        raise ValueError("random_valid_config needs N >= 3")
    if mode not in ("planar", "perturbed"):
        raise ValueError(f"unknown mode {mode!r}")
    space.require_n2()
    rng = random.Random(seed)
    for _ in range(max_tries):
        base = _plane_vectors(space, _monotone_angles(rng, N, 0.05), max_den)
        vecs = base if mode == "planar" else _perturb(space, base, rng, perturbation, max_den)
        cfg = ConeConfig(space, tuple(vecs))
        if check_all(cfg).overall:
            return cfg
    raise GenerationError(f"no valid {mode} configuration after {max_tries} attempts "
                          f"(N={N}, perturbation={perturbation})")


def random_loop_config(space: QuadraticSpace, N: int, seed: int = 0,
                       backtrack_prob: float = 0.3, perturbation: float = 0.0,
                       max_tries: int = 200, max_den: int = 64,
                       min_step: float = 0.35) -> ConeConfig:
    """Draw a configuration satisfying (I.1) and (I.2) but not necessarily (I.3).

    Consecutive steps along the negative plane are signed; a negative step
    backtracks the loop, which is what breaks (I.3) at its endpoints.
    """
    space.require_n2()
    rng = random.Random(seed)
    for _ in range(max_tries):
        angles = [rng.uniform(0, 2 * math.pi)]
        for _ in range(N - 1):
            step = rng.uniform(min_step, math.pi - min_step)
            if rng.random() < backtrack_prob:
                step = -step
            angles.append(angles[-1] + step)
        last = math.remainder(angles[0] - angles[-1], math.pi)
        if abs(last) < min_step / 2:
            continue
        vecs = _plane_vectors(space, angles, max_den)
        if perturbation:
            vecs = _perturb(space, vecs, rng, perturbation, max_den)
        cfg = ConeConfig(space, tuple(vecs))
        rep = check_all(cfg)
        if rep.holds("I.1") and rep.holds("I.2") and rep.no_three_nulls:
            return cfg
    raise GenerationError(f"no (I.1)/(I.2) configuration after {max_tries} attempts")
