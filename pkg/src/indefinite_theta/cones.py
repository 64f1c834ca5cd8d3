"""Sign components of ``Reg(C)`` and the convergence certificate.

Realizability of a sign vector ``s`` is decided exactly: the open cone
``{x : s_j (x, C_j) > 0}`` is nonempty iff the slab ``s_j (x, C_j) >= 1`` is
feasible, which is a rational LP.  Minimising ``(x, x)`` over a closed cone
with the majorant fixed to 1 is nonconvex; it is handled by enumerating the
faces of the cone (a generalized eigenproblem on each face span) and by
multi-start local descent, and every claimed negative witness is re-checked
in exact arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg
from scipy.optimize import minimize

from .incidence import ConeConfig, check_all
from .lp import feasible_point
from .quadform import Vector, bilinear, build_majorant
from .signwalk import InvalidConfigError, pairing_matrix, w_from_signs

MEETS = "meets_V<0"
BOUNDARY = "boundary_touch"
VERTEX = "vertex_only"

OPT_TOL = 1e-8
DEAD_BAND = 1e-6


@dataclass
class SignComponent:
    signs: tuple[int, ...]
    witness: Vector
    w_value: int
    closure_class: str | None = None
    inf_ratio: float | None = None
    exact: bool = False        # the class is backed by an exact witness
    class_witness: Vector | None = None

    @property
    def meets_negative(self) -> bool:
        return self.closure_class == MEETS

    def key(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)


class BudgetExhausted(RuntimeError):
    pass


def _realize(rows, signs) -> tuple[Fraction, ...] | None:
    a = [[s * v for v in r] for s, r in zip(signs, rows)]
    return feasible_point(a, [1] * len(a))


def enumerate_components(config: ConeConfig, budget: int = 2 ** 14, seed: int = 0,
                         random_samples: int = 200_000) -> tuple[list[SignComponent], bool]:
    """All realizable sign vectors with exact witnesses.

    Returns ``(components, complete)``.  Hyperplanes are inserted one at a
    time and each cell is split with at most one LP, since the parent
    witness already realizes one side.  When ``2**N`` exceeds ``budget``
    the search falls back to random sampling and ``complete`` is False.
    """
    p = pairing_matrix(config)
    rows = [[int(v) for v in col] for col in p.T]       # row j: integer multiple of G C_j
    n = config.N
    if 2 ** n > budget:
        return _random_components(config, rows, seed, random_samples), False
    cells: list[tuple[tuple[int, ...], tuple[Fraction, ...]]] = [((), None)]
    solves = 0
    for k in range(n):
        h = rows[k]
        nxt = []
        for signs, wit in cells:
            known = 0
            if wit is not None:
                val = sum(x * y for x, y in zip(h, wit))
                known = (val > 0) - (val < 0)
            if known:
                nxt.append((signs + (known,), wit))
                tries = [-known]
            else:
                tries = [1, -1]
            for s in tries:
                solves += 1
                if solves > 2 * budget:
                    raise BudgetExhausted(f"more than {2 * budget} LP solves")
                x = _realize(rows[:k + 1], signs + (s,))
                if x is not None:
                    nxt.append((signs + (s,), x))
        cells = nxt
    comps = [SignComponent(s, tuple(w), w_from_signs(s)) for s, w in cells]
    comps.sort(key=lambda c: tuple(-s for s in c.signs))
    return comps, True


def _random_components(config, rows, seed, samples):
    rng = np.random.default_rng(seed)
    x = rng.integers(-10 ** 6, 10 ** 6, size=(samples, config.space.dim))
    vals = x.astype(object) @ np.array(rows, dtype=object).T
    found = {}
    for xi, vi in zip(x, vals):
        s = tuple((v > 0) - (v < 0) for v in vi)
        if 0 not in s and s not in found:
            found[s] = tuple(Fraction(int(c)) for c in xi)
    comps = [SignComponent(s, w, w_from_signs(s)) for s, w in found.items()]
    comps.sort(key=lambda c: tuple(-s for s in c.signs))
    return comps


# --------------------------------------------------------------------------
# the quadratic ratio on a closed cone

class _ConeProblem:
    def __init__(self, config: ConeConfig, comp: SignComponent, majorant_gram):
        self.g = np.array(config.space.gram, dtype=float)
        self.m = np.array(majorant_gram, dtype=float)
        gc = np.array([[float(v) for v in row] for row in
                       (tuple(sum(gi * c for gi, c in zip(grow, cvec)) for grow in config.space.gram)
                        for cvec in config.vectors)])
        a = gc * np.array(comp.signs, dtype=float)[:, None]
        self.a = a / np.linalg.norm(a, axis=1, keepdims=True)
        self.comp = comp
        self.dim = config.space.dim

    def ratio(self, x):
        return float(x @ self.g @ x) / float(x @ self.m @ x)

    def in_closure(self, x, tol=1e-9):
        return bool(np.all(self.a @ x >= -tol * np.linalg.norm(x)))

    def face_candidates(self):
        """Smallest attained ratio over all face spans of the cone."""
        best = (math.inf, None)
        n, d = self.a.shape
        for k in range(0, d):
            for active in itertools.combinations(range(n), k):
                if active:
                    _, sv, vt = np.linalg.svd(self.a[list(active)])
                    rank = int((sv > 1e-10).sum())
                    z = vt[rank:].T
                else:
                    z = np.eye(d)
                if z.shape[1] == 0:
                    continue
                gz, mz = z.T @ self.g @ z, z.T @ self.m @ z
                lam, u = scipy.linalg.eigh(gz, mz)
                for i in range(len(lam)):
                    if lam[i] >= best[0]:
                        break
                    x = z @ u[:, i]
                    for sgn in (1.0, -1.0):
                        if self.in_closure(sgn * x):
                            best = (float(lam[i]), sgn * x)
                            break
                    else:
                        continue
                    break
        return best

    def local_descent(self, starts):
        best = (math.inf, None)
        cons = [{"type": "ineq", "fun": lambda x: self.a @ x, "jac": lambda x: self.a},
                {"type": "eq", "fun": lambda x: x @ self.m @ x - 1.0,
                 "jac": lambda x: 2 * self.m @ x}]
        for x0 in starts:
            x0 = x0 / math.sqrt(x0 @ self.m @ x0)
            res = minimize(lambda x: x @ self.g @ x, x0, jac=lambda x: 2 * self.g @ x,
                           constraints=cons, method="SLSQP",
                           options={"ftol": OPT_TOL * 1e-2, "maxiter": 500})
            x = res.x
            if np.linalg.norm(x) == 0 or not self.in_closure(x, 1e-7):
                continue
            r = self.ratio(x)
            if r < best[0]:
                best = (r, x)
        return best

    def interior_point(self):
        w = np.array([float(v) for v in self.comp.witness])
        return w / math.sqrt(w @ self.m @ w)

    def hit_and_run(self, count, rng, start=None):
        """Random points of the cone intersected with the unit cube."""
        x = self.interior_point() if start is None else start
        x = x / np.abs(x).max() * 0.5
        out = np.empty((count, self.dim))
        for i in range(count):
            d = rng.standard_normal(self.dim)
            lo, hi = -np.inf, np.inf
            ad, ax = self.a @ d, self.a @ x
            for num, den in zip(-ax, ad):
                if den > 1e-15:
                    lo = max(lo, num / den)
                elif den < -1e-15:
                    hi = min(hi, num / den)
            with np.errstate(divide="ignore"):
                for xi, di in zip(x, d):
                    if abs(di) > 1e-15:
                        t1, t2 = (-1 - xi) / di, (1 - xi) / di
                        lo, hi = max(lo, min(t1, t2)), min(hi, max(t1, t2))
            if lo < hi:
                x = x + rng.uniform(lo, hi) * d
            out[i] = x
        return out


def _rationalize(x, max_den):
    scale = np.abs(x).max()
    return tuple(Fraction(float(v / scale)).limit_denominator(max_den) for v in x)


def _exact_negative_witness(config, comp, prob, x):
    """Push ``x`` into the open cone and round; return an exact negative witness."""
    g = config.space.gram
    w = prob.interior_point()
    x = x / math.sqrt(x @ prob.m @ x)
    for eps in (1e-4, 1e-3, 1e-2, 0.05, 0.1, 0.3):
        y = x + eps * w
        for den in (10 ** 3, 10 ** 6, 10 ** 9):
            q = _rationalize(y, den)
            sv = tuple((v > 0) - (v < 0) for v in (bilinear(g, q, c) for c in config.vectors))
            if sv == comp.signs and bilinear(g, q, q) < 0:
                return q
    return None


def _exact_null_witness(config, comp, x):
    g = config.space.gram
    for den in (10, 100, 1000, 10 ** 4):
        q = _rationalize(x, den)
        if not any(q):
            continue
        ok = all(s * bilinear(g, q, c) >= 0 for s, c in zip(comp.signs, config.vectors))
        if ok and bilinear(g, q, q) == 0:
            return q
    return None


def classify_component(config: ConeConfig, component: SignComponent, majorant=None,
                       seed: int = 0, starts: int = 8) -> str:
    """Set and return ``component.closure_class`` (and its ``inf_ratio``)."""
    g = config.space.gram
    wit = component.witness
    if majorant is None:
        majorant = build_majorant(config.space)
    prob = _ConeProblem(config, component, majorant.gram_pos)
    face_val, face_x = prob.face_candidates()
    rng = np.random.default_rng(seed)
    start_pts = [prob.interior_point()]
    start_pts += list(prob.hit_and_run(starts, rng))
    if face_x is not None:
        start_pts.append(face_x)
    desc_val, desc_x = prob.local_descent(start_pts)
    if desc_val < face_val:
        inf_val, inf_x = desc_val, desc_x
    else:
        inf_val, inf_x = face_val, face_x
    component.inf_ratio = inf_val
    component.exact = False
    component.class_witness = None
    if bilinear(g, wit, wit) < 0:
        component.closure_class = MEETS
        component.exact = True
        component.class_witness = wit
        return MEETS
    if inf_val < -DEAD_BAND:
        component.closure_class = MEETS
        q = _exact_negative_witness(config, component, prob, inf_x)
        if q is not None:
            component.exact = True
            component.class_witness = q
    elif inf_val <= DEAD_BAND:
        component.closure_class = BOUNDARY
        q = _exact_null_witness(config, component, inf_x)
        if q is not None:
            component.exact = True
            component.class_witness = q
    else:
        component.closure_class = VERTEX
    return component.closure_class


@dataclass
class ConvergenceCertificate:
    vertex_only_cones: list[SignComponent]
    per_cone_inf: dict[str, float]
    r_inf: float
    method: str
    tolerance: float
    sample_validation: dict = field(default_factory=dict)
    complete: bool = True
    empirical_support_bound: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return math.isfinite(self.r_inf)


def validate_cone_bound(config, component, r, majorant=None, samples=10_000, seed=0,
                        tol=1e-6) -> dict:
    """Check ``(x, x) >= (r - tol) * majorant(x, x)`` on random points of a cone."""
    if majorant is None:
        majorant = build_majorant(config.space)
    prob = _ConeProblem(config, component, majorant.gram_pos)
    pts = prob.hit_and_run(samples, np.random.default_rng(seed))
    q = np.einsum("ij,jk,ik->i", pts, prob.g, pts)
    m = np.einsum("ij,jk,ik->i", pts, prob.m, pts)
    bad = int((q < (r - tol) * m).sum())
    return {"samples": samples, "violations": bad, "min_ratio": float((q / m).min())}


def compute_r_inf(config: ConeConfig, components=None, seed: int = 0,
                  validation_samples: int = 10_000, budget: int = 2 ** 14) -> ConvergenceCertificate:
    """The convergence certificate over the vertex-only components."""
    if not check_all(config).overall:
        raise InvalidConfigError("convergence certificate requires a valid configuration")
    maj = build_majorant(config.space)
    complete = True
    if components is None:
        components, complete = enumerate_components(config, budget=budget, seed=seed)
    for c in components:
        if c.closure_class is None:
            classify_component(config, c, maj, seed)
    vertex = [c for c in components if c.closure_class == VERTEX]
    per = {c.key(): c.inf_ratio for c in vertex}
    r_inf = min(per.values()) if per else math.inf
    cert = ConvergenceCertificate(
        vertex, per, r_inf,
        method="face-span generalized eigenproblems + multi-start SLSQP (numerical)",
        tolerance=OPT_TOL, complete=complete)
    if not vertex:
        cert.notes.append("no vertex-only components: Phi vanishes at every regular vector")
    if not complete:
        cert.notes.append("component list from random sampling; possibly incomplete")
    for i, c in enumerate(vertex if validation_samples > 0 else []):
        cert.sample_validation[c.key()] = validate_cone_bound(
            config, c, r_inf, maj, validation_samples, seed + i)
    return cert
