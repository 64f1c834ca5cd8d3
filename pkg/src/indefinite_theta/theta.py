"""Lattice enumeration, exact q-expansions and divergence scans.

The summand of the series at ``x`` is ``Phi(x) q^{(x,x)/2}`` with
``q = exp(2 pi i tau)``.  Exponents are exact rationals.
"""
from __future__ import annotations

import cmath
import hashlib
import json
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _intarith as ia
from .incidence import ConeConfig, check_all
from .quadform import Lattice, MajorantForm, build_majorant, format_rational, matmul, transpose
from .signwalk import InvalidConfigError, ReferenceWeight, reference_weight, sign_matrix

CERTIFIED = "certified"
DOUBLING = "doubling-checked"
HEURISTIC = "heuristic"


@dataclass
class PointCloud:
    """Points ``mu + l`` of a coset, stored scaled by the common denominator.

    ``scaled[i] = den * (mu + l_i)`` in lattice coordinates; exact norms are
    ``norm_num[i] / norm_den`` and ``maj_num[i] / maj_den``.
    """

    scaled: np.ndarray
    den: int
    norm_num: np.ndarray
    norm_den: int
    maj_num: np.ndarray
    maj_den: int

    def __len__(self):
        return len(self.scaled)

    def norm(self, i) -> Fraction:
        return Fraction(int(self.norm_num[i]), self.norm_den)

    def maj(self, i) -> Fraction:
        return Fraction(int(self.maj_num[i]), self.maj_den)

    def coords(self, i) -> tuple[Fraction, ...]:
        return tuple(Fraction(int(v), self.den) for v in self.scaled[i])

    def ambient(self, basis) -> tuple[np.ndarray, int]:
        """Ambient coordinates of every point as an integer array over one denominator."""
        bd = ia.lcm_den(v for row in basis for v in row)
        b = ia.int_array([[int(v * bd) for v in row] for row in basis])
        return ia.safe_matmul(self.scaled, b.T), bd * self.den

    def subset(self, mask) -> "PointCloud":
        return PointCloud(self.scaled[mask], self.den, self.norm_num[mask], self.norm_den,
                          self.maj_num[mask], self.maj_den)


def _int_form(gram) -> tuple[np.ndarray, int]:
    d = ia.lcm_den(v for row in gram for v in row)
    return ia.int_array([[int(v * d) for v in row] for row in gram]), d


def _cloud(lattice: Lattice, majorant: MajorantForm, ls: np.ndarray) -> PointCloud:
    den = ia.lcm_den(lattice.mu)
    mu_s = np.array([int(v * den) for v in lattice.mu], dtype=np.int64)
    scaled = ls * den + mu_s if len(ls) else np.zeros((0, lattice.dim), dtype=np.int64)
    g, gd = _int_form(lattice.gram)
    qm = matmul(transpose(lattice.basis), matmul(majorant.gram_pos, lattice.basis))
    m, md = _int_form(qm)
    return PointCloud(scaled, den, ia.quad_values(scaled, g), gd * den * den,
                      ia.quad_values(scaled, m), md * den * den)


def _fincke_pohst(q: np.ndarray, mu: np.ndarray, bound: float) -> np.ndarray:
    """Integer ``l`` with ``(mu+l)^t q (mu+l) <= bound`` (float pass, padded)."""
    d = q.shape[0]
    r = np.linalg.cholesky(q).T            # q = r^t r, r upper triangular
    diag = np.diag(r)
    coef = r / diag[:, None]
    pad = 1e-9 * max(bound, 1.0) + 1e-12
    out = []
    y = np.zeros(d)
    l = np.zeros(d, dtype=np.int64)

    def rec(i, rem):
        c = -float(coef[i, i + 1:] @ y[i + 1:]) if i + 1 < d else 0.0
        rad = math.sqrt(max(rem, 0.0)) / diag[i]
        lo = math.ceil(c - rad - mu[i] - 1e-9)
        hi = math.floor(c + rad - mu[i] + 1e-9)
        for k in range(lo, hi + 1):
            y[i] = mu[i] + k
            l[i] = k
            t = diag[i] ** 2 * (y[i] - c) ** 2
            if t > rem + pad:
                continue
            if i == 0:
                out.append(l.copy())
            else:
                rec(i - 1, rem - t)

    rec(d - 1, bound + pad)
    return np.array(out, dtype=np.int64).reshape(-1, d)


def enumerate_cloud(lattice: Lattice, majorant: MajorantForm, bound, lower=None) -> PointCloud:
    """All points of ``mu + L`` with ``lower < majorant <= bound``, exactly."""
    bound = Fraction(bound)
    qm = matmul(transpose(lattice.basis), matmul(majorant.gram_pos, lattice.basis))
    qf = np.array(qm, dtype=float)
    ls = _fincke_pohst(qf, np.array([float(v) for v in lattice.mu]), float(bound))
    cloud = _cloud(lattice, majorant, ls)
    maj = cloud.maj_num
    keep = np.array([Fraction(int(v), cloud.maj_den) <= bound for v in maj], dtype=bool)
    if lower is not None:
        lower = Fraction(lower)
        keep &= np.array([Fraction(int(v), cloud.maj_den) > lower for v in maj], dtype=bool)
    return cloud.subset(keep)


def enumerate_lattice_points(lattice: Lattice, majorant: MajorantForm, bound) -> Iterator:
    """Yield ``(x, (x,x), majorant(x,x))`` for every point of ``mu + L`` in the ball.

    ``x`` is returned in ambient coordinates.
    """
    if Fraction(bound) <= 0:
        raise ValueError("bound must be positive")
    cloud = enumerate_cloud(lattice, majorant, bound)
    for i in range(len(cloud)):
        yield lattice.to_ambient(cloud.coords(i)), cloud.norm(i), cloud.maj(i)


def box_cloud(lattice: Lattice, majorant: MajorantForm, radius: int) -> PointCloud:
    """Points ``mu + l`` with every ``|l_i| <= radius``."""
    d = lattice.dim
    ax = np.arange(-radius, radius + 1, dtype=np.int64)
    ls = np.stack(np.meshgrid(*([ax] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return _cloud(lattice, majorant, ls)


def _phi_values(config: ConeConfig, lattice: Lattice, cloud: PointCloud, wc: int,
                include_origin: bool = True) -> np.ndarray:
    s = sign_matrix(config, cloud.scaled, lattice.basis)
    phis = (s * np.roll(s, -1, axis=1)).sum(axis=1) - wc
    if not include_origin and len(phis):
        phis[~np.any(cloud.scaled != 0, axis=1)] = 0
    return phis


# --------------------------------------------------------------------------

@dataclass
class QExpansion:
    coeffs: dict[Fraction, int]
    truncation: Fraction
    bound: Fraction
    completeness: str
    config_digest: str
    N: int
    reference: int
    r_inf: float = math.inf
    empirical_support_bound: float = math.inf
    notes: list[str] = field(default_factory=list)

    @property
    def tail_rate(self) -> float:
        return min(self.r_inf, self.empirical_support_bound)

    def nonzero(self) -> dict[Fraction, int]:
        return {m: c for m, c in sorted(self.coeffs.items()) if c}

    def to_json(self) -> dict:
        return {
            "coeffs": [[m.numerator, m.denominator, c] for m, c in sorted(self.coeffs.items()) if c],
            "completeness": self.completeness,
            "truncation": format_rational(self.truncation),
            "bound": format_rational(self.bound),
            "reference_weight": self.reference,
            "r_inf": _jfloat(self.r_inf),
            "empirical_support_bound": _jfloat(self.empirical_support_bound),
            "config_digest": self.config_digest,
            "notes": list(self.notes),
        }


def _jfloat(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def config_digest(config: ConeConfig, lattice: Lattice | None = None) -> str:
    payload = {
        "gram": [[format_rational(v) for v in r] for r in config.space.gram],
        "vectors": [[format_rational(v) for v in c] for c in config.vectors],
    }
    if lattice is not None:
        payload["basis"] = [[format_rational(v) for v in r] for r in lattice.basis]
        payload["mu"] = [format_rational(v) for v in lattice.mu]
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _resolve_reference(config, reference) -> int:
    if reference is None:
        return reference_weight(config).w_c
    return reference if isinstance(reference, int) else reference.w_c


def _coefficients(config, lattice, maj, M, B, wc, include_origin=False):
    cloud = enumerate_cloud(lattice, maj, B)
    phis = _phi_values(config, lattice, cloud, wc, include_origin)
    coeffs: dict[Fraction, int] = defaultdict(int)
    support = math.inf
    for i in np.nonzero(phis)[0]:
        nrm = cloud.norm(i)
        mj = cloud.maj(i)
        if mj:
            support = min(support, float(nrm / mj))
        m = nrm / 2
        if m <= M:
            coeffs[m] += int(phis[i])
    return {m: c for m, c in coeffs.items() if c}, support


def theta_coefficients(config: ConeConfig, lattice: Lattice, M, B=None,
                       reference: ReferenceWeight | int | None = None,
                       certificate=None, include_origin: bool = False) -> QExpansion:
    """Exact coefficients ``c(m)`` for ``m <= M`` from the majorant ball ``B``.

    The origin (present when ``mu`` is integral) would add the constant
    ``-w_C`` to ``c(0)``; it is left out unless ``include_origin`` is set.

    Completeness is ``certified`` when both the cone certificate and the
    observed support satisfy ``rate * B >= 2 M``; otherwise the ball is
    doubled and the label is ``doubling-checked`` if nothing changed, else
    ``heuristic`` (and the doubled result is returned).
    """
    M = Fraction(M)
    valid = check_all(config).overall
    if reference is None and not valid:
        raise InvalidConfigError("an explicit reference weight is required for invalid configurations")
    wc = _resolve_reference(config, reference)
    if not lattice.is_dual_coset():
        warnings.warn("coset offset is not in the dual lattice; the series is still well defined",
                      stacklevel=2)
    maj = build_majorant(config.space)
    if certificate is None and valid:
        from .cones import compute_r_inf
        certificate = compute_r_inf(config, validation_samples=0)
    r_inf = certificate.r_inf if certificate is not None else math.nan
    if B is None:
        rate = r_inf if (certificate is not None and math.isfinite(r_inf)) else 1.0
        # 2M / rate rounded up to eighths, so rate * B >= 2M survives the float rate
        B = Fraction(math.floor(float(2 * M) / min(rate, 1.0) * 8) + 1, 8) if M > 0 else Fraction(1)
    B = Fraction(B)
    coeffs, support = _coefficients(config, lattice, maj, M, B, wc, include_origin)
    notes = []
    certified = (certificate is not None and r_inf * float(B) >= 2 * float(M)
                 and support * float(B) >= 2 * float(M))
    if certified:
        status = CERTIFIED
    else:
        coeffs2, support2 = _coefficients(config, lattice, maj, M, 2 * B, wc, include_origin)
        support = min(support, support2)
        if coeffs2 == coeffs:
            status = DOUBLING
        else:
            status = HEURISTIC
            notes.append(f"coefficients changed between B={B} and 2B; returning the 2B result")
            coeffs, B = coeffs2, 2 * B
    if certificate is None:
        notes.append("no convergence certificate (explicit reference on an invalid configuration)")
    return QExpansion(dict(sorted(coeffs.items())), M, B, status, config_digest(config, lattice),
                      config.N, wc, r_inf if certificate is not None else math.nan, support, notes)


def tail_bound(lattice: Lattice, majorant: MajorantForm, B, v: float, rate: float, N: int) -> float:
    """``2N * sum over points with majorant > B of exp(-pi v rate t / 2)``.

    The sum is evaluated on an explicit shell ``B < t <= T`` and the rest is
    bounded by ``exp(-a T / 2) * prod_i (2 + sqrt(pi / c))`` where the last
    factor dominates the full Gaussian sum through the smallest eigenvalue of
    the majorant in lattice coordinates.
    """
    if not math.isfinite(rate) or rate <= 0:
        return 0.0 if rate == math.inf else math.inf
    a = math.pi * v * rate / 2
    B = float(B)
    T = max(2 * B, B + 40.0 / a)
    shell = enumerate_cloud(lattice, majorant, Fraction(T).limit_denominator(10 ** 6), lower=Fraction(B).limit_denominator(10 ** 9))
    t = shell.maj_num.astype(float) / shell.maj_den
    explicit = float(np.exp(-a * t).sum())
    qm = np.array(matmul(transpose(lattice.basis), matmul(majorant.gram_pos, lattice.basis)), dtype=float)
    lam = float(np.linalg.eigvalsh(qm).min())
    c = a / 2 * lam
    rest = math.exp(-a * T / 2) * (2 + math.sqrt(math.pi / c)) ** lattice.dim
    return 2 * N * (explicit + rest)


def q_power(tau: complex, m) -> complex:
    return cmath.exp(2j * math.pi * complex(tau) * float(m))


def theta_evaluate(expansion: QExpansion, tau: complex, lattice: Lattice | None = None,
                   majorant: MajorantForm | None = None) -> tuple[complex, float | None]:
    """Value of the truncated expansion at ``tau`` and, when possible, a tail bound.

    The tail bound needs the lattice and majorant that produced the expansion.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    total = 0j
    for m in sorted(expansion.coeffs):
        total += expansion.coeffs[m] * q_power(tau, m)
    tail = None
    if lattice is not None and majorant is not None:
        tail = tail_bound(lattice, majorant, expansion.bound, tau.imag, expansion.tail_rate, expansion.N)
    return total, tail


def theta_partial_sum(config: ConeConfig, lattice: Lattice, tau: complex, B,
                      reference: ReferenceWeight | int | None = None,
                      include_origin: bool = False) -> dict:
    """Sum of ``Phi(x) q^{(x,x)/2}`` over the whole majorant ball ``B``."""
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    wc = _resolve_reference(config, reference)
    maj = build_majorant(config.space)
    cloud = enumerate_cloud(lattice, maj, B)
    phis = _phi_values(config, lattice, cloud, wc, include_origin)
    total = 0j
    support = math.inf
    idx = np.nonzero(phis)[0]
    order = sorted(idx, key=lambda i: cloud.norm(i))
    for i in order:
        nrm = cloud.norm(i)
        total += int(phis[i]) * q_power(tau, nrm / 2)
        if cloud.maj(i):
            support = min(support, float(nrm / cloud.maj(i)))
    return {"value": total, "points": len(cloud), "support_points": len(idx),
            "empirical_support_bound": support}


def divergence_witness_scan(config: ConeConfig, lattice: Lattice | None = None, box_radius: int = 10,
                            reference: ReferenceWeight | int | None = None) -> list[dict]:
    """Lattice points of negative norm with nonzero ``Phi`` in a coordinate box.

    Every witness ``x`` gives the ray ``k x`` whose norms tend to minus
    infinity while ``Phi`` stays put, so the series diverges termwise.
    """
    rep = check_all(config)
    if not (rep.holds("I.1") and rep.holds("I.2")):
        raise InvalidConfigError("divergence scan requires (I.1) and (I.2)")
    if reference is None and not rep.overall:
        raise InvalidConfigError("an explicit reference weight is required for invalid configurations")
    wc = _resolve_reference(config, reference)
    if lattice is None:
        lattice = Lattice(config.space)
    if box_radius <= 0:
        return []
    maj = build_majorant(config.space)
    cloud = box_cloud(lattice, maj, box_radius)
    neg = np.asarray(cloud.norm_num < 0, dtype=bool)
    cloud = cloud.subset(neg)
    phis = _phi_values(config, lattice, cloud, wc)
    hit = np.nonzero(phis)[0]
    amb, den = cloud.subset(hit).ambient(lattice.basis)
    rows = sorted(zip((-cloud.norm_num[hit]).tolist(), amb.tolist(), phis[hit].tolist()))
    return [{"x": tuple(Fraction(v, den) for v in x), "norm": Fraction(-n, cloud.norm_den), "phi": ph}
            for n, x, ph in rows]
