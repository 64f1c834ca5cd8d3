"""Two-dimensional generalized error function and the completed series.

``E2(C, C'; x)`` averages ``sgn(y, C) sgn(y, C')`` over the negative plane
``z = span(C, C')`` against the Gaussian ``exp(pi (y - p, y - p))`` centred
at the projection ``p`` of ``x``.  In an orthonormal frame of ``z`` for
``-(.,.)`` the weight is ``exp(-pi |u - p|^2) du``, which has total mass 1.

The two kernel lines cut ``z`` into four sectors on which the sign product
is constant.  On each sector the radial integral is done in closed form
(an ``erfc``) and the angular one by Gauss-Legendre with bisection.

For the completed series the weight is not formed as ``-w_C + sum E2``:
negative-norm terms carry factors ``|q|^{(x,x)/2}`` far above 1, so the
cancellation between pairs has to be done exactly.  See
``completion_weight``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc, erfcx

from .incidence import ConeConfig, check_all
from .quadform import Lattice, build_majorant
from .signwalk import InvalidConfigError, ReferenceWeight, reference_weight, sign_matrix
from .theta import enumerate_cloud

NORMALIZATION = "dy = Lebesgue measure in an orthonormal frame of -(.,.) on z; signless integral = 1"


class DegeneratePlaneError(ValueError):
    """``span(C, C')`` is not a negative definite plane."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class PlaneFrame:
    gram: np.ndarray
    c: np.ndarray
    c2: np.ndarray
    f1: np.ndarray
    f2: np.ndarray

    def coords(self, x) -> np.ndarray:
        """Frame coordinates of the projection of ``x`` onto the plane."""
        gx = self.gram @ np.asarray(x, dtype=float)
        return np.array([-(self.f1 @ gx), -(self.f2 @ gx)])

    def project(self, x) -> np.ndarray:
        u = self.coords(x)
        return u[0] * self.f1 + u[1] * self.f2

    def line_normals(self) -> tuple[np.ndarray, np.ndarray]:
        """``n`` with ``sgn(y, C) = sgn(n . u)`` for ``y = u1 f1 + u2 f2``."""
        g = self.gram
        n1 = np.array([self.f1 @ g @ self.c, self.f2 @ g @ self.c])
        n2 = np.array([self.f1 @ g @ self.c2, self.f2 @ g @ self.c2])
        return n1, n2


def plane_frame(space, c, c2) -> PlaneFrame:
    g = space.gram
    gcc = sum(ci * gij * dj for ci, row in zip(c, g) for gij, dj in zip(row, c))
    g22 = sum(ci * gij * dj for ci, row in zip(c2, g) for gij, dj in zip(row, c2))
    g12 = sum(ci * gij * dj for ci, row in zip(c, g) for gij, dj in zip(row, c2))
    if not (gcc < 0 and gcc * g22 - g12 * g12 > 0):
        raise DegeneratePlaneError("E2 undefined: span(C, C') is not a negative definite plane")
    gf = np.array(g, dtype=float)
    cf = np.array([float(v) for v in c])
    c2f = np.array([float(v) for v in c2])
    f1 = cf / math.sqrt(-(cf @ gf @ cf))
    u = c2f + (c2f @ gf @ f1) * f1
    f2 = u / math.sqrt(-(u @ gf @ u))
    return PlaneFrame(gf, cf, c2f, f1, f2)


def project_to_plane(frame: PlaneFrame, x) -> np.ndarray:
    return frame.coords(x)


_GL = {n: np.polynomial.legendre.leggauss(n) for n in (16, 32)}


def _radial(theta: np.ndarray, p: np.ndarray) -> np.ndarray:
    """``int_0^inf r exp(-pi |r e_theta - p|^2) dr``."""
    c, s = np.cos(theta), np.sin(theta)
    a = p[0] * c + p[1] * s                 # component of p along e_theta
    b2 = (p[0] * s - p[1] * c) ** 2          # |p|^2 - a^2 without cancellation
    z = math.sqrt(math.pi) * a
    # exp(-pi b2) * erfc(-z), written so that nothing overflows
    g = np.where(a >= 0,
                 np.exp(-math.pi * b2) * (2 - erfcx(np.abs(z)) * np.exp(-z * z)),
                 np.exp(-math.pi * (b2 + a * a)) * erfcx(np.abs(z)))
    return np.exp(-math.pi * (b2 + a * a)) / (2 * math.pi) + 0.5 * a * g


def _gl(lo, hi, p, n):
    x, w = _GL[n]
    th = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return 0.5 * (hi - lo) * float(w @ _radial(th, p))


def _sector(lo, hi, p, atol, rtol, max_intervals):
    """Adaptive bisection; ``atol`` is absolute per unit angle."""
    total, err, failed = 0.0, 0.0, False
    stack = [(lo, hi)]
    used = 0
    while stack:
        a, b = stack.pop()
        coarse, fine = _gl(a, b, p, 16), _gl(a, b, p, 32)
        e = abs(fine - coarse)
        used += 1
        # below a few ulps of the piece itself the difference is rounding noise
        ok = e <= max(atol * (b - a), rtol * abs(fine), 1e-15 * abs(fine))
        if ok or used + len(stack) >= max_intervals:
            failed |= not ok
            total += fine
            err += e
        else:
            m = 0.5 * (a + b)
            stack += [(a, m), (m, b)]
    return total, err, failed


def gaussian_sector_integral(p, normals, tol=1e-12, signless=False, offsets=None,
                             rtol=1e-12, max_intervals=4096):
    """Integral of ``exp(-pi|u-p|^2) prod sgn(n.u)`` over the plane.

    With ``offsets`` (one exact sign per normal, normally the signs at
    ``p``) the integrand becomes ``prod (sgn(n.u) - offset)``.  Only sectors
    lying across every line from ``p`` contribute then, so small results
    keep their relative accuracy.  Returns
    ``(value, error_estimate)``.
    """
    p = np.asarray(p, dtype=float)
    cuts = [0.0]
    if not signless:
        for n in normals:
            t = math.atan2(n[1], n[0]) + math.pi / 2
            cuts += [t % (2 * math.pi), (t + math.pi) % (2 * math.pi)]
    if p @ p > 0:
        cuts.append(math.atan2(p[1], p[0]) % (2 * math.pi))
    cuts = sorted(set(cuts)) + [2 * math.pi]
    atol = 0.0 if offsets is not None else tol / (2 * math.pi)
    total, err, failed = 0.0, 0.0, False
    for lo, hi in zip(cuts, cuts[1:]):
        if hi - lo < 1e-15:
            continue
        mid = 0.5 * (lo + hi)
        u = np.array([math.cos(mid), math.sin(mid)])
        weight = 1
        if not signless:
            for k, n in enumerate(normals):
                sigma = 1 if n @ u > 0 else -1
                weight *= sigma - offsets[k] if offsets is not None else sigma
        if weight == 0:
            continue
        val, e, f = _sector(lo, hi, p, atol, rtol, max_intervals)
        total += weight * val
        err += abs(weight) * e
        failed |= f
    if failed:
        raise QuadratureError(f"tolerance {tol} not reached at the interval cap (estimate {err:.3g})")
    return total, err


def E2_quadrature(frame: PlaneFrame, x, tol: float = 1e-12, signless: bool = False):
    """``(E2(C, C'; x), error_estimate)``."""
    value, err = gaussian_sector_integral(frame.coords(x), frame.line_normals(), tol, signless)
    # an average of +-1 against a probability measure; clip rounding overshoot
    return min(1.0, max(-1.0, value)), err


def E2_remainder(frame: PlaneFrame, x, s1: int, s2: int, rtol: float = 1e-12):
    """Gaussian mass weighted by ``(sgn(x, C) - s1)(sgn(x, C') - s2)``.

    With ``s1, s2`` the exact signs at ``x`` this is
    ``E2 - s1 s2 - s2 R(C) - s1 R(C')`` for the one-line residuals ``R``.
    """
    return gaussian_sector_integral(frame.coords(x), frame.line_normals(),
                                    offsets=(int(s1), int(s2)), rtol=rtol)


def line_residual(space, c, x, sign: int) -> float:
    """``erf(sqrt(pi) d) - sgn(d)`` for ``d`` the signed distance of ``x`` to ``c``'s wall."""
    if sign == 0:
        return 0.0
    g = np.array(space.gram, dtype=float)
    cf = np.array(c, dtype=float)
    d = abs(float(np.asarray(x, dtype=float) @ g @ cf)) / math.sqrt(-float(cf @ g @ cf))
    return -sign * float(erfc(math.sqrt(math.pi) * d))


def E2(space, c, c2, x, tol: float = 1e-12) -> float:
    return E2_quadrature(plane_frame(space, c, c2), x, tol)[0]


# --------------------------------------------------------------------------

@dataclass
class CompletedPartialSum:
    value: complex
    bound: float
    points: int
    error_budget: float
    shell_norms: dict[int, float] = field(default_factory=dict)
    normalization: str = NORMALIZATION


def pair_frames(config: ConeConfig):
    frames, bad = [], []
    for j in range(config.N):
        try:
            frames.append(plane_frame(config.space, config.vectors[j], config.vectors[(j + 1) % config.N]))
        except DegeneratePlaneError:
            frames.append(None)
            bad.append(j + 1)
    return frames, bad


def completion_weight(config: ConeConfig, frames, signs, wc: int, x,
                      rtol: float = 1e-12) -> tuple[float, float]:
    """``-w_C + sum_j E2(C_j, C_{j+1}; sqrt(2) x)`` and its quadrature error.

    Each term is split as ``s s' + s' R(C) + s R(C') + K``.  The sign
    products sum to ``w(x)``, the one-line residuals ``R`` are collected per
    wall with integer coefficients ``s_{j-1} + s_{j+1}``, and only the small
    two-line remainders ``K`` are integrated.  Cancellation between
    neighbouring pairs thus happens in exact arithmetic, which matters
    because negative-norm terms are multiplied by large powers of ``|q|``.
    ``signs`` is the exact sign vector of ``x``.
    """
    root2 = math.sqrt(2)
    y = root2 * np.asarray(x, dtype=float)
    n = len(frames)
    coef = [0] * n
    total, err, w = 0.0, 0.0, 0
    for j, fr in enumerate(frames):
        k = (j + 1) % n
        a, b = int(signs[j]), int(signs[k])
        w += a * b
        coef[j] += b
        coef[k] += a
        v, e = E2_remainder(fr, y, a, b, rtol)
        total += v
        err += e
    yx = [root2 * float(t) for t in x]
    for j in range(n):
        if coef[j]:
            total += coef[j] * line_residual(config.space, config.vectors[j], yx, int(signs[j]))
    return float(w - wc) + total, err


def completed_theta_partial(config: ConeConfig, lattice: Lattice, tau: complex, B,
                            reference: ReferenceWeight | int | None = None,
                            tol: float = 1e-12) -> CompletedPartialSum:
    """Partial sum of the completed series over the majorant ball ``B``.

    ``tol`` is the relative accuracy asked of each two-line remainder;
    ``error_budget`` sums the quadrature estimates weighted by ``|q^{(x,x)/2}|``.
    """
    tau = complex(tau)
    if tau.imag <= 0:
        raise ValueError("tau must lie in the upper half plane")
    valid = check_all(config).overall
    if reference is None:
        if not valid:
            raise InvalidConfigError("completion requires a valid configuration or a reference")
        reference = reference_weight(config)
    wc = reference if isinstance(reference, int) else reference.w_c
    frames, bad = pair_frames(config)
    if bad:
        raise DegeneratePlaneError(f"E2 undefined for degenerate pairs starting at j={bad}")
    maj = build_majorant(config.space)
    cloud = enumerate_cloud(lattice, maj, B)
    basis = np.array(lattice.basis, dtype=float)
    total = 0j
    budget = 0.0
    shells: dict[int, float] = {}
    order = sorted(range(len(cloud)), key=lambda i: (cloud.maj(i), cloud.norm(i)))
    signs = sign_matrix(config, cloud.scaled, lattice.basis)
    for i in order:
        x = basis @ (cloud.scaled[i].astype(float) / cloud.den)
        wgt, err = completion_weight(config, frames, signs[i], wc, x, tol)
        if wgt == 0 and err == 0:
            continue
        qn = cmath.exp(1j * math.pi * tau * float(cloud.norm(i)))
        total += wgt * qn
        budget += abs(qn) * err
        k = math.ceil(float(cloud.maj(i)))
        shells[k] = shells.get(k, 0.0) + abs(wgt * qn)
    return CompletedPartialSum(total, float(B), len(cloud), budget, shells)


def completed_doubling(config: ConeConfig, lattice: Lattice, tau: complex, B,
                       reference=None, tol: float = 1e-12) -> dict:
    """Compare partial sums on balls ``B`` and ``2B``.

    ``ratio = |S(2B) - S(B)| / tail(B)`` with ``tail(B)`` the summed term
    magnitudes on the last doubling shell ``B/2 < majorant <= B``.  A
    difference within the accumulated quadrature error counts as zero.
    """
    s1 = completed_theta_partial(config, lattice, tau, B, reference, tol)
    s2 = completed_theta_partial(config, lattice, tau, 2 * B, reference, tol)
    diff = abs(s2.value - s1.value)
    tail = sum(v for k, v in s1.shell_norms.items() if k > float(B) / 2)
    noise = s1.error_budget + s2.error_budget
    if diff <= noise:
        ratio = 0.0
    else:
        ratio = diff / tail if tail > 0 else math.inf
    return {"S_B": s1.value, "S_2B": s2.value, "difference": diff, "tail_estimate": tail,
            "quadrature_noise": noise, "ratio": ratio}
