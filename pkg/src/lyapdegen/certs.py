"""Specialization certificates and unit sampling.

A certificate for a form ``Psi`` whose coefficients ``psi_m(s)`` have no common
root is a pair of Bezout identities

    a * s**(2D - 1) = sum psi_m g_m,        a = sum psi_m h_m,

with ``D = deg_s(Psi)`` and ``deg g_m, deg h_m <= D - 1``.  They turn "no common
root" into two-sided bounds on ``log||Psi_t|| - D log+|t||``.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np

from .escape import log_plus_abs
from .forms import BiForm, ScaledC, all_rationals, content_split, deg_s, eval_scaled, size_functionals
from .scalars import NEG_INF, SPoly, SRat, as_rat, gcd_many, log_abs, root_bound, vp

N = 1


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


# ---------------------------------------------------------------------------
# exact linear solve


def solve_rational(A: list[list[Fraction]], b: list[Fraction]) -> tuple[list[Fraction] | None, int]:
    """One solution of ``A x = b`` (free variables set to 0) and the rank of ``A``.

    Returns ``(None, rank)`` for an inconsistent system.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    aug = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(A, b)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in aug[r:]):
        return None, r
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = aug[i][-1]
    return x, r


# ---------------------------------------------------------------------------


@dataclass
class Certificate:
    a: Fraction
    g: list[SPoly]
    h: list[SPoly]
    C1: float
    C2: float
    theta: float
    r: int
    deg_s: int
    deg_X: int
    ceiling: float

    def verify(self, psi: BiForm) -> bool:
        """Re-substitute both identities exactly."""
        cs = _poly_coeffs(psi)
        D = self.deg_s
        lhs_g = sum((c * g for c, g in zip(cs, self.g)), SPoly())
        lhs_h = sum((c * h for c, h in zip(cs, self.h)), SPoly())
        return lhs_g == SPoly.monomial(2 * D - 1, self.a) and lhs_h == SPoly.const(self.a)

    def to_json(self) -> dict:
        return {
            "a": str(self.a),
            "g": [p.to_json() for p in self.g],
            "h": [p.to_json() for p in self.h],
            "C1": self.C1,
            "C2": self.C2,
            "theta": self.theta,
            "r": self.r,
            "deg_s": self.deg_s,
            "deg_X": self.deg_X,
            "ceiling": self.ceiling,
        }


def _poly_coeffs(psi: BiForm) -> list[SPoly]:
    out = []
    for c in psi.coeffs:
        c = SRat.coerce(c)
        if not c.is_poly():
            raise ValueError("certificates need polynomial coefficients")
        out.append(c.num * (1 / c.den.lc))
    return out


def _log_plus_norm(p: SPoly) -> float:
    if p.is_zero():
        return 0.0
    return max(0.0, math.log(max(abs(c) for c in p.num)) - math.log(p.den))


def build_certificate(psi: BiForm) -> Certificate:
    """Exact solution of both Bezout identities for a primitive polynomial form."""
    cs = _poly_coeffs(psi)
    nz = [c for c in cs if not c.is_zero()]
    D = max(c.degree for c in nz)
    if D < 1:
        raise ValueError("nothing to certify: deg_s = 0")
    if not gcd_many(nz).is_const():
        raise ValueError("not primitive, use strong_bound")
    L = reduce(_lcm, (c.den for c in nz), 1)
    ints = [c * L for c in cs]
    n_terms = len(cs)
    # unknown block m holds the D coefficients of the m-th multiplier
    A = [[Fraction(0)] * (n_terms * D) for _ in range(2 * D)]
    for m, c in enumerate(ints):
        for j, cj in enumerate(c.coeffs):
            for k in range(D):
                A[j + k][m * D + k] = cj
    rhs_g = [Fraction(0)] * (2 * D)
    rhs_g[2 * D - 1] = Fraction(1)
    rhs_h = [Fraction(0)] * (2 * D)
    rhs_h[0] = Fraction(1)
    xg, rank = solve_rational(A, rhs_g)
    xh, _ = solve_rational(A, rhs_h)
    if xg is None or xh is None:
        raise ArithmeticError("Bezout system has no solution within the degree bound")
    # primitive integer vector (a', g', h') with a' > 0; then a = a' / L for the original form
    vec = [Fraction(1)] + xg + xh
    den = reduce(_lcm, (v.denominator for v in vec), 1)
    iv = [int(v * den) for v in vec]
    g0 = reduce(math.gcd, iv, 0)
    iv = [v // g0 for v in iv]
    a_int, rest = iv[0], iv[1:]
    g = [SPoly(rest[m * D:(m + 1) * D]) for m in range(n_terms)]
    h = [SPoly(rest[n_terms * D + m * D: n_terms * D + (m + 1) * D]) for m in range(n_terms)]
    a = Fraction(a_int, L)
    c1 = max(_log_plus_norm(p) for p in g + h)
    c2 = max(0.0, -log_abs(a))
    sizes = size_functionals(psi)
    r = min(rank, 4 * D)
    ceiling = r * sizes.hplus + r * math.log(r) if r > 0 else 0.0
    cert = Certificate(a, g, h, c1, c2, sizes.theta, r, D, psi.degree, ceiling)
    if not cert.verify(psi):
        raise ArithmeticError("certificate failed re-substitution")
    return cert


# ---------------------------------------------------------------------------


@dataclass
class Interval:
    lo: float
    hi: float
    deviation: float | None = None
    certified: bool = True
    radius: float = 0.0
    note: str = ""

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "deviation": self.deviation,
                "certified": self.certified, "radius": self.radius, "note": self.note}


def log_norm_at(psi: BiForm, t) -> float:
    """``log ||Psi_t||`` (max coefficient modulus) at a rational or complex ``t``."""
    cs = _poly_coeffs(psi)
    if isinstance(t, (int, Fraction)):
        vals = [abs(c(as_rat(t))) for c in cs]
        top = max(vals)
        return log_abs(top) if top else NEG_INF
    ts = t if isinstance(t, ScaledC) else ScaledC.of(t)
    return max(eval_scaled(c, ts).log_abs() for c in cs)


def deviation(psi: BiForm, t) -> float:
    return log_norm_at(psi, t) - deg_s(psi) * log_plus_abs(t)


def _arch_norm(psi: BiForm) -> float:
    return max(log_abs(c) for c in all_rationals(psi) if c)


def bound_at(cert: Certificate, psi: BiForm, t) -> Interval:
    """Interval containing ``log||Psi_t|| - deg_s(Psi) log+|t|``."""
    D, e = cert.deg_s, cert.deg_X
    lo = -(cert.C1 + cert.C2 + math.log(D + 1) + N * math.log(e + 1))
    hi = _arch_norm(psi) + math.log(1 + D)
    return Interval(lo, hi, deviation(psi, t))


def strong_bound(psi: BiForm, t) -> tuple[Interval, Certificate | None]:
    """Bound for forms with a content ``alpha``: certify ``Psi / alpha`` and
    control ``alpha`` outside ``2 * root_bound(alpha)``."""
    alpha, prim, c = content_split(psi)
    core = prim * c
    dev = deviation(psi, t)
    if deg_s(core) >= 1:
        cert = build_certificate(core)
        inner = bound_at(cert, core, t)
    else:
        cert = None
        v = _arch_norm(core)
        inner = Interval(v, v)
    if alpha.is_const():
        return Interval(inner.lo, inner.hi, dev), cert
    radius = float(2 * root_bound(alpha))
    widen = _log_plus_norm(alpha) + alpha.degree * math.log(2)
    upper = _arch_norm(psi) + math.log(1 + deg_s(psi))
    if abs(complex(t if not isinstance(t, ScaledC) else t.to_complex())) <= radius:
        return Interval(NEG_INF, upper, dev, certified=False, radius=radius,
                        note="outside certified region"), cert
    return Interval(inner.lo - widen, inner.hi + widen, dev, radius=radius), cert


# ---------------------------------------------------------------------------
# sampling


@dataclass
class SampleResult:
    t: object
    kappa: float
    margins: list[float]
    place: str
    modulus: list[int] | None = None
    eps: float | None = None

    def to_json(self) -> dict:
        t = self.t
        if isinstance(t, complex):
            t = [t.real, t.imag]
        elif isinstance(t, tuple):
            t = list(t)
        return {"t": t, "kappa": self.kappa, "margins": self.margins, "place": self.place,
                "modulus": self.modulus, "eps": self.eps}


def kappa_arch(degrees: Sequence[int]) -> float:
    """Safe archimedean slack ``(max deg + 1)(log 2 + log sum deg) + max deg * log 2``."""
    total = sum(degrees)
    if total == 0:
        return 0.0
    top = max(degrees)
    return (top + 1) * (math.log(2) + math.log(total)) + top * math.log(2)


def kappa_stated(degrees: Sequence[int]) -> float:
    """``(max deg + 1) log(2 sum deg)``, the smaller constant."""
    total = sum(degrees)
    if total == 0:
        return 0.0
    return (max(degrees) + 1) * math.log(2 * total)


def _complex_coeffs(q) -> np.ndarray:
    """Ascending coefficient array of an SPoly or a sequence of numbers."""
    if isinstance(q, SPoly):
        return np.array([complex(c) for c in q.coeffs])
    arr = np.trim_zeros(np.asarray(q, dtype=complex), "b")
    return arr


def _arcs_free_angle(roots: np.ndarray, eps: float) -> float | None:
    """Midpoint of the largest arc of the unit circle at distance >= eps from every root."""
    blocked = []
    for g in roots:
        r, phi = abs(g), cmath.phase(g)
        if r == 0:
            if eps > 1:
                return None
            continue
        cosw = (1 + r * r - eps * eps) / (2 * r)
        if cosw >= 1:
            continue
        if cosw <= -1:
            return None
        w = math.acos(cosw)
        blocked.append(((phi - w) % (2 * math.pi), 2 * w))
    if not blocked:
        return 0.0
    ivs = sorted((s, s + L) for s, L in blocked)
    start = ivs[0][0]
    end = ivs[0][1]
    gaps = []
    for s, e in ivs[1:]:
        if s > end:
            gaps.append((end, s))
        end = max(end, e)
    if end < start + 2 * math.pi:
        gaps.append((end, start + 2 * math.pi))
    if not gaps:
        return None
    lo, hi = max(gaps, key=lambda g: g[1] - g[0])
    return ((lo + hi) / 2) % (2 * math.pi)


def sample_unit(qs: Sequence, place: str = "arch") -> SampleResult:
    """A unit ``t`` at which every ``|q_i(t)|_v`` is within ``kappa_v`` of ``||q_i||_v``."""
    if not qs:
        raise ValueError("no polynomials")
    if place == "arch":
        return _sample_arch(qs)
    if place.startswith("p:"):
        return _sample_padic([SPoly.coerce(q) if not isinstance(q, SPoly) else q for q in qs],
                             int(place[2:]))
    raise ValueError(f"unknown place {place!r}")


def _sample_arch(qs) -> SampleResult:
    arrs = [_complex_coeffs(q) for q in qs]
    if any(len(a) == 0 for a in arrs):
        raise ValueError("zero polynomial")
    degs = [len(a) - 1 for a in arrs]
    total = sum(degs)
    kappa = kappa_arch(degs)
    if total == 0:
        return SampleResult(1 + 0j, kappa, [0.0] * len(qs), "arch", eps=None)
    eps = min(1.0, 2.0 / total)
    roots = np.concatenate([np.roots(a[::-1]) if len(a) > 1 else np.array([], complex) for a in arrs])
    t = None
    n_grid = 8 * total
    for j in range(n_grid):
        z = cmath.exp(2j * math.pi * j / n_grid)
        if len(roots) == 0 or np.min(np.abs(z - roots)) >= eps:
            t = z
            break
    if t is None:
        ang = _arcs_free_angle(roots, eps)
        if ang is None:
            raise RuntimeError("no admissible point on the unit circle")
        t = cmath.exp(1j * ang)
    margins = []
    for a in arrs:
        val = np.polyval(a[::-1], t)
        margins.append(abs(math.log(abs(val)) - math.log(np.abs(a).max())))
    if max(margins) > kappa:
        raise ArithmeticError(f"margin {max(margins)} exceeds kappa {kappa}")
    return SampleResult(t, kappa, margins, "arch", eps=eps)


def _mod_poly_eval(coeffs: list[int], t: tuple, mu: list[int], p: int) -> tuple:
    """Evaluate ascending ``coeffs`` at ``t`` in ``F_p[x]/(mu)`` (``mu`` monic ascending)."""
    f = len(mu) - 1
    acc = [0] * f
    for c in reversed(coeffs):
        acc = _mulmod(acc, t, mu, p)
        acc[0] = (acc[0] + c) % p
    return tuple(acc)


def _mulmod(a, b, mu, p):
    f = len(mu) - 1
    prod = [0] * (2 * f - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k] % p
        if c:
            for i in range(f + 1):
                prod[k - f + i] -= c * mu[i]
    return [x % p for x in prod[:f]]


def _irreducible_mod_p(f: int, p: int) -> list[int]:
    import sympy

    x = sympy.Symbol("x")
    for tail in itertools.product(range(p), repeat=f):
        coeffs = list(tail) + [1]
        if coeffs[0] == 0:
            continue
        poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
        if poly.is_irreducible:
            return coeffs
    raise ArithmeticError("no irreducible polynomial found")


def _valuation_ext(q: SPoly, t: tuple, mu: list[int], p: int) -> int:
    """Exact p-adic valuation of ``q(t)`` in the unramified extension ``Z_p[x]/(mu)``."""
    f = len(mu) - 1
    acc = [Fraction(0)] * f
    for c in reversed(q.coeffs):
        prod = [Fraction(0)] * (2 * f - 1)
        for i, a in enumerate(acc):
            if a:
                for j, b in enumerate(t):
                    prod[i + j] += a * b
        for k in range(len(prod) - 1, f - 1, -1):
            c_ = prod[k]
            if c_:
                for i in range(f + 1):
                    prod[k - f + i] -= c_ * mu[i]
        acc = prod[:f]
        acc[0] += c
    nz = [x for x in acc if x]
    if not nz:
        raise ArithmeticError("polynomial vanishes at the sample")
    return min(vp(x, p) for x in nz)


def _sample_padic(qs: list[SPoly], p: int) -> SampleResult:
    from sympy import isprime

    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if any(q.is_zero() for q in qs):
        raise ValueError("zero polynomial")
    normed = []
    vals = []
    for q in qs:
        v = min(vp(c, p) for c in q.coeffs if c)
        vals.append(v)
        scaled = [c / Fraction(p) ** v for c in q.coeffs]
        normed.append([(x.numerator * pow(x.denominator, -1, p)) % p for x in scaled])
    total = sum(q.degree for q in qs)
    f = 1
    while True:
        mu = [0, 1] if f == 1 else _irreducible_mod_p(f, p)
        for elem in itertools.product(range(p), repeat=f):
            if not any(elem):
                continue
            t = tuple(elem)
            if f == 1:
                ok = all(_ieval_mod(c, t[0], p) != 0 for c in normed)
            else:
                ok = all(any(_mod_poly_eval(c, t, mu, p)) for c in normed)
            if ok:
                if f == 1:
                    margins = [abs(vp(q(Fraction(t[0])), p) - v) * math.log(p) for q, v in zip(qs, vals)]
                    return SampleResult(t[0], 0.0, margins, f"p:{p}")
                margins = [abs(_valuation_ext(q, t, mu, p) - v) * math.log(p) for q, v in zip(qs, vals)]
                return SampleResult(t, 0.0, margins, f"p:{p}", modulus=mu)
        f += 1
        if p ** f - 1 > 4 * total + 64 and f > 8:
            raise ArithmeticError("residue search failed")


def _ieval_mod(coeffs: list[int], t: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * t + c) % p
    return acc
