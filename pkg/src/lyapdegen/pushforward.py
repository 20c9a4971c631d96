"""Pushforward of binary forms along a lift ``F = (P, Q)``.

``F_*Phi(X) = prod_{F(Y) = X} Phi(Y)`` over the ``d**2`` affine preimages is
computed exactly as ``Res_{U,V}(Y P - X Q, Phi)**d / Res(P, Q)**deg(Phi)``.
The resultant in ``(X, s)`` is assembled by evaluation at integer nodes,
fraction-free determinants and exact interpolation.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .forms import BiForm, ScaledC, deg_s, specialize, split_scalar
from .roots import RootFindingError, aberth
from .scalars import SPoly, SRat, as_rat, imul, lcm_poly, log_abs

# ---------------------------------------------------------------------------
# exact linear algebra


def bareiss_det(rows: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rk = a[k]
        for i in range(k + 1, n):
            ri = a[i]
            aik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * akk - aik * rk[j]) // prev
            ri[k] = 0
        prev = akk
    return sign * a[-1][-1]


def det_rational(rows: Sequence[Sequence]) -> Fraction:
    scale = Fraction(1)
    ints = []
    for r in rows:
        r = [as_rat(x) for x in r]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in r), 1)
        ints.append([int(x * lcm) for x in r])
        scale *= lcm
    return Fraction(bareiss_det(ints)) / scale


def sylvester(a: Sequence, b: Sequence, zero=0) -> list[list]:
    """Sylvester matrix; ``a`` and ``b`` list coefficients from the highest X power down."""
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + list(a) + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + list(b) + [zero] * (size - n - 1 - i))
    return rows


def newton_interp(xs: Sequence[int], ys: Sequence) -> SPoly:
    """Exact interpolating polynomial through ``(xs[i], ys[i])``."""
    n = len(xs)
    coef = [as_rat(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = SPoly.const(coef[-1])
    for i in range(n - 2, -1, -1):
        poly = poly * SPoly([-xs[i], 1]) + coef[i]
    return poly


def _int_poly_rows(form_coeffs: Sequence[SRat]) -> tuple[list[list[int]], Fraction, SPoly]:
    """Clear denominators: ``coeffs = ints / (scale * den)``; returns integer s-polys."""
    den = reduce(lcm_poly, (c.den for c in form_coeffs if not c.is_zero()), SPoly.const(1))
    polys = [c.num * den.exquo(c.den) if not c.is_zero() else SPoly() for c in form_coeffs]
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (p.den for p in polys if not p.is_zero()), 1)
    ints = [list((p * lcm).num) for p in polys]
    return ints, Fraction(lcm), den


def _ieval(p: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _res_int_polys(a: list[list[int]], b: list[list[int]]) -> SPoly:
    """Resultant of two forms whose coefficients are integer s-polynomials."""
    m, n = len(a) - 1, len(b) - 1
    da = max((len(p) - 1 for p in a if p), default=0)
    db = max((len(p) - 1 for p in b if p), default=0)
    bound = n * da + m * db
    nodes = list(range(bound + 1))
    vals = []
    for s in nodes:
        ea = [_ieval(p, s) for p in a]
        eb = [_ieval(p, s) for p in b]
        vals.append(bareiss_det(sylvester(ea, eb)))
    return newton_interp(nodes, vals)


def res_binary(A: BiForm, B: BiForm):
    """Sylvester resultant of two binary forms.

    Exact over SRat (returns SRat) and Fraction; numeric over complex or
    ScaledC coefficients (returns ScaledC).
    """
    ca, cb = A.coeffs, B.coeffs
    if all(isinstance(c, (SRat, SPoly)) for c in ca + cb):
        ca = [SRat.coerce(c) for c in ca]
        cb = [SRat.coerce(c) for c in cb]
        ia, sa, da = _int_poly_rows(ca)
        ib, sb, db = _int_poly_rows(cb)
        m, n = len(ca) - 1, len(cb) - 1
        r = _res_int_polys(ia, ib)
        scale = sa ** n * sb ** m
        return SRat(r * (1 / scale), da ** n * db ** m)
    if all(isinstance(c, (int, Fraction)) for c in ca + cb):
        return det_rational(sylvester(ca, cb, Fraction(0)))
    return _res_numeric(ca, cb)


def _res_numeric(ca, cb) -> ScaledC:
    a = [c if isinstance(c, ScaledC) else ScaledC.of(c) for c in ca]
    b = [c if isinstance(c, ScaledC) else ScaledC.of(c) for c in cb]
    la = max(c.log_abs() for c in a)
    lb = max(c.log_abs() for c in b)
    na = np.array([_rescale(c, la) for c in a])
    nb = np.array([_rescale(c, lb) for c in b])
    sign, logdet = np.linalg.slogdet(np.array(sylvester(na, nb, 0j), dtype=complex))
    m, n = len(a) - 1, len(b) - 1
    if sign == 0 or not math.isfinite(logdet):
        return ScaledC.of(0)
    return _scaled_from_log(cmath.phase(sign), float(logdet) + n * la + m * lb)


def _rescale(c: ScaledC, log_scale: float) -> complex:
    if c.is_zero():
        return 0j
    return cmath.rect(math.exp(c.log_abs() - log_scale), c.arg())


def _scaled_from_log(phase: float, logmag: float) -> ScaledC:
    e = math.floor(logmag / math.log(2))
    return ScaledC.of(cmath.rect(math.exp(logmag - e * math.log(2)), phase), e)


# ---------------------------------------------------------------------------


def _poly_coeffs(form: BiForm) -> list[SRat]:
    return [SRat.coerce(c) for c in form.coeffs]


class Lift:
    """A lift ``F = (P, Q)`` of a degree-``d`` endomorphism of P^1 over Q(s).

    By default the pair is divided by its joint content (monic gcd of all
    coefficients and the rational content), which pins the lift scaling.
    """

    def __init__(self, P: BiForm, Q: BiForm, normalize: bool = True):
        if P.degree != Q.degree:
            raise ValueError("P and Q must have the same degree")
        if P.degree < 1:
            raise ValueError("lift degree must be at least 1")
        P = BiForm.exact(P.coeffs) if not P.is_exact else P
        Q = BiForm.exact(Q.coeffs) if not Q.is_exact else Q
        if normalize:
            joint = split_scalar(BiForm(P.coeffs + Q.coeffs))
            inv = joint.scalar.inverse()
            P, Q = P * inv, Q * inv
        self.P, self.Q = P, Q
        self.res = res_binary(P, Q)
        if self.res.is_zero():
            raise ValueError("Res(P, Q) vanishes identically: degenerate lift")

    @property
    def d(self) -> int:
        return self.P.degree

    @cached_property
    def deg_s(self):
        return max(deg_s(self.P), deg_s(self.Q))

    @cached_property
    def _integral(self):
        """``(P, Q) = (Pi, Qi) / (scale * den)`` with integer s-polynomial rows."""
        ints, scale, den = _int_poly_rows(_poly_coeffs(self.P) + _poly_coeffs(self.Q))
        d = self.d
        return ints[:d + 1], ints[d + 1:], scale, den

    def is_polynomial(self) -> bool:
        return self.P.is_polynomial() and self.Q.is_polynomial()

    def specialize(self, t) -> "Lift":
        """Exact fibre at rational ``t`` (not renormalized)."""
        Pt = specialize(self.P, t)
        Qt = specialize(self.Q, t)
        return Lift(BiForm.exact(Pt.coeffs), BiForm.exact(Qt.coeffs), normalize=False)

    def numeric(self, t) -> "NumericLift":
        return NumericLift.of(self, t)

    def __call__(self, x, y):
        return self.P(x, y), self.Q(x, y)

    def to_json(self) -> dict:
        return {"P": self.P.to_json(), "Q": self.Q.to_json()}

    @classmethod
    def from_json(cls, data: dict, normalize: bool = True) -> "Lift":
        return cls(BiForm.from_json(data["P"]), BiForm.from_json(data["Q"]), normalize=normalize)

    def __eq__(self, other):
        return isinstance(other, Lift) and self.P == other.P and self.Q == other.Q

    def __repr__(self):
        return f"Lift(P={self.P}, Q={self.Q})"


@dataclass(frozen=True)
class NumericLift:
    """Specialized lift ``F_t = exp(log_scale) * (p, q)`` with ``max|coeff| = 1``."""

    p: np.ndarray
    q: np.ndarray
    log_scale: float

    @classmethod
    def of(cls, F: Lift, t) -> "NumericLift":
        Pt = specialize(F.P, t)
        Qt = specialize(F.Q, t)
        cs = [c if isinstance(c, ScaledC) else ScaledC.from_rat(c) for c in Pt.coeffs + Qt.coeffs]
        top = max(c.log_abs() for c in cs)
        arr = np.array([_rescale(c, top) for c in cs])
        d = F.d
        return cls(arr[:d + 1], arr[d + 1:], top)

    @property
    def d(self) -> int:
        return len(self.p) - 1

    def __call__(self, a, b):
        """Normalized ``(P, Q)`` at points ``(a, b)`` (arrays allowed)."""
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        d = self.d
        P = sum(self.p[i] * a ** (d - i) * b ** i for i in range(d + 1))
        Q = sum(self.q[i] * a ** (d - i) * b ** i for i in range(d + 1))
        return P, Q

    @cached_property
    def log_abs_res(self) -> float:
        """``log |Res(F_t)|``; the normalized pair carries ``2d * log_scale``."""
        # slogdet keeps tiny determinants (|t| ~ 1e200) from underflowing
        sign, logdet = np.linalg.slogdet(np.array(sylvester(self.p, self.q, 0j), dtype=complex))
        if sign == 0 or not math.isfinite(logdet):
            raise ValueError("resultant vanishes at t")
        return float(logdet) + 2 * self.d * self.log_scale


# ---------------------------------------------------------------------------


def pushforward(F: Lift, phi: BiForm) -> BiForm:
    """Exact ``F_* phi`` as a form of degree ``d * deg(phi)`` over Q(s)."""
    if not phi.is_exact:
        phi = BiForm.exact(phi.coeffs)
    sp = split_scalar(phi)
    core = _pushforward_primitive(F, sp.primitive)
    d = F.d
    k = sp.scalar ** (d * d)
    return core * k


def _inner_resultant(F: Lift, phi: BiForm) -> tuple[list[list[int]], SRat]:
    """Integer rows of ``R = Res_(U,V)(Y Pi - X Qi, phi)`` (``rx[i]`` multiplies ``X^i Y^(e-i)``)
    and the scalar ``1 / (Res(F)^e L^(de))`` with ``F_* phi = R^d`` times that scalar."""
    d = F.d
    e = phi.degree
    pi, qi, fscale, fden = F._integral
    phi_rows = [list(c.num.num) for c in _poly_coeffs(phi)]
    deg_f = max((len(p) - 1 for p in pi + qi if p), default=0)
    deg_phi = max((len(p) - 1 for p in phi_rows if p), default=0)
    s_bound = e * deg_f + d * deg_phi
    s_nodes = list(range(s_bound + 1))
    x_nodes = list(range(e + 1))
    # table[s][x] of resultant values
    by_power: list[list[int]] = [[] for _ in range(e + 1)]
    for s in s_nodes:
        ps = [_ieval(p, s) for p in pi]
        qs = [_ieval(q, s) for q in qi]
        fs = [_ieval(f, s) for f in phi_rows]
        vals = []
        for x in x_nodes:
            a = [pv - x * qv for pv, qv in zip(ps, qs)]
            vals.append(bareiss_det(sylvester(a, fs)))
        in_x = newton_interp(x_nodes, vals)
        for i in range(e + 1):
            c = in_x[i]
            if c.denominator != 1:
                raise ArithmeticError("non-integral interpolation in X")
            by_power[i].append(c.numerator)
    rx = []
    for i in range(e + 1):
        p = newton_interp(s_nodes, by_power[i])
        if p.den != 1:
            raise ArithmeticError("non-integral interpolation in s")
        rx.append(list(p.num))
    # F = (Pi, Qi) / L, so Res(Y P - X Q, phi) = L^-e * R
    lift_factor = SRat(fden) * fscale
    inv = ((F.res ** e) * lift_factor ** (d * e)).inverse()
    return rx, inv


def inner_form(F: Lift, phi: BiForm) -> tuple[BiForm, SRat]:
    """``(R, c)`` with ``F_* phi = c * R**d`` for a primitive integral ``phi``."""
    rx, inv = _inner_resultant(F, phi)
    e = len(rx) - 1
    return BiForm([SRat(SPoly(rx[e - idx])) for idx in range(e + 1)]), inv


def _pushforward_primitive(F: Lift, phi: BiForm) -> BiForm:
    d = F.d
    rx, inv = _inner_resultant(F, phi)
    e = len(rx) - 1
    # R(X, Y) = sum_i rx[i] X^i Y^(e-i); raise to the d-th power via Kronecker packing
    width = d * max((len(p) for p in rx), default=1) + 1
    packed = []
    for i, p in enumerate(rx):
        if p:
            need = i * width + len(p)
            if len(packed) < need:
                packed.extend([0] * (need - len(packed)))
            for j, c in enumerate(p):
                packed[i * width + j] += c
    power = packed
    for _ in range(d - 1):
        power = imul(power, packed)
    out_deg = d * e
    coeffs = []
    for idx in range(out_deg + 1):
        i = out_deg - idx  # power of X
        chunk = power[i * width:(i + 1) * width]
        coeffs.append(SRat(SPoly(chunk)) * inv if any(chunk) else SRat.coerce(0))
    return BiForm(coeffs)


def iterate_pushforward(F: Lift, phi: BiForm, k: int) -> list[BiForm]:
    out = [phi]
    for _ in range(k):
        out.append(pushforward(F, out[-1]))
    return out


def jacobian(F: Lift) -> BiForm:
    """``det DF = P_X Q_Y - P_Y Q_X`` as a form of degree ``2d - 2``."""
    parts = []
    for a, b in ((F.P.d_dx(), F.Q.d_dy()), (F.P.d_dy(), F.Q.d_dx())):
        parts.append(a * b if a is not None and b is not None else None)
    first, second = parts
    if first is None and second is None:
        raise ValueError("Jacobian vanishes identically")
    if second is None:
        return first
    if first is None:
        return -second
    coeffs = [a - b for a, b in zip(first.coeffs, second.coeffs)]
    return BiForm(coeffs)


def hom_height(F: Lift, t) -> float:
    """``-log|Res(F_t)| + 2 d log ||F_t||`` at the archimedean place."""
    if isinstance(t, (int, Fraction)):
        Pt, Qt = specialize(F.P, t), specialize(F.Q, t)
        r = res_binary(Pt, Qt)
        if r == 0:
            raise ValueError("resultant vanishes at t")
        norm = max(abs(c) for c in Pt.coeffs + Qt.coeffs)
        return -log_abs(r) + 2 * F.d * log_abs(norm)
    nl = NumericLift.of(F, t)
    return -nl.log_abs_res + 2 * F.d * nl.log_scale


# ---------------------------------------------------------------------------
# preimage tree


@dataclass
class PreimageTree:
    """Affine preimages of a point under iterates of a specialized lift.

    Level ``k`` stores ``d**(2k)`` points as ``exp(scales[k]) * (U, V)``.
    Children of node ``i`` at level ``k`` are ``i*d*d .. (i+1)*d*d - 1``.
    """

    lift: NumericLift
    levels: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    scales: list[float] = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def count(self, k: int) -> int:
        return len(self.levels[k][0])

    def parent_residual(self, k: int) -> float:
        """Max relative mismatch between ``F_t`` of level-``k`` points and their parents."""
        U, V = self.levels[k]
        pU, pV = self.levels[k - 1]
        d = self.lift.d
        P, Q = self.lift(U, V)
        # F_t(actual) = e^{log_scale + d*scales[k]} (P, Q); parent = e^{scales[k-1]} (pU, pV)
        shift = self.lift.log_scale + d * self.scales[k] - self.scales[k - 1]
        P, Q = P * math.exp(shift), Q * math.exp(shift)
        par_u = np.repeat(pU, d * d)
        par_v = np.repeat(pV, d * d)
        norm = np.maximum(np.abs(par_u), np.abs(par_v))
        err = np.maximum(np.abs(P - par_u), np.abs(Q - par_v)) / norm
        return float(err.max())

    def log_product(self, phi: BiForm, k: int) -> float:
        """``sum log|phi(Y)|`` over level ``k``; ``phi`` given with numeric coefficients."""
        coeffs = [c if isinstance(c, ScaledC) else ScaledC.of(complex(c)) if not isinstance(c, Fraction)
                  else ScaledC.from_rat(c) for c in phi.coeffs]
        top = max(c.log_abs() for c in coeffs)
        arr = np.array([_rescale(c, top) for c in coeffs])
        U, V = self.levels[k]
        e = phi.degree
        val = sum(arr[i] * U ** (e - i) * V ** i for i in range(e + 1))
        return float(np.sum(np.log(np.abs(val)))) + len(U) * (top + e * self.scales[k])


def _children(lift: NumericLift, x: np.ndarray, y: np.ndarray, path_base: int = 0):
    """Affine preimages of each ``(x, y)`` under the normalized lift (node-major order)."""
    d = lift.d
    p, q = lift.p, lift.q
    rows = y[:, None] * p[None, :] - x[:, None] * q[None, :]
    lead = np.abs(rows[:, 0])
    big = np.abs(rows).max(axis=1)
    drop = lead <= 1e-13 * big
    n = len(x)
    W = np.empty((n, d), dtype=complex)
    inf_mask = np.zeros((n, d), dtype=bool)
    good = ~drop
    if good.any():
        try:
            W[good] = aberth(rows[good])
        except RootFindingError as exc:
            nodes = np.flatnonzero(good)[exc.rows]
            raise RootFindingError(
                f"preimage root finder failed at nodes {(nodes + path_base)[:10].tolist()}", nodes) from exc
    for i in np.flatnonzero(drop):
        r = rows[i].copy()
        r[0] = 0
        nz = np.flatnonzero(np.abs(r) > 1e-13 * big[i])
        first = nz[0] if len(nz) else d
        finite = np.roots(r[first:]) if first < d else np.array([], dtype=complex)
        W[i, :len(finite)] = finite
        W[i, len(finite):] = 0
        inf_mask[i, len(finite):] = True
    # affine representative (w, 1) or (1, 0) for the root at infinity
    A = np.where(inf_mask, 1.0 + 0j, W)
    B = np.where(inf_mask, 0j, 1.0 + 0j)
    P, Q = lift(A, B)
    X = np.broadcast_to(x[:, None], P.shape)
    Yv = np.broadcast_to(y[:, None], Q.shape)
    use_q = np.abs(Q) >= np.abs(P)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(use_q, Yv / Q, X / P)
    lam = mu ** (1.0 / d)
    zeta = np.exp(2j * np.pi * np.arange(d) / d)
    lam_all = lam[:, :, None] * zeta[None, None, :]
    U = (lam_all * A[:, :, None]).reshape(-1)
    V = (lam_all * B[:, :, None]).reshape(-1)
    return U, V


def preimage_tree(F: Lift | NumericLift, t, x0: tuple, depth: int, budget: int = 4_200_000) -> PreimageTree:
    """All affine solutions of ``F_t^k(Y) = x0`` for ``k <= depth``."""
    lift = F if isinstance(F, NumericLift) else NumericLift.of(F, t)
    d = lift.d
    if d ** (2 * depth) > budget:
        raise ValueError(f"tree with {d ** (2 * depth)} leaves exceeds the budget")
    _ = lift.log_abs_res
    x0 = np.array([complex(x0[0])]), np.array([complex(x0[1])])
    top = math.log(max(abs(x0[0][0]), abs(x0[1][0])))
    tree = PreimageTree(lift)
    tree.levels.append((x0[0] / math.exp(top), x0[1] / math.exp(top)))
    tree.scales.append(top)
    for _k in range(depth):
        U, V = _children(lift, *tree.levels[-1])
        tree.levels.append((U, V))
        tree.scales.append((tree.scales[-1] - lift.log_scale) / d)
    return tree
