"""Escape rates ``G_F(Phi) = lim log||F_*^k Phi|| / d**(2k)`` at several places.

* ``escape_inf`` / ``escape_beta``: exact iteration over Q(s), valuations at
  ``s = infinity`` or at an irreducible ``m(s)``.
* ``escape_complex``: numeric iteration on a specialized fibre.  The iterate is
  stored as its divisor ``C * prod l_i**M_i`` (points of P^1 plus multiplicities)
  and pushed forward pointwise, so nothing is ever expanded in floating point
  except for the final coefficient norm, which is read off by an FFT.
* ``escape_tree``: the preimage-product oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .forms import BiForm, ScaledC, coeff_log_norm, specialize, split_scalar
from .pushforward import Lift, NumericLift, inner_form, jacobian, preimage_tree
from .scalars import Place, SPoly, SRat, hplus_of_coeffs, lcm_poly, log_norm, radical

N = 1
M = 3 * N + 3
EPS_N = Fraction(1, M + 1)


@dataclass
class EscapeEstimate:
    value: float | Fraction
    partials: list
    depth: int
    err_indicator: float
    place: object
    exact: bool = False

    def to_json(self) -> dict:
        def enc(x):
            return str(x) if isinstance(x, Fraction) else float(x)
        place = self.place
        if isinstance(place, complex):
            place = {"t": [place.real, place.imag]}
        else:
            place = str(place)
        return {
            "value": float(self.value),
            "value_exact": str(self.value) if isinstance(self.value, Fraction) else None,
            "partials": [enc(g) for g in self.partials],
            "depth": self.depth,
            "err_indicator": float(self.err_indicator),
            "place": place,
            "exact": self.exact,
        }


def extrapolate(partials: Sequence, d: int) -> tuple:
    """Geometric-tail extrapolation; returns ``(value, err_indicator, exact)``.

    With ``g_{k+1} - g_k = O(d**-k)`` the limit is ``g_k + (g_k - g_{k-1}) / (d - 1)``.
    Exact rational partials whose last three extrapolants agree on a rational
    with denominator at most ``d**4`` are reported as that rational.
    """
    g = list(partials)
    if len(g) < 2:
        return g[-1], math.inf, False
    ext = [g[k] + (g[k] - g[k - 1]) / (d - 1) for k in range(1, len(g))]
    err = 3 * abs(g[-1] - g[-2]) / (d - 1)
    if all(isinstance(x, Fraction) for x in g) and len(ext) >= 3:
        a, b, c = ext[-3:]
        if a == b == c and c.denominator <= d ** 4:
            return c, float(err), True
    val = ext[-1]
    return (val if isinstance(val, Fraction) else float(val)), float(err), False


# ---------------------------------------------------------------------------
# exact orbits


def _to_sympy(form: BiForm):
    import sympy

    X, Y, S = sympy.symbols("X Y s")
    e = form.degree
    terms = {}
    for i, c in enumerate(form.coeffs):
        c = SRat.coerce(c)
        for j, cj in enumerate(c.num.num):
            if cj:
                terms[(e - i, i, j)] = cj
    return sympy.Poly.from_dict(terms, X, Y, S, domain="ZZ")


def _from_sympy(poly) -> BiForm:
    terms = poly.as_dict()
    e = sum(next(iter(terms))[:2])
    rows: list[dict[int, int]] = [dict() for _ in range(e + 1)]
    for (ix, iy, js), c in terms.items():
        rows[iy][js] = int(c)
    coeffs = []
    for r in rows:
        top = max(r, default=-1)
        coeffs.append(SRat(SPoly([r.get(j, 0) for j in range(top + 1)]), reduced=True))
    return BiForm(coeffs)


def squarefree_parts(form: BiForm) -> tuple[int, list[tuple[BiForm, int]]]:
    """``form = c * prod f_i**m_i`` with squarefree, pairwise coprime integer forms."""
    if form.degree == 0:
        return form.coeffs[0], []
    c, parts = _to_sympy(form).sqf_list()
    return int(c), [(_from_sympy(f), m) for f, m in parts]


@dataclass
class ExactOrbit:
    """Exact orbit ``F_*^k phi`` kept as ``prod_j kappa_j**e_j * prod_i psi_i**m_i``.

    The ``psi_i`` are primitive squarefree forms, pushed forward one at a time;
    valuations at ``s``-adic places and at ``s = infinity`` are multiplicative,
    so they never need the expanded iterate.
    """

    lift: Lift
    scalars: list[list[tuple[SRat, int]]] = field(default_factory=list)
    factors: list[dict] = field(default_factory=list)
    contents: list[list[SRat]] = field(default_factory=list)
    _cache: dict = field(default_factory=dict)

    @classmethod
    def start(cls, F: Lift, phi: BiForm) -> "ExactOrbit":
        if not phi.is_exact:
            phi = BiForm.exact(phi.coeffs)
        sp = split_scalar(phi)
        orbit = cls(F)
        kappa, facs = orbit._normalize(sp.primitive)
        scal = sp.scalar * kappa
        orbit.scalars.append([(scal, 1)])
        orbit.factors.append(facs)
        orbit.contents.append([scal])
        return orbit

    @staticmethod
    def _normalize(prim: BiForm) -> tuple[SRat, dict]:
        c, parts = squarefree_parts(prim)
        kappa = SRat.coerce(c)
        facs: dict = {}
        for f, m in parts:
            sp = split_scalar(f)
            kappa = kappa * sp.scalar ** m
            facs[sp.primitive] = facs.get(sp.primitive, 0) + m
        return kappa, facs

    @property
    def depth(self) -> int:
        return len(self.factors) - 1

    def _push_factor(self, psi: BiForm):
        if psi not in self._cache:
            # F_* psi = c R^d: factor R, not its d-th power
            R, c = inner_form(self.lift, psi)
            sp = split_scalar(R)
            kappa, facs = self._normalize(sp.primitive)
            d = self.lift.d
            self._cache[psi] = (c * (sp.scalar * kappa) ** d, {f: m * d for f, m in facs.items()})
        return self._cache[psi]

    def extend(self, k: int) -> "ExactOrbit":
        d2 = self.lift.d ** 2
        while self.depth < k:
            scal = [(c, e * d2) for c, e in self.scalars[-1]]
            facs: dict = {}
            new = []
            for psi, m in self.factors[-1].items():
                kappa, image = self._push_factor(psi)
                scal.append((kappa, m))
                new.append(kappa)
                for f, e in image.items():
                    facs[f] = facs.get(f, 0) + e * m
            self.scalars.append(scal)
            self.factors.append(facs)
            self.contents.append(new)
        return self

    def valuation(self, k: int, place: Place):
        """Exact ``log||F_*^k phi||_v`` for a valuation place ``v``."""
        total = sum(e * log_norm(c, place) for c, e in self.scalars[k])
        return total + sum(m * coeff_log_norm(f, place) for f, m in self.factors[k].items())

    def scalar(self, k: int) -> SRat:
        out = SRat.coerce(1)
        for c, e in self.scalars[k]:
            out = out * c ** e
        return out

    def iterate(self, k: int) -> BiForm:
        """The expanded ``F_*^k phi``."""
        out = None
        for f, m in self.factors[k].items():
            p = f ** m
            out = p if out is None else out * p
        sc = self.scalar(k)
        return BiForm([sc]) if out is None else out * sc


def _exact_escape(F: Lift, phi: BiForm, place: Place, k_max: int, orbit: ExactOrbit | None = None):
    if k_max < 0:
        raise ValueError("depth must be nonnegative")
    orbit = orbit or ExactOrbit.start(F, phi)
    orbit.extend(k_max)
    d2 = F.d ** 2
    partials = [Fraction(orbit.valuation(k, place), d2 ** k) for k in range(k_max + 1)]
    value, err, exact = extrapolate(partials, F.d)
    return EscapeEstimate(value, partials, k_max, err, place, exact), orbit


def escape_inf(F: Lift, phi: BiForm, k_max: int = 6) -> EscapeEstimate:
    """Function-field escape rate at ``s = infinity`` (degree growth)."""
    return _exact_escape(F, phi, Place.s_inf(), k_max)[0]


@dataclass
class ContentLedger:
    """Per-depth content radicals of the exact orbit and the root set from depths 1..2."""

    alphas: list[SPoly]
    observed: SPoly

    @classmethod
    def of(cls, orbit: ExactOrbit) -> "ContentLedger":
        alphas = []
        for kappas in orbit.contents:
            prod = SPoly.const(1)
            for kappa in kappas:
                prod = prod * kappa.num * kappa.den
            alphas.append(radical(prod) if not prod.is_const() else SPoly.const(1))
        base = SPoly.const(1)
        for a in alphas[1:3]:
            base = lcm_poly(base, a)
        return cls(alphas, radical(base) if not base.is_const() else base)

    def violations(self) -> list[int]:
        """Depths ``k >= 1`` whose content has a root outside the observed set."""
        bad = []
        for k, a in enumerate(self.alphas):
            if k >= 1 and not a.is_const() and not (self.observed % a).is_zero():
                bad.append(k)
        return bad

    def ok(self) -> bool:
        return not self.violations()


def escape_beta(F: Lift, phi: BiForm, m: SPoly, k_max: int = 6) -> tuple[EscapeEstimate, ContentLedger]:
    """Escape rate at the s-adic place of the irreducible ``m``, with the content ledger."""
    est, orbit = _exact_escape(F, phi, Place.s_adic(m), k_max)
    return est, ContentLedger.of(orbit)


@dataclass
class Growth:
    deg: list[int]
    hplus: list[float]
    C1: float
    C2: float


def _hplus_srat_form(form: BiForm) -> float:
    """h+ of ``N(X, Y, s) / D(s)`` written over the monic common denominator."""
    cs = [SRat.coerce(c) for c in form.coeffs]
    den = SPoly.const(1)
    for c in cs:
        if not c.is_zero():
            den = lcm_poly(den, c.den)
    rats = []
    for c in cs:
        if not c.is_zero():
            rats.extend(x for x in (c.num * den.exquo(c.den)).coeffs if x)
    rats.extend(x for x in den.coeffs if x)
    return hplus_of_coeffs(rats)


def growth(F: Lift, phi: BiForm, k_max: int, orbit: ExactOrbit | None = None) -> Growth:
    """Measured ``deg_s`` and ``h+`` of the unreduced iterates with constants
    ``C1 = max deg/d**(2k)`` and ``C2 = max h+/d**(3k)`` over ``k >= 1``."""
    orbit = orbit or ExactOrbit.start(F, phi)
    orbit.extend(k_max)
    inf = Place.s_inf()
    degs = [orbit.valuation(k, inf) for k in range(k_max + 1)]
    hps = [_hplus_srat_form(orbit.iterate(k)) for k in range(k_max + 1)]
    d2 = F.d ** 2
    c1 = max(max(degs[k], 0) / d2 ** k for k in range(1, k_max + 1))
    c2 = max(hps[k] / d2 ** (1.5 * k) for k in range(1, k_max + 1))
    return Growth(degs, hps, c1, c2)


# ---------------------------------------------------------------------------
# complex fibres


def _as_complex_t(t):
    if isinstance(t, ScaledC):
        return t
    return complex(t)


def _roots_of(form_t: BiForm) -> tuple[np.ndarray, np.ndarray]:
    """Normalized projective roots ``(a, b)`` with ``max(|a|, |b|) = 1``."""
    cs = [c if isinstance(c, ScaledC) else ScaledC.of(c) for c in form_t.coeffs]
    top = max(c.log_abs() for c in cs)
    arr = np.array([0j if c.is_zero() else np.exp(c.log_abs() - top + 1j * c.arg()) for c in cs])
    e = len(arr) - 1
    nz = np.flatnonzero(arr)
    lead = nz[0]
    trail = nz[-1]
    # leading zeros: roots at (1:0); trailing zeros: roots at (0:1)
    inner = arr[lead:trail + 1]
    roots = np.roots(inner) if len(inner) > 1 else np.array([], dtype=complex)
    a = np.concatenate([np.ones(lead, complex), roots, np.zeros(e - trail, complex)])
    b = np.concatenate([np.zeros(lead, complex), np.ones(len(roots), complex), np.ones(e - trail, complex)])
    scale = np.maximum(np.abs(a), np.abs(b))
    return a / scale, b / scale


def log_norm_divisor(a: np.ndarray, b: np.ndarray, mult: np.ndarray) -> float:
    """``log ||prod (b_i X - a_i Y)**mult_i||`` (max coefficient) via roots-of-unity values."""
    e = int(mult.sum())
    if e == 0:
        return 0.0
    n = 1 << max(3, e.bit_length())
    # nodes offset by half a step so that roots at +-1 are never hit exactly
    w = np.exp(2j * np.pi * (np.arange(n) + 0.5) / n)
    lin = b[None, :] * w[:, None] - a[None, :]
    with np.errstate(divide="ignore"):
        logmag = (np.log(np.abs(lin)) * mult[None, :]).sum(axis=1)
    phase = (np.angle(lin) * mult[None, :]).sum(axis=1)
    top = np.max(logmag[np.isfinite(logmag)])
    vals = np.where(np.isfinite(logmag), np.exp(logmag - top), 0) * np.exp(1j * phase)
    # the offset only rotates coefficient phases; |coefficient of X^j| is |DFT_j| / n
    mags = np.abs(np.fft.fft(vals))[: e + 1] / n
    return float(np.log(mags.max()) + top)


def escape_complex(F: Lift, phi: BiForm, t, k_max: int = 8) -> EscapeEstimate:
    """Escape rate of ``phi`` on the fibre over ``s = t`` (archimedean place)."""
    if k_max < 0:
        raise ValueError("depth must be nonnegative")
    t = _as_complex_t(t)
    nl = NumericLift.of(F, t)
    log_res = nl.log_abs_res
    phi_t = specialize(phi, t)
    a, b = _roots_of(phi_t)
    mult = np.ones(len(a))
    cs = [c if isinstance(c, ScaledC) else ScaledC.of(c) for c in phi_t.coeffs]
    log_c = max(c.log_abs() for c in cs) - log_norm_divisor(a, b, mult)
    d = nl.d
    partials = []
    for k in range(k_max + 1):
        partials.append((log_c + log_norm_divisor(a, b, mult)) / d ** (2 * k))
        if k == k_max:
            break
        P, Q = nl(a, b)
        rho = np.maximum(np.abs(P), np.abs(Q))
        log_rho = np.log(rho) + nl.log_scale
        log_c = d * d * log_c + float(np.sum(mult * (d * log_rho - log_res)))
        a, b = P / rho, Q / rho
        mult = mult * d
    value, err, _ = extrapolate(partials, d)
    return EscapeEstimate(float(value), partials, k_max, err, t if isinstance(t, complex) else t.to_complex())


def escape_tree(F: Lift, phi: BiForm, t, depth: int, x0=(0.6 + 0.3j, 1.0)) -> EscapeEstimate:
    """Oracle: ``d**(-2k) log|F_*^k phi (x0)|`` as a product over the preimage tree."""
    t = _as_complex_t(t)
    tree = preimage_tree(F, t, x0, depth)
    phi_t = specialize(phi, t)
    d = F.d
    partials = [tree.log_product(phi_t, k) / d ** (2 * k) for k in range(depth + 1)]
    value, err, _ = extrapolate(partials, d)
    return EscapeEstimate(float(value), partials, depth, err, complex(t) if not isinstance(t, ScaledC) else t.to_complex())


# ---------------------------------------------------------------------------


def log_plus_abs(t) -> float:
    if isinstance(t, ScaledC):
        return max(0.0, t.log_abs())
    if isinstance(t, Fraction):
        if t == 0:
            return 0.0
        return max(0.0, math.log(abs(t.numerator)) - math.log(t.denominator))
    z = abs(complex(t))
    return math.log(z) if z > 1 else 0.0


def choose_depth(t, d: int, n: int = N) -> int:
    """Largest ``k`` with ``d**(k(M+1)) <= log+|t|`` (``M = 3n + 3``), else 0."""
    step = 3 * n + 4
    lp = log_plus_abs(t)
    k = 0
    while d ** ((k + 1) * step) <= lp:
        k += 1
    return k


def lyapunov(F: Lift, t, k_max: int | None = None) -> EscapeEstimate:
    """``G_F(J)`` for ``J = det DF``: ``t = "inf"`` or a Place gives the exact side,
    a number gives the fibre over ``s = t``."""
    J = jacobian(F)
    if isinstance(t, str):
        t = parse_place(t)
    if isinstance(t, Place):
        if t.kind == Place.S_INF:
            return escape_inf(F, J, 6 if k_max is None else k_max)
        if t.kind == Place.S_ADIC:
            return escape_beta(F, J, t.m, 6 if k_max is None else k_max)[0]
        raise ValueError(f"no escape rate implemented at place {t}")
    return escape_complex(F, J, t, 8 if k_max is None else k_max)


def parse_place(text: str):
    """``inf``, ``beta:<poly json or expression>``, ``t:<re>,<im>``."""
    text = text.strip()
    if text == "inf":
        return Place.s_inf()
    if text.startswith("beta:"):
        return Place.s_adic(_parse_spoly(text[5:]))
    if text.startswith("t:"):
        parts = text[2:].split(",")
        re_ = float(parts[0])
        im = float(parts[1]) if len(parts) > 1 else 0.0
        return complex(re_, im)
    raise ValueError(f"unrecognized place {text!r}")


def _parse_spoly(text: str) -> SPoly:
    import json

    text = text.strip()
    if text.startswith("["):
        return SPoly.from_json(json.loads(text))
    import sympy

    s = sympy.Symbol("s")
    poly = sympy.Poly(sympy.sympify(text, locals={"s": s}), s)
    return SPoly([Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())])
