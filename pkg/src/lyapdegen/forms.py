"""Binary forms ``sum_i c_i X^(e-i) Y^i`` over exact or numeric coefficient rings."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Sequence

from .scalars import (
    NEG_INF,
    Place,
    SPoly,
    SRat,
    as_rat,
    gcd_many,
    hplus_of_coeffs,
    lcm_poly,
    log_norm,
)


@dataclass(frozen=True)
class ScaledC:
    """Complex number ``mantissa * 2**exponent`` with ``|mantissa|`` in [1/2, 1) or zero."""

    mantissa: complex
    exponent: int = 0

    @classmethod
    def of(cls, z, exponent: int = 0) -> "ScaledC":
        z = complex(z)
        if z == 0:
            return cls(0j, 0)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise OverflowError("non-finite value")
        _, e = math.frexp(abs(z))
        return cls(complex(math.ldexp(z.real, -e), math.ldexp(z.imag, -e)), exponent + e)

    @classmethod
    def from_rat(cls, x) -> "ScaledC":
        x = as_rat(x)
        if x == 0:
            return cls(0j, 0)
        shift = x.numerator.bit_length() - x.denominator.bit_length()
        # scale into float range before converting
        scaled = x / (Fraction(2) ** shift)
        return cls.of(float(scaled), shift)

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def __mul__(self, other):
        if not isinstance(other, ScaledC):
            other = ScaledC.of(other)
        return ScaledC.of(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledC):
            other = ScaledC.of(other)
        if other.is_zero():
            raise ZeroDivisionError("ScaledC division by zero")
        return ScaledC.of(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __add__(self, other):
        if not isinstance(other, ScaledC):
            other = ScaledC.of(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        e = max(self.exponent, other.exponent)
        # terms more than ~1100 binary orders below vanish in double precision anyway
        a = math.ldexp(1.0, max(self.exponent - e, -1100))
        b = math.ldexp(1.0, max(other.exponent - e, -1100))
        return ScaledC.of(self.mantissa * a + other.mantissa * b, e)

    __radd__ = __add__

    def __neg__(self):
        return ScaledC(-self.mantissa, self.exponent)

    def __sub__(self, other):
        if not isinstance(other, ScaledC):
            other = ScaledC.of(other)
        return self + (-other)

    def __pow__(self, k: int):
        out = ScaledC.of(1)
        base = self
        k_ = abs(k)
        while k_:
            if k_ & 1:
                out = out * base
            k_ >>= 1
            if k_:
                base = base * base
        return ScaledC.of(1) / out if k < 0 else out

    def log_abs(self) -> float:
        if self.is_zero():
            return NEG_INF
        return math.log(abs(self.mantissa)) + self.exponent * math.log(2)

    def arg(self) -> float:
        return cmath.phase(self.mantissa)

    def to_complex(self) -> complex:
        if self.is_zero():
            return 0j
        return complex(math.ldexp(self.mantissa.real, self.exponent),
                       math.ldexp(self.mantissa.imag, self.exponent))

    def __abs__(self) -> float:
        return abs(self.to_complex())


def eval_scaled(p: SPoly | SRat, t: ScaledC) -> ScaledC:
    """Evaluate a polynomial or rational function at a ScaledC point (Horner)."""
    if isinstance(p, SRat):
        den = eval_scaled(p.den, t)
        if den.is_zero():
            raise ZeroDivisionError("pole of family at t")
        return eval_scaled(p.num, t) / den
    acc = ScaledC.of(0)
    for c in reversed(p.coeffs):
        acc = acc * t + ScaledC.from_rat(c)
    return acc


# ---------------------------------------------------------------------------


class BiForm:
    """Homogeneous binary form; ``coeffs[i]`` multiplies ``X**(e-i) * Y**i``.

    The coefficient ring is whatever the entries are: :class:`SRat` for exact
    forms over Q(s), :class:`~fractions.Fraction` after rational
    specialization, :class:`ScaledC` or ``complex`` numerically.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a form needs at least one coefficient")
        if all(_is_zero(c) for c in coeffs):
            raise ValueError("zero form")
        self.coeffs = coeffs

    @classmethod
    def exact(cls, coeffs: Sequence) -> "BiForm":
        return cls([SRat.coerce(c) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def map(self, fn: Callable) -> "BiForm":
        return BiForm([fn(c) for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, BiForm):
            return self.map(lambda c: c * other)
        out = [None] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if _is_zero(b):
                    continue
                out[i + j] = a * b if out[i + j] is None else out[i + j] + a * b
        zero = _zero_like(self.coeffs[0])
        return BiForm([zero if c is None else c for c in out])

    def __rmul__(self, other):
        return self.map(lambda c: other * c)

    def __add__(self, other: "BiForm") -> "BiForm":
        if self.degree != other.degree:
            raise ValueError("adding forms of different degree")
        return BiForm([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return self.map(lambda c: -c)

    def __sub__(self, other: "BiForm") -> "BiForm":
        return self + (-other)

    def __pow__(self, k: int) -> "BiForm":
        if k < 1:
            raise ValueError("forms are raised to positive powers only")
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, BiForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x, y):
        e = self.degree
        total = None
        for i, c in enumerate(self.coeffs):
            term = c * (x ** (e - i)) * (y ** i)
            total = term if total is None else total + term
        return total

    def d_dx(self) -> "BiForm | None":
        e = self.degree
        cs = [(e - i) * c for i, c in enumerate(self.coeffs[:-1])]
        return BiForm(cs) if cs and not all(_is_zero(c) for c in cs) else None

    def d_dy(self) -> "BiForm | None":
        cs = [i * c for i, c in enumerate(self.coeffs)][1:]
        return BiForm(cs) if cs and not all(_is_zero(c) for c in cs) else None

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, SRat) for c in self.coeffs)

    def is_polynomial(self) -> bool:
        return all(c.is_poly() for c in self.coeffs)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [SRat.coerce(c).to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "BiForm":
        coeffs = [SRat.from_json(c) for c in data["coeffs"]]
        if "degree" in data and data["degree"] != len(coeffs) - 1:
            raise ValueError("form degree does not match the coefficient count")
        return cls(coeffs)

    def __repr__(self):
        return f"BiForm({self})"

    def __str__(self):
        e = self.degree
        parts = []
        for i, c in enumerate(self.coeffs):
            if _is_zero(c):
                continue
            mono = "*".join(m for m in (_pw("X", e - i), _pw("Y", i)) if m)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


def _pw(v: str, k: int) -> str:
    return "" if k == 0 else (v if k == 1 else f"{v}^{k}")


def _is_zero(c) -> bool:
    if isinstance(c, (SRat, SPoly, ScaledC)):
        return c.is_zero()
    return c == 0


def _zero_like(c):
    if isinstance(c, SRat):
        return SRat.coerce(0)
    if isinstance(c, ScaledC):
        return ScaledC.of(0)
    if isinstance(c, Fraction):
        return Fraction(0)
    return 0 * c


def rat_form(coeffs: Sequence) -> BiForm:
    """Form with constant rational coefficients, written in the exact ring."""
    return BiForm.exact([as_rat(c) for c in coeffs])


# ---------------------------------------------------------------------------


def specialize(phi: BiForm, t) -> BiForm:
    """Coefficientwise evaluation at ``s = t``.

    Rational ``t`` gives exact Fraction coefficients; complex ``t`` (or a
    :class:`ScaledC`) gives ScaledC coefficients.
    """
    if isinstance(t, (int, Fraction)):
        out = []
        for c in phi.coeffs:
            c = SRat.coerce(c)
            if c.den(t) == 0:
                raise ZeroDivisionError(f"pole of family at t = {t}")
            out.append(c(as_rat(t)))
        if all(c == 0 for c in out):
            _zero_error(t)
        return BiForm(out)
    ts = t if isinstance(t, ScaledC) else ScaledC.of(t)
    out = []
    for c in phi.coeffs:
        c = SRat.coerce(c)
        out.append(eval_scaled(c, ts))
    if all(c.is_zero() for c in out):
        _zero_error(t)
    return BiForm(out)


def _zero_error(t):
    raise ValueError(f"form vanishes identically at t = {t}")


@dataclass(frozen=True)
class Sizes:
    deg_X: int
    deg_s: int
    log_norm_arch: float
    hplus: float
    theta: float


def deg_s(phi: BiForm):
    """Largest ``s = infinity`` valuation among the nonzero coefficients."""
    return max(SRat.coerce(c).deg_value for c in phi.coeffs if not _is_zero(c))


def coeff_log_norm(phi: BiForm, v: Place):
    """Max over coefficients of the log norm at ``v`` (zero coefficients skipped)."""
    return max(log_norm(SRat.coerce(c), v) for c in phi.coeffs if not _is_zero(c))


def all_rationals(phi: BiForm) -> list[Fraction]:
    """Every rational coefficient of a polynomial form, as a polynomial in X, Y, s."""
    out = []
    for c in phi.coeffs:
        c = SRat.coerce(c)
        if not c.is_poly():
            raise ValueError("form has non-polynomial coefficients")
        out.extend(x for x in (c.num * (1 / c.den.lc)).coeffs if x)
    return out or [Fraction(0)]


def hplus_form(phi: BiForm) -> float:
    return hplus_of_coeffs(all_rationals(phi))


def size_functionals(phi: BiForm) -> Sizes:
    """``deg_X``, ``deg_s``, ``log ||phi||``, ``h+`` and ``theta = max(1, h+ + deg_s + deg_X)``."""
    if not phi.is_polynomial():
        raise ValueError("theta needs polynomial coefficients")
    ds = deg_s(phi)
    coeffs = all_rationals(phi)
    lg = max(math.log(abs(c.numerator)) - math.log(c.denominator) for c in coeffs if c) \
        if any(coeffs) else NEG_INF
    hp = hplus_of_coeffs(coeffs)
    return Sizes(phi.degree, ds, lg, hp, max(1.0, hp + ds + phi.degree))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarSplit:
    """``phi = c * (alpha_num / alpha_den) * primitive`` with monic alphas."""

    c: Fraction
    alpha_num: SPoly
    alpha_den: SPoly
    primitive: BiForm

    @property
    def alpha(self) -> SRat:
        return SRat(self.alpha_num, self.alpha_den, reduced=True)

    @property
    def scalar(self) -> SRat:
        return self.alpha * self.c


def split_scalar(phi: BiForm) -> ScalarSplit:
    """Pull the full Q(s) content out of an exact form.

    The primitive part has integer polynomial coefficients with no common
    polynomial factor and integer content 1; its first nonzero coefficient
    has positive leading term.
    """
    cs = [SRat.coerce(c) for c in phi.coeffs]
    nz = [c for c in cs if not c.is_zero()]
    den = reduce(lcm_poly, (c.den for c in nz), SPoly.const(1))
    polys = [(c.num * den.exquo(c.den)) if not c.is_zero() else SPoly() for c in cs]
    alpha = gcd_many(polys)
    polys = [p.exquo(alpha) if not p.is_zero() else p for p in polys]
    lcm_d = reduce(lambda a, b: a * b // math.gcd(a, b), (p.den for p in polys if not p.is_zero()), 1)
    ints = [p * lcm_d for p in polys]
    g = reduce(math.gcd, (x for p in ints for x in p.num), 0)
    first = next(p for p in ints if not p.is_zero())
    sign = 1 if first.num[-1] > 0 else -1
    prim = [SRat(SPoly([sign * x // g for x in p.num]), reduced=True) for p in ints]
    c = Fraction(sign * g, lcm_d)
    return ScalarSplit(c, alpha, den, BiForm(prim))


def content_split(phi: BiForm) -> tuple[SPoly, BiForm, Fraction]:
    """``(alpha, primitive, c)`` with ``phi = c * alpha * primitive`` for polynomial forms."""
    if not phi.is_polynomial():
        raise ValueError("content_split needs polynomial coefficients; use split_scalar")
    sp = split_scalar(phi)
    return sp.alpha_num, sp.primitive, sp.c
