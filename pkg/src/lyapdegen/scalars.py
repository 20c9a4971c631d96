"""Exact rationals, polynomials and rational functions in the parameter ``s``,
together with the absolute values and heights used throughout the package.

Rationals are :class:`fractions.Fraction`.  A :class:`SPoly` stores an integer
numerator vector and one positive integer denominator, which keeps products
and sums in integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_inner_gcd

Rat = Fraction
NEG_INF = float("-inf")

Number = Union[int, Fraction]


def as_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact rational")


# ---------------------------------------------------------------------------
# integer polynomial kernels (ascending coefficient order)


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _kron_pack(a: Sequence[int], width: int) -> int:
    pos = b"".join(max(c, 0).to_bytes(width, "little") for c in a)
    neg = b"".join(max(-c, 0).to_bytes(width, "little") for c in a)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kron_unpack(v: int, width: int, n: int) -> list[int]:
    half = 1 << (8 * width - 1)
    offset = int.from_bytes(half.to_bytes(width, "little") * n, "little")
    raw = (v + offset).to_bytes(width * n, "little")
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little") - half for i in range(n)]


def imul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two integer polynomials (Kronecker substitution when large)."""
    if not a or not b:
        return []
    if len(a) * len(b) <= 1024:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return _trim(out)
    bits = (max(abs(c) for c in a).bit_length() + max(abs(c) for c in b).bit_length()
            + min(len(a), len(b)).bit_length() + 2)
    width = bits // 8 + 1
    n = len(a) + len(b) - 1
    prod = _kron_pack(a, width) * _kron_pack(b, width)
    return _trim(_kron_unpack(prod, width, n))


def _icontent(a: Iterable[int]) -> int:
    return reduce(math.gcd, a, 0)


def _igcd_poly(a: list[int], b: list[int]) -> tuple[list[int], list[int], list[int]]:
    """gcd with cofactors of integer polynomials, descending order inside sympy."""
    h, ca, cb = dup_inner_gcd([ZZ(c) for c in reversed(a)], [ZZ(c) for c in reversed(b)], ZZ)
    conv = lambda p: [int(c) for c in reversed(p)]
    return conv(h), conv(ca), conv(cb)


# ---------------------------------------------------------------------------


class SPoly:
    """Univariate polynomial in ``s`` over Q, immutable.

    Stored as ``num / den`` with ``num`` an integer coefficient tuple in
    ascending powers, ``den >= 1`` and ``gcd(content(num), den) == 1``.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, coeffs: Iterable = (), den: int = 1):
        coeffs = list(coeffs)
        if any(not isinstance(c, int) for c in coeffs):
            fr = [as_rat(c) for c in coeffs]
            lcm = reduce(lambda x, y: x * y // math.gcd(x, y), (c.denominator for c in fr), 1)
            coeffs = [int(c * lcm) for c in fr]
            den *= lcm
        if den <= 0:
            raise ValueError("denominator must be positive")
        coeffs = _trim(coeffs)
        g = math.gcd(_icontent(coeffs), den)
        if g > 1:
            coeffs = [c // g for c in coeffs]
            den //= g
        if not coeffs:
            den = 1
        self.num: tuple[int, ...] = tuple(coeffs)
        self.den: int = den
        self._hash = None

    # construction helpers
    @classmethod
    def _raw(cls, num: tuple, den: int) -> "SPoly":
        obj = object.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    @classmethod
    def const(cls, c) -> "SPoly":
        c = as_rat(c)
        return cls([c.numerator], c.denominator)

    @classmethod
    def s(cls) -> "SPoly":
        return cls([0, 1])

    @classmethod
    def monomial(cls, k: int, c=1) -> "SPoly":
        c = as_rat(c)
        return cls([0] * k + [c.numerator], c.denominator)

    @classmethod
    def coerce(cls, x) -> "SPoly":
        if isinstance(x, SPoly):
            return x
        return cls.const(x)

    # basic properties
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def degree(self):
        return len(self.num) - 1 if self.num else NEG_INF

    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return len(self.num) <= 1

    @property
    def lc(self) -> Fraction:
        if not self.num:
            return Fraction(0)
        return Fraction(self.num[-1], self.den)

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.num):
            return Fraction(self.num[i], self.den)
        return Fraction(0)

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, SPoly):
            if isinstance(other, (int, Fraction)):
                other = SPoly.const(other)
            else:
                return NotImplemented
        a, b = self.num, other.num
        n = max(len(a), len(b))
        out = [(a[i] * other.den if i < len(a) else 0) + (b[i] * self.den if i < len(b) else 0)
               for i in range(n)]
        return SPoly(out, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return SPoly._raw(tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        if not isinstance(other, (SPoly, int, Fraction)):
            return NotImplemented
        return self + (-SPoly.coerce(other))

    def __rsub__(self, other):
        return SPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = as_rat(other)
            return SPoly([c * other.numerator for c in self.num], self.den * other.denominator)
        if not isinstance(other, SPoly):
            return NotImplemented
        return SPoly(imul(self.num, other.num), self.den * other.den)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result, base = SPoly.const(1), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __divmod__(self, other: "SPoly"):
        other = SPoly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.lc
        oc = other.coeffs
        if self.degree < dq:
            return SPoly(), self
        quo = [Fraction(0)] * (len(rem) - dq)
        for i in range(len(rem) - 1, dq - 1, -1):
            q = rem[i] / lc
            if q:
                quo[i - dq] = q
                for j in range(dq + 1):
                    rem[i - dq + j] -= q * oc[j]
        return SPoly(quo), SPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exquo(self, other: "SPoly") -> "SPoly":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return q

    def divides(self, other: "SPoly") -> bool:
        return divmod(other, self)[1].is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SPoly.const(other)
        if not isinstance(other, SPoly):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __call__(self, x):
        """Evaluate at ``x``; exact for int/Fraction, floating otherwise."""
        if isinstance(x, (int, Fraction)):
            if not self.num:
                return Fraction(0)
            x = as_rat(x)
            p, q = x.numerator, x.denominator
            # homogeneous Horner keeps everything integral
            acc, qpow = self.num[-1], 1
            for c in reversed(self.num[:-1]):
                qpow *= q
                acc = acc * p + c * qpow
            return Fraction(acc, self.den * qpow)
        acc = 0
        for c in reversed(self.num):
            acc = acc * x + c
        return acc / self.den

    def derivative(self) -> "SPoly":
        return SPoly([i * c for i, c in enumerate(self.num)][1:], self.den)

    def monic(self) -> "SPoly":
        if self.is_zero():
            raise ValueError("zero polynomial has no monic normalization")
        lead = self.num[-1]
        return SPoly(self.num, lead) if lead > 0 else SPoly([-c for c in self.num], -lead)

    def primitive(self) -> tuple[Fraction, "SPoly"]:
        """Return ``(c, p)`` with ``self = c * p``, ``p`` integral with coprime coefficients."""
        c = content(self)
        return c, self * (1 / c)

    # io
    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs] or ["0"]

    @classmethod
    def from_json(cls, data) -> "SPoly":
        if isinstance(data, (int, str)):
            return cls.const(Fraction(data))
        return cls([Fraction(str(c)) for c in data])

    def __repr__(self):
        return f"SPoly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, c in reversed(list(enumerate(self.coeffs))):
            if not c:
                continue
            mono = "" if i == 0 else ("s" if i == 1 else f"s^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+", body))
        head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        return head + "".join(f" {sg} {b}" for sg, b in terms[1:])


def content(p: SPoly) -> Fraction:
    """Positive rational ``c`` such that ``p / c`` has coprime integer coefficients."""
    if p.is_zero():
        return Fraction(0)
    return Fraction(_icontent(p.num), p.den)


def gcd_content(p: SPoly, q: SPoly) -> SPoly:
    """Monic gcd in Q[s]."""
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of zeros")
    if p.is_zero():
        return q.monic()
    if q.is_zero():
        return p.monic()
    if p.is_const() or q.is_const():
        return SPoly.const(1)
    h, _, _ = _igcd_poly(list(p.num), list(q.num))
    return SPoly(h).monic()


def gcd_many(polys: Iterable[SPoly]) -> SPoly:
    """Monic gcd of a family, short-circuiting once it reaches 1."""
    ps = sorted((p for p in polys if not p.is_zero()), key=lambda p: (len(p.num), p.num))
    if not ps:
        raise ValueError("gcd of zeros")
    g = ps[0].monic()
    for p in ps[1:]:
        if g.is_const():
            break
        g = gcd_content(g, p)
    return g


def lcm_poly(p: SPoly, q: SPoly) -> SPoly:
    return (p * q).exquo(gcd_content(p, q)).monic()


def radical(p: SPoly) -> SPoly:
    """Monic squarefree part (product of the distinct irreducible factors)."""
    if p.is_zero():
        raise ValueError("radical of zero")
    if p.is_const():
        return SPoly.const(1)
    return p.exquo(gcd_content(p, p.derivative())).monic()


def ord_at(x: SPoly, m: SPoly) -> int:
    """Multiplicity of the (irreducible) factor ``m`` in ``x``."""
    if x.is_zero():
        raise ValueError("valuation of zero")
    if m.degree < 1:
        raise ValueError("valuation factor must be non-constant")
    k = 0
    while True:
        q, r = divmod(x, m)
        if not r.is_zero():
            return k
        x, k = q, k + 1


# ---------------------------------------------------------------------------


class SRat:
    """Rational function ``num / den`` in ``s`` with monic ``den`` and coprime parts."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, reduced: bool = False):
        num = SPoly.coerce(num)
        den = SPoly.const(1) if den is None else SPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced and not den.is_const() and not num.is_zero():
            g = gcd_content(num, den)
            if not g.is_const():
                num, den = num.exquo(g), den.exquo(g)
        if num.is_zero():
            den = SPoly.const(1)
        lead = den.lc
        if lead != 1:
            num, den = num * (1 / lead), den * (1 / lead)
        self.num, self.den = num, den

    @classmethod
    def coerce(cls, x) -> "SRat":
        if isinstance(x, SRat):
            return x
        return cls(SPoly.coerce(x), reduced=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_const()

    def __add__(self, other):
        if not isinstance(other, (SRat, SPoly, int, Fraction)):
            return NotImplemented
        other = SRat.coerce(other)
        if self.den == other.den:
            return SRat(self.num + other.num, self.den)
        return SRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return SRat(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        if not isinstance(other, (SRat, SPoly, int, Fraction)):
            return NotImplemented
        return self + (-SRat.coerce(other))

    def __rsub__(self, other):
        return SRat.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return SRat(self.num * other, self.den, reduced=True)
        if not isinstance(other, (SRat, SPoly)):
            return NotImplemented
        other = SRat.coerce(other)
        if self.is_poly() and other.is_poly():
            return SRat(self.num * other.num, reduced=True)
        return SRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "SRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return SRat(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / as_rat(other))
        return self * SRat.coerce(other).inverse()

    def __rtruediv__(self, other):
        return SRat.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return SRat(self.num ** k, self.den ** k, reduced=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, SPoly)):
            other = SRat.coerce(other)
        if not isinstance(other, SRat):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole of family at t = {x}")
        return self.num(x) / d

    @property
    def deg_value(self):
        """``deg(num) - deg(den)``; the log of the valuation at ``s = infinity``."""
        if self.is_zero():
            return NEG_INF
        return self.num.degree - self.den.degree

    def to_json(self):
        return [self.num.to_json(), self.den.to_json()]

    @classmethod
    def from_json(cls, data) -> "SRat":
        if isinstance(data, (int, str)):
            return cls.coerce(Fraction(data))
        if data and isinstance(data[0], list):
            return cls(SPoly.from_json(data[0]), SPoly.from_json(data[1]) if len(data) > 1 else None)
        return cls(SPoly.from_json(data))

    def __repr__(self):
        return f"SRat({self})"

    def __str__(self):
        if self.is_poly():
            return str(self.num)
        return f"({self.num})/({self.den})"


# ---------------------------------------------------------------------------
# places


@dataclass(frozen=True)
class Place:
    """An absolute value class: archimedean, p-adic, s-adic at ``m`` or ``s = infinity``."""

    kind: str
    p: int | None = None
    m: SPoly | None = None

    ARCH = "arch"
    PRIME = "prime"
    S_ADIC = "s-adic"
    S_INF = "s-inf"

    @classmethod
    def arch(cls) -> "Place":
        return cls(cls.ARCH)

    @classmethod
    def prime(cls, p: int) -> "Place":
        if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        return cls(cls.PRIME, p=p)

    @classmethod
    def s_adic(cls, m: SPoly) -> "Place":
        m = SPoly.coerce(m)
        if m.degree < 1:
            raise ValueError("s-adic place needs a non-constant factor")
        return cls(cls.S_ADIC, m=m.monic())

    @classmethod
    def s_inf(cls) -> "Place":
        return cls(cls.S_INF)

    @property
    def is_valuation(self) -> bool:
        return self.kind in (self.S_ADIC, self.S_INF)

    def __str__(self):
        if self.kind == self.PRIME:
            return f"p:{self.p}"
        if self.kind == self.S_ADIC:
            return f"beta:{self.m}"
        return {self.ARCH: "arch", self.S_INF: "inf"}[self.kind]


def vp(x: Number, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = as_rat(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v, n, d = 0, abs(x.numerator), x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def log_abs(x: Number) -> float:
    """Natural log of ``|x|`` for big rationals (no float overflow)."""
    x = as_rat(x)
    if x == 0:
        return NEG_INF
    return math.log(abs(x.numerator)) - math.log(x.denominator)


def log_abs_v(x: Number, v: Place) -> float:
    if v.kind == Place.ARCH:
        return log_abs(x)
    if v.kind == Place.PRIME:
        if x == 0:
            return NEG_INF
        return -vp(x, v.p) * math.log(v.p)
    raise ValueError(f"{v} is not a place of Q")


def log_norm(x, v: Place):
    """Log of the Gauss-type norm of ``x`` (SPoly or SRat) at the place ``v``.

    Archimedean and p-adic places give the log of the largest coefficient
    norm; valuation places return exact integers (``-ord`` for s-adic,
    degree for ``s = infinity``).
    """
    if isinstance(x, (int, Fraction)):
        x = SPoly.const(x)
    if isinstance(x, SRat):
        if x.is_zero() and v.is_valuation:
            raise ValueError("valuation of zero")
        if v.is_valuation:
            return log_norm(x.num, v) - log_norm(x.den, v)
        if not x.is_poly():
            raise ValueError("coefficient norms need a polynomial, got a rational function")
        return log_norm(x.num * (1 / x.den.lc), v)
    if x.is_zero():
        if v.is_valuation:
            raise ValueError("valuation of zero")
        return NEG_INF
    if v.kind == Place.ARCH:
        return math.log(max(abs(c) for c in x.num)) - math.log(x.den)
    if v.kind == Place.PRIME:
        return max(-vp(Fraction(c, x.den), v.p) for c in x.num if c) * math.log(v.p)
    if v.kind == Place.S_ADIC:
        return -ord_at(x, v.m)
    return x.degree


# ---------------------------------------------------------------------------
# heights


def height(x: Number) -> float:
    """Logarithmic Weil height ``log max(|num|, den)``."""
    x = as_rat(x)
    return math.log(max(abs(x.numerator), x.denominator))


def hplus_of_coeffs(cs: Sequence[Number]) -> float:
    """Affine height: sum over all places of ``log+`` of the largest coefficient norm.

    Only primes dividing some denominator can contribute, and their total is
    ``log lcm(denominators)``.
    """
    cs = [as_rat(c) for c in cs]
    if not cs:
        raise ValueError("empty coefficient sequence")
    nz = [c for c in cs if c]
    if not nz:
        return 0.0
    arch = max(0.0, max(log_abs(c) for c in nz))
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in nz), 1)
    return arch + math.log(lcm)


def liouville_floor(a: Number) -> float:
    """Lower bound ``exp(-h(a))`` valid for ``|a|_v`` at every place of Q."""
    a = as_rat(a)
    if a == 0:
        raise ValueError("liouville floor of zero")
    return math.exp(-height(a))


def root_bound(p: SPoly) -> Fraction:
    """Cauchy bound ``1 + max |c_i / c_lead|`` on the complex roots of ``p``."""
    if p.is_zero() or p.degree < 1:
        raise ValueError("no roots")
    lead = p.num[-1]
    return 1 + max(Fraction(abs(c), abs(lead)) for c in p.num[:-1])
