import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lyapdegen.scalars import (
    Place,
    SPoly,
    SRat,
    content,
    gcd_content,
    height,
    hplus_of_coeffs,
    liouville_floor,
    log_norm,
    ord_at,
    radical,
    root_bound,
    vp,
)

s = SPoly.s()
S = sympy.Symbol("s")

rats = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)
nonzero_rats = rats.filter(lambda x: x != 0)
polys = st.lists(st.integers(-20, 20), min_size=1, max_size=6).map(SPoly)


def to_sympy(p: SPoly):
    return sum(sympy.Rational(c.numerator, c.denominator) * S ** i for i, c in enumerate(p.coeffs))


def primes_of(a):
    return set(sympy.factorint(abs(a.numerator))) | set(sympy.factorint(a.denominator))


def hplus_by_places(cs):
    """Place-by-place sum of log+ max |c|_v using full factorization."""
    cs = [Fraction(c) for c in cs if c]
    total = max(0.0, max(math.log(abs(c)) for c in cs))
    primes = set()
    for c in cs:
        primes |= primes_of(c)
    for p in primes:
        total += max(0.0, max(-vp(c, p) * math.log(p) for c in cs))
    return total


def test_gcd_examples():
    assert gcd_content(s * s - s, s - 1) == s - 1
    assert gcd_content(s * s + 1, s) == SPoly.const(1)


def test_gcd_of_zeros():
    with pytest.raises(ValueError, match="gcd of zeros"):
        gcd_content(SPoly(), SPoly())


def test_content_example():
    p = 4 * s * s + 2 * s
    assert content(p) == 2
    assert p * Fraction(1, 2) == 2 * s * s + s


@given(polys, polys)
@settings(max_examples=60, deadline=None)
def test_gcd_matches_sympy(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = gcd_content(a, b)
    ref = sympy.Poly(sympy.gcd(to_sympy(a), to_sympy(b)), S)
    ref = ref.monic() if not ref.is_zero else ref
    assert to_sympy(g).expand() == ref.as_expr().expand()


@given(polys.filter(lambda p: not p.is_zero()))
@settings(max_examples=40, deadline=None)
def test_primitive_part_integral(p):
    c, q = p.primitive()
    assert c > 0
    assert q.den == 1
    assert math.gcd(*q.num) == 1 if len(q.num) > 1 else abs(q.num[0]) == 1
    assert q * c == p


def test_log_norm_examples():
    assert log_norm(3 * s * s - 5 * s + Fraction(1, 2), Place.arch()) == pytest.approx(math.log(5))
    assert log_norm(Fraction(1, 6) * s + 4, Place.prime(2)) == pytest.approx(math.log(2))
    assert log_norm((s - 1) ** 2 * (s + 2), Place.s_adic(s - 1)) == -2
    assert log_norm(s ** 3 + 1, Place.s_inf()) == 3


def test_log_norm_srat_num_minus_den():
    x = SRat((s - 1) * s, (s - 1) ** 3 * (s + 5))
    assert log_norm(x, Place.s_adic(s - 1)) == 2
    assert log_norm(x, Place.s_inf()) == -2


def test_log_norm_zero_valuation_error():
    with pytest.raises(ValueError, match="valuation of zero"):
        log_norm(SPoly(), Place.s_inf())


def test_height_examples():
    assert height(Fraction(2, 3)) == pytest.approx(math.log(3))
    assert hplus_of_coeffs([2, Fraction(1, 3)]) == pytest.approx(math.log(2) + math.log(3))
    assert hplus_of_coeffs([1, -1]) == 0


@given(st.lists(nonzero_rats, min_size=1, max_size=6))
@settings(max_examples=80, deadline=None)
def test_hplus_matches_place_sum(cs):
    assert hplus_of_coeffs(cs) == pytest.approx(hplus_by_places(cs), abs=1e-9)


@given(nonzero_rats)
@settings(max_examples=80, deadline=None)
def test_product_formula(a):
    total = math.log(abs(a))
    for p in primes_of(a):
        total += -vp(a, p) * math.log(p)
    assert total == pytest.approx(0, abs=1e-9)


@given(nonzero_rats)
@settings(max_examples=80, deadline=None)
def test_liouville_floor_below_every_place(a):
    floor = liouville_floor(a)
    assert floor <= abs(a) * (1 + 1e-12)
    for p in primes_of(a):
        assert floor <= float(p) ** (-vp(a, p)) * (1 + 1e-12)


def test_liouville_examples():
    assert liouville_floor(Fraction(2, 3)) == pytest.approx(1 / 3)
    assert liouville_floor(1) == 1
    assert liouville_floor(-5) == pytest.approx(1 / 5)
    # |-5|_5 meets the floor with equality
    assert 5.0 ** (-vp(-5, 5)) == pytest.approx(liouville_floor(-5))
    with pytest.raises(ValueError):
        liouville_floor(0)


def test_root_bound_examples():
    assert root_bound(s * s - 4) == 5
    assert root_bound(s - 10) == 11
    assert root_bound(2 * s * s + 8) == 5
    with pytest.raises(ValueError, match="no roots"):
        root_bound(SPoly.const(3))


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=8).filter(lambda c: c[-1] != 0))
@settings(max_examples=60, deadline=None)
def test_root_bound_sound(cs):
    p = SPoly(cs)
    R = float(root_bound(p))
    roots = np.roots(list(reversed(cs)))
    assert np.all(np.abs(roots) <= R * (1 + 1e-9))


@given(polys.filter(lambda p: not p.is_zero()), polys.filter(lambda p: not p.is_zero()),
       st.sampled_from([2, 3, 5]))
@settings(max_examples=60, deadline=None)
def test_log_norm_multiplicative(x, y, p):
    for v in (Place.prime(p), Place.s_inf(), Place.s_adic(s - 1), Place.s_adic(s * s + 1)):
        assert log_norm(x * y, v) == pytest.approx(log_norm(x, v) + log_norm(y, v))
    arch = Place.arch()
    slack = math.log(1 + min(x.degree, y.degree))
    gap = log_norm(x * y, arch) - log_norm(x, arch) - log_norm(y, arch)
    assert abs(gap) <= slack + 1e-12


def test_ord_and_radical():
    p = (s - 1) ** 3 * (s + 2) ** 2 * s
    assert ord_at(p, s - 1) == 3
    assert ord_at(p, s + 2) == 2
    assert radical(p) == ((s - 1) * (s + 2) * s).monic()


def test_srat_reduced_and_monic():
    x = SRat(2 * (s - 1) * (s + 1), 4 * (s - 1))
    assert x.den == SPoly.const(1)
    assert x.num == Fraction(1, 2) * (s + 1)
    y = SRat(s, 3 * s + 3)
    assert y.den.lc == 1


def test_srat_pole_error():
    with pytest.raises(ZeroDivisionError, match="pole"):
        SRat(SPoly.const(1), s - 2)(2)


def test_json_roundtrip():
    p = 3 * s * s + Fraction(1, 2)
    assert p.to_json() == ["1/2", "0", "3"]
    assert SPoly.from_json(p.to_json()) == p
    x = SRat(s + 1, s * s + 3)
    assert SRat.from_json(x.to_json()) == x


def test_place_strings():
    assert str(Place.arch()) == "arch"
    assert str(Place.prime(7)) == "p:7"
    assert str(Place.s_inf()) == "inf"
    with pytest.raises(ValueError):
        Place.prime(6)
