import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import rand_form
from lyapdegen.forms import (
    BiForm,
    ScaledC,
    content_split,
    deg_s,
    hplus_form,
    rat_form,
    size_functionals,
    specialize,
    split_scalar,
)
from lyapdegen.scalars import SPoly, SRat

s = SPoly.s()


def test_specialize_examples():
    assert specialize(BiForm.exact([s, 0, 1]), 3) == BiForm([Fraction(3), Fraction(0), Fraction(1)])
    assert specialize(BiForm.exact([s - 1, s, 0]), 1) == BiForm([Fraction(0), Fraction(1), Fraction(0)])
    with pytest.raises(ZeroDivisionError, match="pole"):
        specialize(BiForm.exact([SRat(1, s), 0, 1]), 0)


def test_specialize_complex_huge_parameter():
    phi = BiForm.exact([s ** 40, 0, 1])
    out = specialize(phi, 1e300 + 0j)
    assert out.coeffs[0].log_abs() == pytest.approx(40 * 300 * math.log(10))


def test_size_functionals_examples():
    a = size_functionals(BiForm.exact([s, 0, -1]))
    assert (a.deg_X, a.deg_s, a.theta) == (2, 1, 3)
    b = size_functionals(BiForm.exact([2, 0, Fraction(1, 3) * s]))
    assert b.hplus == pytest.approx(math.log(6))
    assert b.theta == pytest.approx(math.log(6) + 3)
    # X^2: max{1, 0 + 0 + 2}
    c = size_functionals(rat_form([1, 0, 0]))
    assert (c.deg_s, c.theta) == (0, 2)


def test_theta_needs_polynomials():
    with pytest.raises(ValueError):
        size_functionals(BiForm.exact([SRat(1, s), 1]))


def test_content_split_examples():
    alpha, prim, c = content_split(BiForm.exact([s * s - s, 0, s - 1]))
    assert alpha == s - 1 and prim == BiForm.exact([s, 0, 1]) and c == 1
    alpha, prim, c = content_split(BiForm.exact([s, 0, 1]))
    assert alpha == SPoly.const(1)
    alpha, prim, c = content_split(BiForm.exact([4 * s, 6 * s, 0]))
    assert alpha == s and c == 2 and prim == BiForm.exact([2, 3, 0])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_content_split_roundtrip(seed):
    rng = random.Random(seed)
    phi = rand_form(rng, rng.randint(0, 3), 3, 6, rational=True)
    factor = BiForm.exact([(s - rng.randint(-3, 3)) ** rng.randint(0, 2)])
    phi = phi * factor.coeffs[0]
    alpha, prim, c = content_split(phi)
    assert prim * (SRat(alpha) * c) == phi


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_split_scalar_with_denominators(seed):
    rng = random.Random(seed)
    phi = rand_form(rng, 2, 2, 5, rational=True)
    phi = phi * SRat(SPoly.const(1), (s + rng.randint(1, 3)) ** 2)
    sp = split_scalar(phi)
    assert sp.primitive * sp.scalar == phi
    assert all(SRat.coerce(c).den == SPoly.const(1) for c in sp.primitive.coeffs)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_specialization_triangle_bound(seed):
    rng = random.Random(seed)
    phi = rand_form(rng, rng.randint(1, 3), 3, 6, rational=True)
    t = Fraction(rng.randint(1, 500), rng.randint(1, 3)) * rng.choice([1, -1])
    if abs(t) < 1:
        t = 1 / t
    ft = specialize(phi, t)
    top = max(abs(c) for c in ft.coeffs)
    if top == 0:
        return
    lhs = math.log(top)
    ds = deg_s(phi)
    norm = max(abs(c) for cs in phi.coeffs for c in SRat.coerce(cs).num.coeffs)
    assert lhs <= ds * math.log(abs(t)) + math.log(norm) + math.log(1 + ds) + 1e-12


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_specialize_commutes_with_products(seed):
    rng = random.Random(seed)
    a = rand_form(rng, 2, 2)
    b = rand_form(rng, 1, 2)
    t = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    try:
        lhs = specialize(a * b, t)
    except ValueError:
        return
    assert lhs == specialize(a, t) * specialize(b, t)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_content_removal_hplus_slack(seed):
    """h+(Psi / alpha) <= h+(Psi) + (N deg_X + deg_s) log 2 with N = 1."""
    rng = random.Random(seed)
    prim = rand_form(rng, rng.randint(1, 3), 2, 6)
    alpha = SPoly([rng.randint(-3, 3) for _ in range(rng.randint(1, 2))] + [1])
    psi = prim * SRat(alpha)
    a, p, c = content_split(psi)
    core = p * c
    assert hplus_form(core) <= hplus_form(psi) + (psi.degree + deg_s(psi)) * math.log(2) + 1e-9


def test_scaled_complex_arithmetic():
    a = ScaledC.of(3 + 4j, 2000)
    b = ScaledC.of(1 - 1j, -1500)
    assert (a * b).log_abs() == pytest.approx(math.log(5 * math.sqrt(2)) + 500 * math.log(2))
    assert (a / b).arg() == pytest.approx(cmath.phase((3 + 4j) / (1 - 1j)))
    assert (ScaledC.of(2.0) + ScaledC.of(3.0)).to_complex() == pytest.approx(5)
    assert ScaledC.from_rat(Fraction(10 ** 400, 3)).log_abs() == pytest.approx(400 * math.log(10) - math.log(3))


def test_form_json_roundtrip():
    phi = BiForm.exact([s * s + Fraction(1, 2), 0, SRat(1, s + 1)])
    assert BiForm.from_json(phi.to_json()) == phi
    assert phi.to_json()["degree"] == 2


def test_zero_form_rejected():
    with pytest.raises(ValueError):
        BiForm.exact([0, 0])
