import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import eval_form, good_rational_t, rand_form, rand_lift
from lyapdegen.forms import BiForm, rat_form, specialize
from lyapdegen.pushforward import (
    Lift,
    bareiss_det,
    hom_height,
    jacobian,
    newton_interp,
    preimage_tree,
    pushforward,
    res_binary,
)
from lyapdegen.scalars import SPoly, SRat

s = SPoly.s()
S, X, Y = sympy.symbols("s X Y")


def const_lift(P, Q):
    return Lift(rat_form(P), rat_form(Q))


def scalar_sympy(c):
    c = SRat.coerce(c)
    num = sum(sympy.Rational(x.numerator, x.denominator) * S ** j for j, x in enumerate(c.num.coeffs))
    den = sum(sympy.Rational(x.numerator, x.denominator) * S ** j for j, x in enumerate(c.den.coeffs))
    return num / den


def form_sympy(form: BiForm):
    e = form.degree
    return sum(scalar_sympy(c) * X ** (e - i) * Y ** i for i, c in enumerate(form.coeffs))


# --- resultants -------------------------------------------------------------


def test_res_examples():
    assert res_binary(rat_form([1, -1]), rat_form([1, 1])) == 2
    assert res_binary(rat_form([1, 0, 0]), rat_form([0, 0, 1])) == 1


def test_res_elimination_example():
    U, V = sympy.symbols("U V")
    inner = sympy.resultant(Y * U ** 2 + (S * Y - X) * V ** 2, U - S * V, U)
    assert sympy.factor(inner) == sympy.factor(V ** 2 * (S ** 2 * Y + S * Y - X))
    # Res(F) = 1 for this lift, so F_*(X - sY) is the squared elimination form
    F = Lift(BiForm.exact([1, 0, s]), BiForm.exact([0, 0, 1]))
    ours = pushforward(F, BiForm.exact([1, -s]))
    assert sympy.expand(form_sympy(ours) - (S ** 2 * Y + S * Y - X) ** 2) == 0


def test_bareiss_matches_sympy():
    rng = random.Random(3)
    for n in range(1, 7):
        A = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        assert bareiss_det(A) == sympy.Matrix(A).det()


def test_newton_interp_roundtrip():
    p = 3 * s ** 4 - Fraction(1, 2) * s + 7
    xs = list(range(5))
    assert newton_interp(xs, [p(x) for x in xs]) == p


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_res_matches_sympy(seed):
    rng = random.Random(seed)
    A = rand_form(rng, rng.randint(1, 3), 2)
    B = rand_form(rng, rng.randint(1, 3), 2)
    ours = res_binary(A, B)
    ref = sympy.Matrix(_sylvester_sym(A, B)).det()
    assert sympy.simplify(scalar_sympy(ours) - ref) == 0


def _sylvester_sym(A, B):
    ca = [scalar_sympy(c) for c in A.coeffs]
    cb = [scalar_sympy(c) for c in B.coeffs]
    m, n = len(ca) - 1, len(cb) - 1
    rows = []
    for i in range(n):
        rows.append([0] * i + ca + [0] * (n - 1 - i))
    for i in range(m):
        rows.append([0] * i + cb + [0] * (m - 1 - i))
    return rows


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_res_multiplicative(seed):
    rng = random.Random(seed)
    A = rand_form(rng, rng.randint(1, 3), 2, rational=True)
    B = rand_form(rng, rng.randint(1, 2), 2, rational=True)
    C = rand_form(rng, rng.randint(1, 2), 1, rational=True)
    assert res_binary(A, B * C) == res_binary(A, B) * res_binary(A, C)


# --- pushforward ------------------------------------------------------------


def test_pushforward_examples():
    sq = const_lift([1, 0, 0], [0, 0, 1])
    assert pushforward(sq, rat_form([1, 0])) == rat_form([1, 0, 0])
    assert pushforward(sq, rat_form([1, -1])) == rat_form([1, -2, 1])
    F = Lift(BiForm.exact([1, 0, s]), BiForm.exact([0, 0, 1]))
    # 256 Y^2 (X - sY)^2
    want = BiForm.exact([0, 0, 256, -512 * s, 256 * s * s])
    assert pushforward(F, BiForm.exact([0, 4, 0])) == want


def test_pushforward_example_numeric_oracle():
    F = Lift(BiForm.exact([1, 0, s]), BiForm.exact([0, 0, 1]))
    phi = BiForm.exact([0, 4, 0])
    img = pushforward(F, phi)
    rng = random.Random(11)
    for _ in range(10):
        t = Fraction(rng.randint(-40, 40), rng.randint(1, 4))
        x, y = complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        tree = preimage_tree(F, t, (x, y), 1)
        lhs = math.log(abs(eval_form(specialize(img, t), x, y)))
        assert tree.log_product(specialize(phi, t), 1) == pytest.approx(lhs, rel=1e-9, abs=1e-9)


def test_zero_form_rejected():
    F = const_lift([1, 0, 0], [0, 0, 1])
    with pytest.raises(ValueError):
        pushforward(F, BiForm([Fraction(0)]))


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=20, deadline=None)
def test_degree_law(seed, d):
    rng = random.Random(seed)
    F = rand_lift(rng, d, ds=1)
    phi = rand_form(rng, rng.randint(1, 3), 1, rational=True)
    assert pushforward(F, phi).degree == d * phi.degree


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=15, deadline=None)
def test_multiplicative_and_scaling(seed, d):
    rng = random.Random(seed)
    F = rand_lift(rng, d, ds=1)
    a = rand_form(rng, rng.randint(1, 2), 1, rational=True)
    b = rand_form(rng, rng.randint(0, 2), 1, rational=True)
    c = SRat(SPoly([rng.randint(1, 5), rng.randint(-3, 3)]), SPoly([rng.randint(1, 3), 1]))
    assert pushforward(F, a * b) == pushforward(F, a) * pushforward(F, b)
    assert pushforward(F, a * c) == pushforward(F, a) * c ** (d * d)


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=15, deadline=None)
def test_tree_oracle_agreement(seed, d):
    rng = random.Random(seed)
    F = rand_lift(rng, d, ds=1)
    phi = rand_form(rng, rng.randint(1, 3), 1)
    img = pushforward(F, phi)
    t = good_rational_t(rng, F)
    try:
        img_t = specialize(img, t)
        phi_t = specialize(phi, t)
    except ZeroDivisionError:
        return
    x = cmath.rect(rng.uniform(0.5, 2), rng.uniform(0, 2 * math.pi))
    y = cmath.rect(rng.uniform(0.5, 2), rng.uniform(0, 2 * math.pi))
    val = eval_form(img_t, x, y)
    if abs(val) < 1e-8:
        return
    tree = preimage_tree(F, t, (x, y), 1)
    ref = tree.log_product(phi_t, 1)
    lhs = math.log(abs(val))
    assert abs(lhs - ref) <= 1e-8 * max(1.0, abs(ref))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_pushforward_commutes_with_specialization(seed):
    rng = random.Random(seed)
    F = rand_lift(rng, 2, ds=1)
    phi = rand_form(rng, 2, 1)
    t = good_rational_t(rng, F)
    try:
        lhs = specialize(pushforward(F, phi), t)
        Ft = F.specialize(t)
        phit = specialize(phi, t)
    except ZeroDivisionError:
        return
    rhs = pushforward(Ft, BiForm.exact(phit.coeffs))
    assert BiForm.exact(lhs.coeffs) == rhs


def test_lift_normalization_and_degeneracy():
    F = Lift(BiForm.exact([2 * s, 0, 0]), BiForm.exact([0, 0, 4 * s]))
    assert F.P == BiForm.exact([1, 0, 0]) and F.Q == BiForm.exact([0, 0, 2])
    with pytest.raises(ValueError, match="degenerate"):
        Lift(BiForm.exact([1, -1, 0]), BiForm.exact([0, 1, -1]))


# --- jacobian, hom height ---------------------------------------------------


def test_jacobian_examples():
    assert jacobian(Lift(BiForm.exact([1, 0, s]), BiForm.exact([0, 0, 1]))) == BiForm.exact([0, 4, 0])
    assert jacobian(const_lift([1, 0, 0], [0, 0, 1])) == BiForm.exact([0, 4, 0])
    assert jacobian(const_lift([1, 0, 0, 0], [0, 0, 0, 1])) == BiForm.exact([0, 0, 9, 0, 0])


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
@settings(max_examples=15, deadline=None)
def test_jacobian_matches_sympy(seed, d):
    rng = random.Random(seed)
    F = rand_lift(rng, d)
    P, Q = form_sympy(F.P), form_sympy(F.Q)
    ref = sympy.diff(P, X) * sympy.diff(Q, Y) - sympy.diff(P, Y) * sympy.diff(Q, X)
    assert sympy.simplify(form_sympy(jacobian(F)) - ref) == 0


def test_hom_height_examples():
    F = Lift(BiForm.exact([1, 0, s]), BiForm.exact([0, 0, 1]))
    assert hom_height(F, 10) == pytest.approx(4 * math.log(10))
    assert hom_height(F, 10.0 + 0j) == pytest.approx(4 * math.log(10))
    sq = const_lift([1, 0, 0], [0, 0, 1])
    assert hom_height(sq, 3) == 0
    two = Lift(BiForm.exact([2, 0, 0]), BiForm.exact([0, 0, 2]), normalize=False)
    assert hom_height(two, Fraction(5, 2)) == pytest.approx(0, abs=1e-12)


def test_hom_height_degenerate():
    F = Lift(BiForm.exact([1, 0, 0]), BiForm.exact([0, 1, -s]))
    with pytest.raises(ValueError, match="resultant vanishes at t"):
        hom_height(F, 0)


# --- preimage tree ----------------------------------------------------------


def test_tree_counts():
    sq = const_lift([1, 0, 0], [0, 0, 1])
    tree = preimage_tree(sq, 0, (1, 1), 2)
    assert tree.count(1) == 4 and tree.count(2) == 16
    U, V = tree.levels[1]
    pts = sorted((round((u * math.exp(tree.scales[1])).real), round((v * math.exp(tree.scales[1])).real))
                 for u, v in zip(U, V))
    assert pts == [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    assert tree.parent_residual(2) < 1e-12


def test_tree_vieta():
    F = const_lift([1, 0, 1], [0, 1, 0])
    for x, y in [(0.7 + 0.2j, 1.3 - 0.4j), (2.0, 0.5j), (-1.1, 3.0)]:
        tree = preimage_tree(F, 0, (x, y), 1)
        U, _ = tree.levels[1]
        prod = np.prod(U * math.exp(tree.scales[1]))
        assert abs(prod - y * y) <= 1e-9 * abs(y * y)


def test_tree_handles_root_at_infinity():
    # x -> 1/x^2 style: P = Y^2, Q = X^2; the preimage polynomial of (1:0) drops degree
    F = const_lift([0, 0, 1], [1, 0, 0])
    tree = preimage_tree(F, 0, (1.0, 0.0), 1)
    assert tree.count(1) == 4
    assert tree.parent_residual(1) < 1e-10


def test_tree_budget():
    sq = const_lift([1, 0, 0], [0, 0, 1])
    with pytest.raises(ValueError, match="budget"):
        preimage_tree(sq, 0, (1, 1), 12)
