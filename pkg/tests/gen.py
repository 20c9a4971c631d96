"""Random instance generators shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction

from lyapdegen.forms import BiForm
from lyapdegen.pushforward import Lift
from lyapdegen.scalars import SPoly, gcd_many


def rand_spoly(rng: random.Random, deg: int, h: int = 4, rational: bool = False) -> SPoly:
    cs = []
    for _ in range(deg + 1):
        c = rng.randint(-h, h)
        if rational and rng.random() < 0.3:
            c = Fraction(c, rng.randint(1, 4))
        cs.append(c)
    return SPoly(cs)


def rand_form(rng: random.Random, e: int, ds: int, h: int = 4, rational: bool = False) -> BiForm:
    while True:
        cs = [rand_spoly(rng, rng.randint(0, ds), h, rational) for _ in range(e + 1)]
        if any(not c.is_zero() for c in cs):
            return BiForm.exact(cs)


def rand_lift(rng: random.Random, d: int, ds: int = 1, h: int = 3) -> Lift:
    while True:
        P = rand_form(rng, d, ds, h)
        Q = rand_form(rng, d, ds, h)
        try:
            return Lift(P, Q)
        except ValueError:
            continue


def rand_primitive(rng: random.Random, e: int, ds: int, h: int = 8) -> BiForm:
    """Integer form with deg_s >= 1 and coefficients free of a common root."""
    while True:
        cs = [rand_spoly(rng, rng.randint(0, ds), h) for _ in range(e + 1)]
        nz = [c for c in cs if not c.is_zero()]
        if not nz or max(c.degree for c in nz) < 1:
            continue
        if gcd_many(nz).is_const():
            return BiForm.exact(cs)


def good_rational_t(rng: random.Random, F: Lift, lo: int = -5, hi: int = 5) -> Fraction:
    while True:
        t = Fraction(rng.randint(lo * 4, hi * 4), rng.randint(1, 4))
        try:
            if F.res(t) != 0:
                return t
        except ZeroDivisionError:
            continue


def eval_form(form: BiForm, x: complex, y: complex) -> complex:
    e = form.degree
    return sum(complex(c) * x ** (e - i) * y ** i for i, c in enumerate(form.coeffs))
