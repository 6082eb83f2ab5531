from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy

from gitkit.groebner import (
    PolynomialIdeal,
    UndecidedError,
    complex_point,
    groebner,
    ideal_is_proper,
    normal_form,
    rational_point,
)
from gitkit.poly import MPoly

a, b, c = MPoly.gens(3)
NAMES = ("a", "b", "c")


def _to_sympy(p: MPoly, syms):
    return sum(
        sympy.Rational(v.numerator, v.denominator) * sympy.prod([s**e for s, e in zip(syms, ex)])
        for ex, v in p.terms.items()
    )


def _random_poly(rng: random.Random, nterms=3, deg=2) -> MPoly:
    terms = {}
    for _ in range(nterms):
        ex = tuple(rng.randint(0, deg) for _ in range(3))
        terms[ex] = rng.randint(-3, 3)
    return MPoly(3, terms)


def test_spec_examples():
    alpha = MPoly.gens(1)[0]
    assert ideal_is_proper(PolynomialIdeal(("alpha",), [alpha - 1]))
    assert not ideal_is_proper(PolynomialIdeal(("alpha",), [alpha, alpha - 1]))
    assert ideal_is_proper(PolynomialIdeal(("alpha",), [alpha * alpha + 1]))


def test_reduced_basis_matches_sympy():
    rng = random.Random(3)
    syms = sympy.symbols("a b c")
    for _ in range(25):
        gens = [_random_poly(rng) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        ours = groebner(gens)
        ref = sympy.groebner([_to_sympy(g, syms) for g in gens], *syms, order="grevlex")
        ours_sym = {sympy.expand(_to_sympy(g, syms)) for g in ours}
        ref_sym = {sympy.expand(g / sympy.Poly(g, *syms).LC(order="grevlex")) for g in ref.exprs}
        assert ours_sym == ref_sym


def test_properness_matches_sympy():
    rng = random.Random(8)
    syms = sympy.symbols("a b c")
    for _ in range(40):
        gens = [_random_poly(rng, nterms=2) for _ in range(rng.randint(2, 4))]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        ref = sympy.groebner([_to_sympy(g, syms) for g in gens], *syms, order="grevlex")
        assert ideal_is_proper(PolynomialIdeal(NAMES, gens)) == (list(ref.exprs) != [1])


def test_normal_form_of_ideal_member_is_zero():
    gens = [a * a - b, b * c - 1]
    basis = groebner(gens)
    member = (a + c) * gens[0] + a * b * gens[1]
    assert normal_form(member, basis).is_zero()
    assert not normal_form(a, basis).is_zero()


def test_budget_zero_raises():
    gens = [a * a - b, b * b - c, c * a - 1]
    with pytest.raises(UndecidedError):
        ideal_is_proper(PolynomialIdeal(NAMES, gens), budget=0)


def test_budget_from_environment(monkeypatch):
    gens = [a * a - b, b * b - c, c * a - 1]
    monkeypatch.setenv("GITKIT_GROEBNER_BUDGET", "0")
    with pytest.raises(UndecidedError):
        ideal_is_proper(PolynomialIdeal(NAMES, gens))
    monkeypatch.setenv("GITKIT_GROEBNER_BUDGET", "100000")
    assert ideal_is_proper(PolynomialIdeal(NAMES, gens))


def test_rational_point_is_a_zero():
    ideal = PolynomialIdeal(NAMES, [a - 2 * b, b * b - 9, c * a - 3])
    pt = rational_point(ideal)
    assert pt is not None
    assert all(g.evaluate(pt) == 0 for g in ideal.generators)
    assert rational_point(PolynomialIdeal(NAMES, [a * a - 2, b, c])) is None
    assert rational_point(PolynomialIdeal(NAMES, [a, a - 1])) is None


def test_complex_point_for_irrational_zero():
    ideal = PolynomialIdeal(NAMES, [a * a + 1, b - a, c])
    pt = complex_point(ideal)
    assert pt is not None
    assert all(abs(g.evaluate_complex(pt)) < 1e-8 for g in ideal.generators)


def test_generator_ring_mismatch():
    with pytest.raises(ValueError):
        PolynomialIdeal(("a",), [a])
