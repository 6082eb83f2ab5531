from __future__ import annotations

import random
from fractions import Fraction

import pytest

from oracles import corpus
from gitkit.poly import MPoly
from gitkit.weighted import (
    GL2Element,
    PolynomialSyntaxError,
    UnipotentElement,
    WeightedPolynomial,
    ZeroPolynomialError,
    apply_gl2,
    apply_unipotent,
    binary_form_rational_roots,
    monomial_basis,
    parse_polynomial,
    section_multiplicity,
    section_witness,
    u_action_matrix,
    z_degree_range,
)

L, MU, NU = MPoly.gens(3)
P = parse_polynomial


def _matrix_d4_reference():
    # columns = images of x^4, x^3y, x^2y^2, xy^3, y^4, x^2z, xyz, y^2z, z^2
    one, zero = MPoly.const(3, 1), MPoly(3)
    cols = [[one if r == c else zero for r in range(9)] for c in range(5)]
    cols.append([L, MU, NU, zero, zero, one, zero, zero, zero])
    cols.append([zero, L, MU, NU, zero, zero, one, zero, zero])
    cols.append([zero, zero, L, MU, NU, zero, zero, one, zero])
    cols.append([L * L, 2 * L * MU, 2 * L * NU + MU * MU, 2 * MU * NU, NU * NU, 2 * L, 2 * MU, 2 * NU, one])
    return [[cols[c][r] for c in range(9)] for r in range(9)]


def test_monomial_basis_examples():
    assert monomial_basis(4) == [(4, 0, 0), (3, 1, 0), (2, 2, 0), (1, 3, 0), (0, 4, 0),
                                 (2, 0, 1), (1, 1, 1), (0, 2, 1), (0, 0, 2)]
    assert monomial_basis(0) == [(0, 0, 0)]
    assert monomial_basis(2) == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 1)]
    for d in range(9):
        brute = {(i, j, k) for i in range(d + 1) for j in range(d + 1) for k in range(d + 1)
                 if i + j + 2 * k == d}
        assert set(monomial_basis(d)) == brute and len(monomial_basis(d)) == len(brute)


def test_u_action_matrix_d4_exact():
    assert u_action_matrix(4) == _matrix_d4_reference()


def test_u_action_matrix_small_and_identity():
    one, zero = MPoly.const(3, 1), MPoly(3)
    assert u_action_matrix(2) == [[one, zero, zero, L], [zero, one, zero, MU],
                                  [zero, zero, one, NU], [zero, zero, zero, one]]
    for d in (2, 4, 6):
        m = u_action_matrix(d)
        n = len(m)
        assert [[e.evaluate((0, 0, 0)) for e in row] for row in m] == [
            [int(i == j) for j in range(n)] for i in range(n)]


def test_apply_unipotent_examples():
    lam, mu, nu = Fraction(2, 3), Fraction(-1), Fraction(5)
    u = UnipotentElement(lam, mu, nu)
    assert apply_unipotent(P("x^2*z"), UnipotentElement(lam)) == P("x^2*z") + lam * P("x^4")
    p = P("z^2 + 3*x*y*z - x^4")
    assert apply_unipotent(p, UnipotentElement()) == p
    expect = WeightedPolynomial(4, {
        (0, 0, 2): 1, (2, 0, 1): 2 * lam, (1, 1, 1): 2 * mu, (0, 2, 1): 2 * nu,
        (4, 0, 0): lam**2, (3, 1, 0): 2 * lam * mu, (2, 2, 0): 2 * lam * nu + mu**2,
        (1, 3, 0): 2 * mu * nu, (0, 4, 0): nu**2})
    assert apply_unipotent(P("z^2"), u) == expect


def test_apply_gl2_examples():
    p = P("x^2*z - 2*y^4 + x*y*z")
    assert apply_gl2(p, GL2Element.identity()) == p
    t = Fraction(3, 2)
    assert apply_gl2(P("x^2*z"), GL2Element(((t, 0), (0, t)))) == P("x^2*z")
    for (i, j, k) in monomial_basis(6):
        m = WeightedPolynomial.monomial(i, j, k)
        assert apply_gl2(m, GL2Element(((t, 0), (0, t)))) == t ** (i + j - 2 * k) * m
    assert apply_gl2(P("x^2*z"), GL2Element(((0, 1), (1, 0)))) == -P("y^2*z")


def _random_gl2(q) -> GL2Element:
    while True:
        m = ((q(), q()), (q(), q()))
        if m[0][0] * m[1][1] != m[0][1] * m[1][0]:
            return GL2Element(m)


def test_group_laws():
    rng = random.Random(5)
    q = lambda: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    for p in corpus(4, 20, seed=2):
        u1, u2 = UnipotentElement(q(), q(), q()), UnipotentElement(q(), q(), q())
        assert apply_unipotent(apply_unipotent(p, u1), u2) == apply_unipotent(p, u1 + u2)
        assert apply_unipotent(apply_unipotent(p, u1), u1.inverse()) == p
        g1, g2 = _random_gl2(q), _random_gl2(q)
        # substitution p(g.(x, y)) composes contravariantly
        assert apply_gl2(apply_gl2(p, g1), g2) == apply_gl2(p, g1 @ g2)
        assert apply_gl2(apply_gl2(p, g1), g1.inverse()) == p


def test_z_degree_range_examples():
    assert z_degree_range(P("z^2")) == (2, 2)
    assert z_degree_range(P("x^4 + z^2")) == (0, 2)
    assert z_degree_range(P("x^2*z + x*y*z")) == (1, 1)


def test_kmax_is_u_invariant():
    rng = random.Random(9)
    for p in corpus(6, 20, seed=4):
        u = UnipotentElement(*(Fraction(rng.randint(-3, 3)) for _ in range(3)))
        assert z_degree_range(apply_unipotent(p, u))[1] == z_degree_range(p)[1]


def test_section_multiplicity_examples():
    assert section_multiplicity(P("z^2 - 2*x^2*z + x^4")) == 2
    assert section_multiplicity(P("z^2 - x^2*y^2")) == 1
    assert section_multiplicity(P("z^2 + x^4")) == 1
    assert section_multiplicity(P("x^4 + y^4")) == 0


def test_section_multiplicity_properties():
    rng = random.Random(1)
    for p in corpus(4, 15, seed=6):
        M = section_multiplicity(p)
        u = UnipotentElement(*(Fraction(rng.randint(-2, 2)) for _ in range(3)))
        assert section_multiplicity(apply_unipotent(p, u)) == M
        assert 0 <= M <= z_degree_range(p)[1]
        w = section_witness(p, M)
        if w is not None:
            # after z -> z + q the polynomial is divisible by z^M
            assert z_degree_range(apply_unipotent(p, w))[0] >= M
    # constructed product (z - q)^2 * (z - q') has multiplicity 2
    q = P("z - x^2 + 3*x*y")
    q2 = P("z + y^2")
    assert section_multiplicity(q * q * q2) == 2


def test_binary_roots_examples():
    roots, residual = binary_form_rational_roots({(2, 1): 1})
    assert sorted(roots) == [((0, 1), 2), ((1, 0), 1)]
    roots, residual = binary_form_rational_roots({(2, 0): 1, (0, 2): 1})
    assert roots == [] and residual == {(2, 0): 1, (0, 2): 1}
    roots, _ = binary_form_rational_roots({(2, 0): 1, (1, 1): -3, (0, 2): 2})
    assert roots == [((1, 1), 1), ((2, 1), 1)]


def test_parse_examples_and_errors():
    assert P("z^2 - x^2*y^2", 4).terms == {(0, 0, 2): 1, (2, 2, 0): -1}
    with pytest.raises(ValueError, match="x"):
        P("x + y", 4)
    with pytest.raises(ZeroPolynomialError):
        P("x^4 - x^4", 4)
    with pytest.raises(PolynomialSyntaxError):
        P("x^4 +* y", 4)
    assert P("1/2*x^2 + 3*z", 2).terms == {(2, 0, 0): Fraction(1, 2), (0, 0, 1): 3}


def test_round_trip():
    for d in (2, 4, 6, 8):
        for p in corpus(d, 50, seed=d):
            assert P(p.to_str(), d) == p
            assert WeightedPolynomial.from_json(p.to_json()) == p
