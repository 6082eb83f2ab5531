from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement, product

import pytest
import sympy

from gitkit.envelope import (
    NilpotentRep,
    NotNilpotentError,
    ThetaSpec,
    binary_form_translation,
    check_mixed_relation,
    check_psi_equivariance,
    derived_flag,
    exp_nilpotent,
    families_equal_at,
    glr_act_wm,
    psi_component,
    psi_evaluate,
    psi_family,
    random_point,
    sl2_complete,
    theta_dim,
    u_act_wm,
    wm_descriptor,
    xd_nilpotent_rep,
)
from gitkit.linalg import commutator, identity, inverse, matmul, scale, zeros


def shift(n: int):
    """e_{i+1} -> e_i, so e_1 spans the kernel."""
    return [[Fraction(int(j == i + 1)) for j in range(n)] for i in range(n)]


def block_diag(*blocks):
    n = sum(len(b) for b in blocks)
    out = zeros(n)
    pos = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, v in enumerate(row):
                out[pos + i][pos + j] = Fraction(v)
        pos += len(b)
    return out


R2_EXAMPLE = NilpotentRep(2, 3, [shift(3), matmul(shift(3), shift(3))])
R2_SECOND = NilpotentRep(2, 4, [block_diag(shift(2), shift(2)), [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]]])


def test_derived_flag_examples():
    for n in range(1, 6):
        assert derived_flag(NilpotentRep(1, n + 1, [shift(n + 1)])).dims == tuple(range(n + 1, -1, -1))
    assert derived_flag(NilpotentRep(1, 3, [zeros(3)])).dims == (3, 0)


def test_derived_flag_d4_against_sympy():
    rep = xd_nilpotent_rep(4)
    dims = derived_flag(rep).dims
    mats = [sympy.Matrix(g) for g in rep.matrices]
    expected = [9]
    k = 1
    while expected[-1]:
        words = [sympy.prod(w, start=sympy.eye(9)) for w in product(mats, repeat=k)]
        expected.append(sympy.Matrix.hstack(*words).rank())
        k += 1
    assert dims == tuple(expected) == (9, 8, 5, 0)


def _brute_theta(r, dimV, j):
    D = r * (dimV - 1) - (r - 1) * j
    M = r * r * (dimV - 1)
    if M == 0:
        monos = 1 if D == 0 else 0
    else:
        monos = sum(1 for _ in combinations_with_replacement(range(M), D))
    # multilinear in j vectors of C^r
    return monos * len(list(product(range(r), repeat=j)))


def test_theta_dim_examples_and_brute_force():
    assert theta_dim(ThetaSpec(1, 2, 0)) == 1
    assert {theta_dim(ThetaSpec(1, 3, j)) for j in range(3)} == {3}
    for r in (1, 2, 3):
        assert theta_dim(ThetaSpec(r, 1, 0)) == 1
    for r in (1, 2):
        for dimV in range(1, 5):
            for j in range(dimV):
                assert theta_dim(ThetaSpec(r, dimV, j)) == _brute_theta(r, dimV, j)


def test_wm_descriptor_examples():
    w = wm_descriptor(NilpotentRep(1, 2, [shift(2)]))
    assert w.components == ((1, 2), (1, 1)) and w.total == 3
    z = wm_descriptor(NilpotentRep(1, 1, [zeros(1)]))
    assert z.components == ((1, 1),)
    big = wm_descriptor(xd_nilpotent_rep(4))
    dims = derived_flag(xd_nilpotent_rep(4)).dims
    assert big.total == sum(theta_dim(ThetaSpec(3, 9, j)) * (dims[j] if j < len(dims) else 0) for j in range(9))


def test_psi_examples():
    rep = NilpotentRep(1, 2, [shift(2)])
    e1, e2 = [1, 0], [0, 1]
    for h in (Fraction(2), Fraction(-1, 3)):
        hs = [[[h]]]
        assert psi_component(rep, e1, 1, [[Fraction(5)]], hs) == [0, 0]
        assert psi_component(rep, e2, 0, [], hs) == [0, h]
        u = Fraction(3, 2)
        assert psi_component(rep, e2, 1, [[u]], hs) == [u * h, 0]
    rep3 = NilpotentRep(2, 3, R2_EXAMPLE.generators)
    ident = [[1, 0], [0, 1]]
    v = [Fraction(1), Fraction(-2), Fraction(5)]
    assert psi_evaluate(rep3, v, [[1, 2], [3, 4]], [ident, ident])[0] == v


def test_u_action_trivial_cases():
    rng = random.Random(1)
    for rep in (NilpotentRep(1, 3, [shift(3)]), R2_EXAMPLE):
        alpha = psi_family(rep, [Fraction(1)] * rep.dimV)
        us, hs = random_point(rep, rng)
        zero = u_act_wm(rep, [0] * rep.r, alpha)
        for j in range(rep.dimV):
            assert all(x == 0 for x in zero[j](us[:j], hs))
        only0 = [alpha[0]] + [lambda us, hs, n=rep.dimV: [Fraction(0)] * n for _ in range(rep.dimV - 1)]
        moved = u_act_wm(rep, [Fraction(2)] * rep.r, only0)
        for j in range(rep.dimV):
            assert all(x == 0 for x in moved[j](us[:j], hs))


def test_psi_equivariance():
    for rep in (NilpotentRep(1, 2, [shift(2)]), NilpotentRep(1, 3, [shift(3)]), R2_EXAMPLE, R2_SECOND):
        rep_out = check_psi_equivariance(rep, trials=50, seed=7)
        assert rep_out.passed and rep_out.checks == 50 * rep.dimV


def _random_invertible(rng, r):
    from gitkit.linalg import det

    while True:
        g = [[Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(r)] for _ in range(r)]
        if det(g) != 0:
            return g


def test_glr_composition_law():
    rng = random.Random(5)
    for rep in (R2_EXAMPLE, R2_SECOND):
        alpha = psi_family(rep, [Fraction(rng.randint(-3, 3)) for _ in range(rep.dimV)])
        for _ in range(20):
            g1, g2 = _random_invertible(rng, 2), _random_invertible(rng, 2)
            us, hs = random_point(rep, rng)
            left = glr_act_wm(rep, g1, glr_act_wm(rep, g2, alpha))
            assert not families_equal_at(rep, left, glr_act_wm(rep, matmul(g1, g2), alpha), us, hs)
            lit = glr_act_wm(rep, g1, glr_act_wm(rep, g2, alpha, "literal"), "literal")
            assert not families_equal_at(rep, lit, glr_act_wm(rep, matmul(g2, g1), alpha, "literal"), us, hs)
            ident = glr_act_wm(rep, identity(2), alpha)
            assert not families_equal_at(rep, ident, alpha, us, hs)


def test_mixed_relation():
    assert check_mixed_relation(R2_EXAMPLE, trials=20, seed=3).passed
    assert not check_mixed_relation(R2_EXAMPLE, trials=20, seed=3, convention="literal").passed


def test_rep_validation():
    with pytest.raises(NotNilpotentError):
        NilpotentRep(1, 2, [[[1, 0], [0, 0]]])
    with pytest.raises(ValueError):
        NilpotentRep(2, 2, [shift(2), [[0, 0], [1, 0]]])
    with pytest.raises(ValueError):
        NilpotentRep(2, 2, [shift(2)])


# -- sl2 ----------------------------------------------------------------------------


def _check_triple(t):
    e, h, f = t.e, t.h, t.f
    assert commutator(h, e) == scale(e, 2)
    assert commutator(h, f) == scale(f, -2)
    assert commutator(e, f) == h


def test_sl2_examples():
    t = sl2_complete(shift(2))
    assert t.h == [[1, 0], [0, -1]] and t.f == [[0, 0], [1, 0]]
    t = sl2_complete(block_diag(shift(3), shift(2)))
    assert t.block_sizes == (3, 2) and t.h_block == (2, 0, -2, 1, -1)
    _check_triple(t)
    t = sl2_complete(zeros(3))
    assert t.block_sizes == (1, 1, 1) and t.h == zeros(3) and t.f == zeros(3)


def test_sl2_brackets_for_jordan_types():
    rng = random.Random(9)
    for sizes in ((2,), (3, 2), (4, 1)):
        e0 = block_diag(*[shift(k) for k in sizes])
        n = len(e0)
        # conjugate by a random invertible matrix so the basis is not the Jordan one
        P = _random_invertible(rng, n)
        e = matmul(matmul(P, e0), inverse(P))
        t = sl2_complete(e)
        assert sorted(t.block_sizes, reverse=True) == list(sizes)
        _check_triple(t)


def test_exp_reproduces_translation():
    for n in (1, 2, 3, 4):
        # y d/dx sends x^(n-a) y^a to (n-a) x^(n-a-1) y^(a+1)
        gen = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
        for a in range(n):
            gen[a + 1][a] = Fraction(n - a)
        for t in (Fraction(1), Fraction(-2, 3), Fraction(5)):
            assert exp_nilpotent(gen, t) == binary_form_translation(n, t)
        _check_triple(sl2_complete(gen))
