from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from oracles import corpus, independent_h_check
from gitkit.nonreductive import (
    HLinearisation,
    HUndecided,
    UndecidedError,
    central_test,
    classify_corpus,
    default_uhat_grid,
    h_oracle,
    h_test,
    h_walls,
    uhat_oracle,
    uhat_test,
    verify_h_certificate,
)
from gitkit.torus import OddDegreeError
from gitkit.verdict import Status
from gitkit.weighted import (
    GL2Element,
    UnipotentElement,
    WeightedPolynomial,
    apply_gl2,
    apply_unipotent,
    monomial_basis,
    parse_polynomial,
)

P = parse_polynomial
FULL4 = WeightedPolynomial(4, {m: 1 for m in monomial_basis(4)})


# -- U^ -----------------------------------------------------------------------


def test_uhat_examples():
    v = uhat_test(P("z^2"), HLinearisation(4, 2))
    assert v.status is Status.STRICTLY_SEMISTABLE and v.endpoint_caveat
    assert (v.certificate["M"], v.certificate["k_max"]) == (2, 2)
    v = uhat_test(FULL4, HLinearisation(4, 0))
    assert v.status is Status.STABLE and (v.certificate["M"], v.certificate["k_max"]) == (0, 2)
    assert uhat_test(P("x^4"), HLinearisation(4, 0)).status is Status.UNSTABLE
    v = uhat_test(P("x^2*z"), HLinearisation(4, 0))
    assert v.status is Status.STRICTLY_SEMISTABLE
    assert (v.certificate["M"], v.certificate["k_max"]) == (1, 1)


def test_uhat_oracle_examples():
    assert uhat_oracle(P("z^2"), HLinearisation(4, 0)).status is Status.UNSTABLE
    p = P("x^3*y + z^2 - x*y*z")
    for delta in (-1, 0, 1):
        lin = HLinearisation(4, delta)
        only_id = uhat_oracle(p, lin, grid=[UnipotentElement()])
        assert only_id.status is central_test(p, lin).status


def test_uhat_unstable_certificates():
    for p in corpus(4, 60, seed=21):
        for delta in (-1, 0, 1):
            lin = HLinearisation(4, delta)
            v = uhat_test(p, lin)
            if v.status is not Status.UNSTABLE:
                continue
            cert = v.certificate
            if cert["u"] is not None:
                u = UnipotentElement(*(Fraction(x) for x in cert["u"]))
                moved = central_test(apply_unipotent(p, u), lin)
                assert moved.status is Status.UNSTABLE
                assert moved.certificate["covector"] == [cert["central_covector"]]


def test_uhat_is_u_invariant():
    rng = random.Random(3)
    for p in corpus(4, 40, seed=5):
        u = UnipotentElement(*(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(3)))
        for delta in (-1, 0, Fraction(1, 2)):
            lin = HLinearisation(4, delta)
            assert uhat_test(apply_unipotent(p, u), lin).status is uhat_test(p, lin).status


def test_irrational_section_certificate():
    # z^2 + x^4 = (z - i x^2)(z + i x^2): M = 1 but no rational section
    v = uhat_test(P("z^2 + x^4"), HLinearisation(4, Fraction(-3, 2)))
    assert v.status is Status.UNSTABLE
    assert v.certificate["u"] is None and v.certificate["u_numeric"] is not None


# -- H ------------------------------------------------------------------------


def test_h_examples():
    for p in (FULL4, P("z^2"), P("x^4"), P("x*y*z + y^4")):
        v = h_test(p, HLinearisation(4, 3))
        assert v.status is Status.UNSTABLE
    assert h_test(FULL4, HLinearisation(4, 0)).status is Status.STABLE
    v = h_test(P("z^2"), HLinearisation(4, 0))
    assert v.status is Status.UNSTABLE and v.certificate["stage"] == "central"


def test_h_endpoint_caveat():
    v = h_test(P("z^2"), HLinearisation(4, 2))
    assert v.status is Status.UNSTABLE and v.endpoint_caveat
    assert v.certificate["hilbert_mumford_status"] == "StrictlySemistable"


def test_h_oracle_examples():
    lin = HLinearisation(4, 0)
    p = P("x^3*y + y^4 - z^2 + 2*x*y*z")
    assert h_oracle(p, lin, samples=1).status is central_or_tc(p, lin)
    assert h_oracle(P("x*y*z"), lin, samples=500).status.semistable
    assert h_test(P("x*y*z"), lin).status.semistable
    assert h_oracle(P("x^3*y"), lin, samples=500).status is Status.UNSTABLE


def central_or_tc(p, lin):
    from gitkit.torus import tc_test

    return tc_test(p, lin.delta).status


def test_h_certificates_and_invariants():
    g = GL2Element(((2, 1), (1, -1)))
    u = UnipotentElement(1, -2, Fraction(1, 2))
    for p in corpus(4, 25, seed=31):
        for delta in (-1, 0, 1):
            lin = HLinearisation(4, delta)
            v = h_test(p, lin)
            uv = uhat_test(p, lin)
            if uv.status is Status.UNSTABLE:
                assert v.status is Status.UNSTABLE
            if v.status is Status.STABLE:
                assert uv.status is Status.STABLE
            if v.status.semistable:
                assert uv.status.semistable
            if v.status is Status.UNSTABLE:
                assert verify_h_certificate(p, lin, v.certificate)
                assert independent_h_check(p, lin, v.certificate)
            moved = apply_unipotent(apply_gl2(p, g), u)
            assert h_test(moved, lin).status is v.status


def test_nonrational_h_witness():
    p = P("z^2 + x^4")
    lin = HLinearisation(4, 1)
    v = h_test(p, lin)
    assert v.status is Status.UNSTABLE
    assert verify_h_certificate(p, lin, v.certificate)
    assert independent_h_check(p, lin, v.certificate)


def test_h_oracle_sound_on_stable():
    for p in corpus(4, 12, seed=41):
        for delta in (-1, 0, 1):
            lin = HLinearisation(4, delta)
            if h_test(p, lin).status is Status.STABLE:
                assert h_oracle(p, lin, samples=200, seed=delta + 5).status is Status.STABLE


def test_outside_range_always_unstable():
    for p in corpus(4, 15, seed=51) + [WeightedPolynomial.monomial(*m) for m in monomial_basis(4)]:
        for delta in (Fraction(-5, 2), 3):
            assert h_test(p, HLinearisation(4, delta)).status is Status.UNSTABLE


def test_budget_exhaustion_is_loud():
    with pytest.raises(HUndecided) as exc:
        h_test(P("z^2 + x^3*y + x*y^3 + x^2*z"), HLinearisation(4, 0), budget=0)
    assert isinstance(exc.value, UndecidedError)
    assert exc.value.partial


def test_walls():
    t = h_walls(4)
    assert t.walls == (-2, 0, 2)
    assert (t.endpoint_lo, t.endpoint_hi) == (-2, 2)
    assert h_walls(2).walls == (-1, 1)
    assert t.classify(2) == "endpoint"
    assert t.classify(0) == "wall"
    assert t.classify(3) == "outside"
    assert t.classify(Fraction(1, 2)) == "chamber (0, 2)"
    with pytest.raises(OddDegreeError):
        h_walls(3)


def test_uhat_constant_on_chambers():
    t = h_walls(4)
    polys = [WeightedPolynomial.monomial(*m) for m in monomial_basis(4)] + corpus(4, 30, seed=61)
    for lo, hi in zip(t.walls, t.walls[1:]):
        d1, d2 = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3
        for p in polys:
            assert uhat_test(p, HLinearisation(4, d1)).status is uhat_test(p, HLinearisation(4, d2)).status


def test_linearisation_validation():
    with pytest.raises(OddDegreeError):
        HLinearisation(3, 0)
    with pytest.raises(ValueError):
        HLinearisation(0, 0)
    with pytest.raises(ValueError):
        uhat_test(P("x^2"), HLinearisation(4, 0))


def test_classify_corpus_example():
    polys = [P("z^2"), P("x^4"), FULL4]
    rep = classify_corpus(polys, [-3, 0, 2])
    statuses = [[c["status"] for c in row] for row in rep.cells]
    assert statuses == [
        ["Unstable", "Unstable", "Unstable"],
        ["Unstable", "Unstable", "Unstable"],
        ["Unstable", "Stable", "Unstable"],
    ]
    assert rep.cells[0][2]["endpoint_caveat"]
    assert rep.walls["0"] == "wall"
    json.dumps(rep.to_json())
    again = classify_corpus(polys, [-3, 0, 2], jobs=2)
    assert again.to_json() == rep.to_json()


def test_classify_empty_corpus():
    rep = classify_corpus([], [0, 1])
    assert rep.cells == [] and rep.to_json()["matrix"] == []


def test_monomial_windows_are_intervals():
    deltas = [Fraction(k, 4) for k in range(-8, 9)]
    polys = [WeightedPolynomial.monomial(*m) for m in monomial_basis(4)]
    rep = classify_corpus(polys, deltas, test="uhat")
    for row in rep.cells:
        ss = [i for i, c in enumerate(row) if c["status"] != "Unstable"]
        assert ss == list(range(ss[0], ss[-1] + 1)) if ss else True
