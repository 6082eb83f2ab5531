from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest

from gitkit.hull import (
    LPResult,
    Position,
    WeightPointSet,
    hull_vertices_2d,
    lp_maximize,
    separating_covector,
    supporting_covector,
    zero_position,
)


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _origin_in_simplex(pts) -> bool:
    """Brute force for at most three planar points."""
    if len(pts) == 1:
        return pts[0] == (0, 0)
    if len(pts) == 2:
        a, b = pts
        if _cross(a, b) != 0:
            return False
        return a[0] * b[0] + a[1] * b[1] <= 0
    a, b, c = pts
    s = [_cross(a, b), _cross(b, c), _cross(c, a)]
    if all(v == 0 for v in s):
        return any(_origin_in_simplex(list(p)) for p in combinations(pts, 2))
    return all(v >= 0 for v in s) or all(v <= 0 for v in s)


def _brute_position(pts) -> Position:
    # Caratheodory: 0 in the hull iff it is in the hull of at most 3 of the points
    inside = any(_origin_in_simplex(list(sub)) for k in (1, 2, 3) for sub in combinations(pts, k))
    if not inside:
        return Position.OUTSIDE
    # a closed half-plane through 0 holding every point can be rotated until
    # its boundary hits a point, so these candidate normals suffice
    cands = [(1, 0), (-1, 0), (0, 1), (0, -1)]
    for p in pts:
        cands += [(-p[1], p[0]), (p[1], -p[0])]
    for n in cands:
        if n != (0, 0) and all(n[0] * p[0] + n[1] * p[1] >= 0 for p in pts):
            return Position.BOUNDARY
    return Position.INTERIOR


def _random_points(rng, k, lo=-3, hi=3):
    return [(Fraction(rng.randint(lo, hi)), Fraction(rng.randint(lo, hi))) for _ in range(k)]


def test_spec_examples():
    assert zero_position(WeightPointSet(1, [3, -1])) is Position.INTERIOR
    assert zero_position(WeightPointSet(2, [(0, 0)])) is Position.BOUNDARY
    assert zero_position(WeightPointSet(2, [(1, 0), (0, 1)])) is Position.OUTSIDE


def test_against_brute_force_on_all_subsets():
    rng = random.Random(11)
    for _ in range(60):
        base = _random_points(rng, 6)
        for k in range(1, 7):
            for sub in combinations(base, k):
                ws = WeightPointSet(2, sub)
                pos = zero_position(ws)
                assert pos is _brute_position(list(ws.points)), sub
                if pos is Position.OUTSIDE:
                    r = separating_covector(ws)
                    assert all(r[0] * p[0] + r[1] * p[1] > 0 for p in ws.points)
                else:
                    assert separating_covector(ws) is None
                if pos is Position.BOUNDARY:
                    r = supporting_covector(ws)
                    assert r != (0, 0)
                    assert all(r[0] * p[0] + r[1] * p[1] >= 0 for p in ws.points)
                if pos is Position.INTERIOR:
                    assert supporting_covector(ws) is None


def test_rank_one_and_three():
    assert zero_position(WeightPointSet(1, [2, 5])) is Position.OUTSIDE
    assert separating_covector(WeightPointSet(1, [-2, -5])) == (-1,)
    assert zero_position(WeightPointSet(1, [0, 5])) is Position.BOUNDARY
    cube = [(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]
    assert zero_position(WeightPointSet(3, cube)) is Position.INTERIOR
    assert zero_position(WeightPointSet(3, [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)])) is Position.BOUNDARY
    ws = WeightPointSet(3, [(1, 2, 3), (0, 1, 1), (2, -1, 1)])
    r = separating_covector(ws)
    assert all(sum(a * b for a, b in zip(r, p)) > 0 for p in ws.points)


def test_hull_vertices_against_brute_force():
    rng = random.Random(4)
    for _ in range(200):
        ws = WeightPointSet(2, _random_points(rng, rng.randint(3, 8), -5, 5))
        pts = list(ws.points)
        verts = hull_vertices_2d(ws)
        if all(_cross((b[0] - a[0], b[1] - a[1]), (c[0] - a[0], c[1] - a[1])) == 0
               for a, b, c in combinations(pts, 3)):
            continue  # collinear input

        def is_vertex(p):
            # p lies in the hull of the others iff 0 lies in the hull of q - p
            others = [(q[0] - p[0], q[1] - p[1]) for q in pts if q != p]
            return not any(_origin_in_simplex(list(sub))
                           for k in (2, 3) for sub in combinations(others, k))

        assert set(verts) == {p for p in pts if is_vertex(p)}


def test_lp_statuses():
    # maximize x subject to x + y = 1, x, y >= 0
    st, val, x = lp_maximize([[Fraction(1), Fraction(1)]], [Fraction(1)], [Fraction(1), Fraction(0)])
    assert st is LPResult.OPTIMAL and val == 1
    st, _, _ = lp_maximize([[Fraction(1)], [Fraction(1)]], [Fraction(1), Fraction(2)], [Fraction(0)])
    assert st is LPResult.INFEASIBLE
    st, _, _ = lp_maximize([[Fraction(1), Fraction(-1)]], [Fraction(0)], [Fraction(1), Fraction(0)])
    assert st is LPResult.UNBOUNDED


def test_input_validation():
    with pytest.raises(ValueError):
        WeightPointSet(4, [(0, 0, 0, 0)])
    with pytest.raises(ValueError):
        WeightPointSet(2, [(1,)])
    with pytest.raises(ValueError):
        zero_position(WeightPointSet(2, []))
