"""Hilbert-Mumford tests for linearized torus actions.

A point is semistable (stable) for a torus acting diagonally iff the origin
lies in the convex hull (its interior) of the weights of the nonzero
coordinates, each shifted by the character twist.  This module also covers
variation of the twist for C*, the T_c weights on X_d, and the product-space
tests on P^12 x Y_d used for the reductive envelope of the U-action.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .hull import (
    Position,
    WeightPointSet,
    hull_vertices_2d,
    separating_covector,
    supporting_covector,
    zero_position,
)
from .linalg import nullspace, primitive_integer_vector, rank, to_matrix
from .poly import MPoly, as_fraction, format_fraction
from .verdict import StabilityVerdict, Status
from .weighted import Monomial, WeightedPolynomial, monomial_basis


@dataclass(frozen=True)
class TorusLinearisation:
    rank: int
    weights: tuple[tuple[Fraction, ...], ...]
    twist: tuple[Fraction, ...]

    def __init__(self, rank: int, weights: Iterable, twist: Iterable | None = None):
        ws = []
        for w in weights:
            if isinstance(w, (int, Fraction, str)):
                w = (w,)
            w = tuple(as_fraction(v) for v in w)
            if len(w) != rank:
                raise ValueError(f"weight {w} does not have length {rank}")
            ws.append(w)
        tw = tuple(as_fraction(v) for v in (twist if twist is not None else [0] * rank))
        if len(tw) != rank:
            raise ValueError("twist length must equal the rank")
        if rank < 1:
            raise ValueError("rank must be positive")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "weights", tuple(ws))
        object.__setattr__(self, "twist", tw)

    def shifted(self, index: int) -> tuple[Fraction, ...]:
        return tuple(a + b for a, b in zip(self.weights[index], self.twist))

    def support_points(self, coords: Iterable[int]) -> WeightPointSet:
        """Unshifted weights of the given coordinate indices."""
        return WeightPointSet(self.rank, [self.weights[i] for i in coords])

    def with_twist(self, twist) -> "TorusLinearisation":
        return TorusLinearisation(self.rank, self.weights, twist)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "weights": [[format_fraction(v) for v in w] for w in self.weights],
            "twist": [format_fraction(v) for v in self.twist],
        }

    @classmethod
    def from_json(cls, obj) -> "TorusLinearisation":
        return cls(int(obj["rank"]), obj["weights"], obj.get("twist"))


def _as_points(points: WeightPointSet | Iterable, dim: int) -> WeightPointSet:
    if isinstance(points, WeightPointSet):
        return points
    return WeightPointSet(dim, points)


def hull_verdict(points: WeightPointSet) -> StabilityVerdict:
    """Verdict for already-shifted weights."""
    pos = zero_position(points)
    if pos is Position.INTERIOR:
        return StabilityVerdict(Status.STABLE)
    if pos is Position.BOUNDARY:
        cov = supporting_covector(points)
        return StabilityVerdict(
            Status.STRICTLY_SEMISTABLE,
            {"supporting_covector": list(cov)} if cov else None,
        )
    cov = separating_covector(points)
    return StabilityVerdict(Status.UNSTABLE, {"covector": list(cov)})


def torus_test(support: WeightPointSet | Iterable, lin: TorusLinearisation) -> StabilityVerdict:
    """Hilbert-Mumford verdict for unshifted support weights under ``lin``.

    ``support`` holds the weights of the coordinates that are nonzero; the
    twist is added here.  Unstable verdicts carry a primitive covector that is
    strictly positive on every shifted weight.
    """
    pts = _as_points(support, lin.rank)
    if not pts.points:
        raise ValueError("empty support")
    shifted = WeightPointSet(
        lin.rank, [tuple(a + b for a, b in zip(p, lin.twist)) for p in pts.points]
    )
    return hull_verdict(shifted)


def coordinate_test(coords: Iterable[int], lin: TorusLinearisation) -> StabilityVerdict:
    """torus_test for the point whose nonzero coordinates are ``coords``."""
    coords = list(coords)
    if not coords:
        raise ValueError("empty support")
    return torus_test(lin.support_points(coords), lin)


# -- variation of GIT for C* ---------------------------------------------------


@dataclass(frozen=True)
class Chamber:
    lower: Fraction
    upper: Fraction
    sample: Fraction
    positive: tuple[int, ...]
    negative: tuple[int, ...]

    def semistable(self, coords: Iterable[int]) -> bool:
        s = set(coords)
        return bool(s & set(self.positive)) and bool(s & set(self.negative))

    def to_json(self) -> dict:
        return {
            "interval": [format_fraction(self.lower), format_fraction(self.upper)],
            "sample": format_fraction(self.sample),
            "positive_coordinates": list(self.positive),
            "negative_coordinates": list(self.negative),
            "rule": "semistable = stable iff the support meets both coordinate lists",
        }


@dataclass(frozen=True)
class ChamberDecomposition:
    walls: tuple[Fraction, ...]
    chambers: tuple[Chamber, ...]

    def locate(self, delta) -> Chamber | Fraction | None:
        """The wall equal to ``delta``, the chamber containing it, or None."""
        delta = as_fraction(delta)
        if delta in self.walls:
            return delta
        for c in self.chambers:
            if c.lower < delta < c.upper:
                return c
        return None

    def to_json(self) -> dict:
        return {
            "walls": [format_fraction(w) for w in self.walls],
            "chambers": [c.to_json() for c in self.chambers],
        }


def vgit_chambers(lin: TorusLinearisation) -> ChamberDecomposition:
    """Walls and chambers in the twist line for a rank-1 linearisation.

    Walls are the twists making some weight zero.  Between consecutive walls
    the semistable set is constant and equal to the stable set; outside the
    outermost walls it is empty, so only bounded chambers are listed.
    """
    if lin.rank != 1:
        raise ValueError("vgit_chambers handles rank 1; use wall_hyperplanes for rank 2")
    ws = [w[0] for w in lin.weights]
    walls = tuple(sorted({-w for w in ws}))
    chambers = []
    for lo, hi in zip(walls, walls[1:]):
        mid = (lo + hi) / 2
        pos = tuple(i for i, w in enumerate(ws) if w + mid > 0)
        neg = tuple(i for i, w in enumerate(ws) if w + mid < 0)
        chambers.append(Chamber(lo, hi, mid, pos, neg))
    return ChamberDecomposition(walls, tuple(chambers))


def wall_hyperplanes(lin: TorusLinearisation) -> list[tuple[tuple[int, ...], Fraction]]:
    """Rank-2 twist walls: lines {delta : <n, delta> = c} through a shifted-weight coincidence.

    A wall is where some pair of weights becomes collinear with the origin,
    i.e. delta lies on the line through -w_a and -w_b, plus the points -w_a.
    Returned as (primitive normal n, offset c) pairs, deduplicated.
    """
    if lin.rank != 2:
        raise ValueError("rank-2 only")
    out = set()
    pts = sorted({w for w in lin.weights})
    for a, b in combinations(pts, 2):
        direction = (b[0] - a[0], b[1] - a[1])
        normal = primitive_integer_vector((-direction[1], direction[0]))
        if normal[0] < 0 or (normal[0] == 0 and normal[1] < 0):
            normal = (-normal[0], -normal[1])
        offset = -(normal[0] * a[0] + normal[1] * a[1])
        out.add((normal, offset))
    return sorted(out, key=lambda t: (t[0], t[1]))


# -- T_c weights on X_d --------------------------------------------------------


class OddDegreeError(ValueError):
    def __init__(self, d: int):
        super().__init__(
            f"d={d} is odd: multiply the polynomial by x to work in degree {d + 1}"
        )


def tc_weight_map(d: int, delta) -> dict[Monomial, tuple[Fraction, Fraction]]:
    """Weight (i - k + delta, j - k + delta) of each basis monomial."""
    if d % 2:
        raise OddDegreeError(d)
    delta = as_fraction(delta)
    return {(i, j, k): (i - k + delta, j - k + delta) for (i, j, k) in monomial_basis(d)}


def tc_points(p: WeightedPolynomial, delta) -> WeightPointSet:
    wmap = tc_weight_map(p.d, delta)
    return WeightPointSet(2, [wmap[m] for m in p.terms])


def tc_test(p: WeightedPolynomial, delta) -> StabilityVerdict:
    """Plain T_c(GL2) hull test of one polynomial (no group quantifier)."""
    if p.is_zero():
        raise ValueError("zero input")
    return hull_verdict(tc_points(p, delta))


def tc_triangle(d: int, delta) -> list[tuple[Fraction, Fraction]]:
    pts = WeightPointSet(2, tc_weight_map(d, delta).values())
    return hull_vertices_2d(pts)


def central_weight(mono: Monomial, d: int, delta) -> Fraction:
    """Weight d - 4k + 2 delta of the central C* on a monomial."""
    return d - 4 * mono[2] + 2 * as_fraction(delta)


# -- P^12 x Y_d ----------------------------------------------------------------


@dataclass(frozen=True)
class P12Point:
    a0: Fraction
    a: tuple[tuple[Fraction, ...], ...]

    def __init__(self, a0, a: Sequence[Sequence]):
        mat = tuple(tuple(as_fraction(v) for v in row) for row in a)
        if len(mat) != 3 or any(len(r) != 4 for r in mat):
            raise ValueError("a must be a 3x4 matrix")
        a0 = as_fraction(a0)
        if a0 == 0 and all(v == 0 for r in mat for v in r):
            raise ValueError("not a projective point: all 13 coordinates vanish")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a", mat)

    def column_nonzero(self, c: int) -> bool:
        return any(self.a[r][c] != 0 for r in range(3))

    @classmethod
    def base(cls) -> "P12Point":
        return cls(1, [[0] * 4] * 3)

    @classmethod
    def iota(cls, q: int = 3) -> "P12Point":
        mat = [[int(r == c and r < q) for c in range(4)] for r in range(3)]
        return cls(1, mat)


def rank_stratum(a: P12Point) -> int:
    return rank(to_matrix(a.a))


def chi(c: int) -> tuple[int, int, int]:
    """chi_1..chi_4 in the (chi_1, chi_2, chi_3) basis."""
    if c == 4:
        return (-1, -1, -1)
    v = [0, 0, 0]
    v[c - 1] = 1
    return tuple(v)


def y_weight(mono4: tuple[int, int, int, int]) -> tuple[int, int, int]:
    i, j, k, l = mono4
    return (i - l, j - l, k - l)


def y_monomials(half_degree: int) -> list[tuple[int, int, int, int]]:
    n = half_degree
    return [
        (i, j, k, n - i - j - k)
        for i in range(n + 1)
        for j in range(n + 1 - i)
        for k in range(n + 1 - i - j)
    ]


def n_star(d: int) -> int:
    """Sufficient N: 1 + diameter (2d) of the Y_d weights under the chi-pairings."""
    return 2 * d + 1


def product_weight_set(
    a: P12Point, ysupport: Iterable[tuple[int, int, int, int]], N: int, delta=0
) -> WeightPointSet:
    ysupport = list(ysupport)
    delta = as_fraction(delta)
    # twist (delta/2)(chi1 + chi2 + chi3 - chi4) = delta * (1, 1, 1) on T_c
    base = [tuple(Fraction(x) + delta for x in y_weight(m)) for m in ysupport]
    pts = []
    if a.a0 != 0:
        pts.extend(base)
    for c in range(1, 5):
        if a.column_nonzero(c - 1):
            ch = chi(c)
            pts.extend(tuple(N * ch[t] + w[t] for t in range(3)) for w in base)
    return WeightPointSet(3, pts)


def product_torus_test(
    a: P12Point, ysupport: Iterable[tuple[int, int, int, int]], N: int, delta=0
) -> StabilityVerdict:
    """T_c hull test on P^12 x Y_d with linearisation O(N) x O(1).

    With a0 = 0 and N >= n_star(d) the point is SL(4)-unstable: a rational
    kernel vector of (a_ij) gives g in SL(4) zeroing the fourth column, after
    which every weight pairs positively with (1, 1, 1).  That verdict is
    returned with g as witness.  Otherwise the T_c verdict is returned.
    """
    ysupport = sorted(set(tuple(int(v) for v in m) for m in ysupport))
    if not ysupport:
        raise ValueError("empty ysupport")
    degs = {sum(m) for m in ysupport}
    if len(degs) != 1:
        raise ValueError("ysupport monomials must share one degree d/2")
    d = 2 * degs.pop()
    if N <= 0:
        raise ValueError("N must be positive")
    notes = []
    if N < n_star(d):
        notes.append(f"N={N} is below the sufficient bound N*={n_star(d)}")
    if a.a0 == 0 and N >= n_star(d):
        g = _zero_fourth_column(a)
        return StabilityVerdict(
            Status.UNSTABLE,
            {
                "criterion": "a0 = 0",
                "g": [[format_fraction(v) for v in row] for row in g],
                "covector": [1, 1, 1],
            },
            notes=tuple(notes),
        )
    verdict = hull_verdict(product_weight_set(a, ysupport, N, delta))
    return StabilityVerdict(verdict.status, verdict.certificate, notes=tuple(notes))


def _zero_fourth_column(a: P12Point) -> list[list[Fraction]]:
    """g in SL(4, Q) whose 4th column spans a kernel vector of (a_ij), so a g has last column 0."""
    kernel = nullspace(to_matrix(a.a))
    v = kernel[0]
    # complete v to a basis: take standard vectors not in span
    cols = []
    for e in range(4):
        cand = [Fraction(int(t == e)) for t in range(4)]
        if rank(to_matrix([*cols, cand, v])) == len(cols) + 2:
            cols.append(cand)
        if len(cols) == 3:
            break
    g = [[cols[c][r] for c in range(3)] + [v[r]] for r in range(4)]
    from .linalg import det

    dt = det(g)
    for r in range(4):
        g[r][0] = g[r][0] / dt
    return g


def embed_hat(p: WeightedPolynomial) -> MPoly:
    """p-hat in Q[X, Y, W, z] of degree d/2 with p-hat(x^2, y^2, xy, z) = p."""
    if p.d % 2:
        raise OddDegreeError(p.d)
    if p.is_zero():
        raise ValueError("zero input")
    terms = {}
    for (i, j, k), c in p.terms.items():
        m, M = min(i, j), max(i, j)
        shift = -((M - m) // 2)  # ceil((m - M) / 2)
        ex = (i - M) // 2 - shift
        ew = M + 2 * shift
        ey = (j - M) // 2 - shift
        terms[(ex, ey, ew, k)] = c
    return MPoly(4, terms)


def unhat(P: MPoly) -> WeightedPolynomial:
    """Evaluate P(x^2, y^2, xy, z) back to a weighted polynomial."""
    terms: dict[Monomial, Fraction] = {}
    degs = set()
    for (ex, ey, ew, k), c in P.terms.items():
        key = (2 * ex + ew, 2 * ey + ew, k)
        degs.add(key[0] + key[1] + 2 * k)
        terms[key] = terms.get(key, 0) + c
    return WeightedPolynomial(degs.pop() if degs else 0, terms)
