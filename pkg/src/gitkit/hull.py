"""Exact position of the origin relative to the convex hull of rational points.

Everything is decided by a small dense two-phase simplex over Q with Bland's
rule, so there is no floating point anywhere on this path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import primitive_integer_vector, rank
from .poly import as_fraction


class Position(str, enum.Enum):
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class WeightPointSet:
    dim: int
    points: tuple[tuple[Fraction, ...], ...]

    def __init__(self, dim: int, points: Iterable[Sequence]):
        if dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        pts = []
        seen = set()
        for p in points:
            if isinstance(p, (int, Fraction, str)):
                p = (p,)
            q = tuple(as_fraction(x) for x in p)
            if len(q) != dim:
                raise ValueError(f"point {p} does not have length {dim}")
            if q not in seen:
                seen.add(q)
                pts.append(q)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "points", tuple(sorted(pts)))


class LPResult(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    piv = tab[row][col]
    if piv != 1:
        inv = 1 / piv
        tab[row] = [x * inv for x in tab[row]]
    prow = tab[row]
    for r in range(len(tab)):
        if r != row:
            f = tab[r][col]
            if f:
                tab[r] = [x - f * y for x, y in zip(tab[r], prow)]


def _simplex(tab, basis, ncols, allowed) -> bool:
    """Maximize the objective stored in the last row (as reduced costs).

    ``tab`` rows are constraints ``[coeffs..., rhs]``; the last row holds
    ``-c`` so that a negative entry means the column improves the objective.
    Returns False when unbounded.
    """
    m = len(tab) - 1
    while True:
        obj = tab[-1]
        col = next((j for j in range(ncols) if allowed[j] and obj[j] < 0), None)
        if col is None:
            return True
        best = None
        for r in range(m):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return False
        _pivot(tab, best[1], col)
        basis[best[1]] = col


def lp_maximize(
    A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]
) -> tuple[LPResult, Fraction | None, list[Fraction] | None]:
    """Maximize ``c.x`` subject to ``A x = b``, ``x >= 0``, exactly."""
    m = len(A)
    n = len(c)
    rows = []
    rhs = []
    for row, bi in zip(A, b):
        row = [as_fraction(v) for v in row]
        bi = as_fraction(bi)
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        rows.append(row)
        rhs.append(bi)
    # phase 1: artificial variables n..n+m-1
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i] + art + [rhs[i]])
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        obj = [o - t for o, t in zip(obj, tab[i])]
    for i in range(m):
        obj[n + i] = Fraction(0)
    tab.append(obj)
    basis = [n + i for i in range(m)]
    _simplex(tab, basis, n + m, [True] * (n + m))
    if tab[-1][-1] != 0:
        return LPResult.INFEASIBLE, None, None
    # drive remaining artificials out of the basis
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is not None:
                _pivot(tab, r, col)
                basis[r] = col
    # phase 2
    keep = [r for r in range(m) if basis[r] < n]
    tab2 = [tab[r][:n] + [tab[r][-1]] for r in keep]
    basis2 = [basis[r] for r in keep]
    obj2 = [-as_fraction(v) for v in c] + [Fraction(0)]
    for r, bcol in enumerate(basis2):
        f = obj2[bcol]
        if f:
            obj2 = [o - f * t for o, t in zip(obj2, tab2[r])]
    tab2.append(obj2)
    if not _simplex(tab2, basis2, n, [True] * n):
        return LPResult.UNBOUNDED, None, None
    x = [Fraction(0)] * n
    for r, bcol in enumerate(basis2):
        x[bcol] = tab2[r][-1]
    value = sum((as_fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult.OPTIMAL, value, x


def _require(points: WeightPointSet) -> None:
    if not points.points:
        raise ValueError("empty weight set")


def origin_in_hull(points: WeightPointSet) -> bool:
    _require(points)
    pts = points.points
    A = [[p[k] for p in pts] for k in range(points.dim)] + [[Fraction(1)] * len(pts)]
    b = [Fraction(0)] * points.dim + [Fraction(1)]
    status, _, _ = lp_maximize(A, b, [Fraction(0)] * len(pts))
    return status is LPResult.OPTIMAL


def origin_in_relative_interior(points: WeightPointSet) -> bool:
    """0 is a strictly positive convex combination of all points."""
    _require(points)
    pts = points.points
    n = len(pts)
    # lambda_s = mu_s + t with mu, t >= 0; maximize t
    A = []
    for k in range(points.dim):
        A.append([p[k] for p in pts] + [sum((p[k] for p in pts), Fraction(0))])
    A.append([Fraction(1)] * n + [Fraction(n)])
    b = [Fraction(0)] * points.dim + [Fraction(1)]
    c = [Fraction(0)] * n + [Fraction(1)]
    status, value, _ = lp_maximize(A, b, c)
    return status is LPResult.OPTIMAL and value > 0


def zero_position(points: WeightPointSet) -> Position:
    """Outside / Boundary / Interior of the origin w.r.t. conv(points) in Q^dim."""
    if not origin_in_hull(points):
        return Position.OUTSIDE
    if rank([list(p) for p in points.points]) == points.dim and origin_in_relative_interior(points):
        return Position.INTERIOR
    return Position.BOUNDARY


def separating_covector(points: WeightPointSet) -> tuple[int, ...] | None:
    """Primitive integer r with <r, s> > 0 for every point, or None if 0 is in the hull."""
    _require(points)
    pts = points.points
    dim = points.dim
    n = len(pts)
    # variables: r+ (dim), r- (dim), slack (n); rows: <s, r+ - r-> - slack = 1
    A = []
    for p in pts:
        row = list(p) + [-x for x in p]
        sl = [Fraction(0)] * n
        sl[len(A)] = Fraction(-1)
        A.append(row + sl)
    b = [Fraction(1)] * n
    status, _, x = lp_maximize(A, b, [Fraction(0)] * (2 * dim + n))
    if status is not LPResult.OPTIMAL:
        return None
    r = [x[k] - x[dim + k] for k in range(dim)]
    return primitive_integer_vector(r)


def supporting_covector(points: WeightPointSet) -> tuple[int, ...] | None:
    """Primitive integer r != 0 with <r, s> >= 0 for all points, or None if 0 is interior."""
    _require(points)
    dim = points.dim
    pts = points.points
    # try each sign pattern of a normalising coordinate: sum_k eps_k r_k = 1
    for k in range(dim):
        for sign in (1, -1):
            # variables r+ (dim), r- (dim), slack (n)
            n = len(pts)
            A = []
            for idx, p in enumerate(pts):
                sl = [Fraction(0)] * n
                sl[idx] = Fraction(-1)
                A.append(list(p) + [-x for x in p] + sl)
            norm = [Fraction(0)] * (2 * dim + n)
            norm[k] = Fraction(sign)
            norm[dim + k] = Fraction(-sign)
            A.append(norm)
            b = [Fraction(0)] * n + [Fraction(1)]
            status, _, x = lp_maximize(A, b, [Fraction(0)] * (2 * dim + n))
            if status is LPResult.OPTIMAL:
                r = [x[i] - x[dim + i] for i in range(dim)]
                return primitive_integer_vector(r)
    return None


def hull_vertices_2d(points: WeightPointSet) -> list[tuple[Fraction, Fraction]]:
    """Vertices of a planar hull in counter-clockwise order (monotone chain)."""
    if points.dim != 2:
        raise ValueError("planar hulls only")
    pts = sorted(points.points)
    if len(pts) <= 2:
        return list(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]
