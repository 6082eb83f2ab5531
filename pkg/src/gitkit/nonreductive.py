"""Stability for U^ = U x| C* and H = U x| GL(2) acting on X_d.

``uhat_test`` removes the "for all u in U" quantifier exactly: the
substitution z -> z + q keeps the top z-degree ``k_max`` and can push the
bottom z-degree up to the largest multiplicity ``M`` of a factor (z - q), so
the central C* weights d - 4k + 2 delta reduce the test to

    semistable iff 4M <= d + 2 delta <= 4 k_max   (strict for stable).

``h_test`` removes "for all h in H" with a finite parabolic reduction.  For a
direction r in the T_c weight plane, the operators that never lower the
r-weight form a subgroup P_r; every orbit element is P_r applied to
``u_neg . g_rep . p`` where ``g_rep`` runs over Bruhat representatives of
GL(2) mod the r-Borel (a one-parameter unipotent or the swap) and ``u_neg``
over the U-coordinates that lower the r-weight.  "Some orbit point has all its
weights on the positive side of r" is therefore a system in at most four
unknowns, decided exactly by ideal properness.  Only finitely many systems
occur: they depend on r through the signs of <r, v> for the weights v and four
fixed vectors, so one direction per ray and per open arc of that line
arrangement suffices.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import product
from typing import Any, Iterable, Sequence

from .groebner import (
    PolynomialIdeal,
    UndecidedError,
    complex_point,
    ideal_is_proper,
    rational_point,
)
from .hull import WeightPointSet
from .linalg import primitive_integer_vector
from .poly import MPoly, as_fraction, format_fraction
from .torus import OddDegreeError, hull_verdict, tc_test, tc_weight_map
from .verdict import StabilityVerdict, Status, worst
from .weighted import (
    GL2Element,
    Monomial,
    UnipotentElement,
    WeightedPolynomial,
    apply_gl2,
    apply_unipotent,
    monomial_basis,
    section_ideal,
    section_multiplicity,
    section_witness,
    z_degree_range,
)


@dataclass(frozen=True)
class HLinearisation:
    d: int
    delta: Fraction

    def __init__(self, d: int, delta=0):
        if d <= 0 or d % 2:
            if d % 2:
                raise OddDegreeError(d)
            raise ValueError("d must be a positive even integer")
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "delta", as_fraction(delta))

    @property
    def at_endpoint(self) -> bool:
        return self.delta in (Fraction(-self.d, 2), Fraction(self.d, 2))


@dataclass(frozen=True)
class WallTable:
    walls: tuple[Fraction, ...]
    endpoint_lo: Fraction
    endpoint_hi: Fraction

    def classify(self, delta) -> str:
        delta = as_fraction(delta)
        if delta in (self.endpoint_lo, self.endpoint_hi):
            return "endpoint"
        if delta in self.walls:
            return "wall"
        if delta < self.endpoint_lo or delta > self.endpoint_hi:
            return "outside"
        lo = max(w for w in self.walls if w < delta)
        hi = min(w for w in self.walls if w > delta)
        return f"chamber ({format_fraction(lo)}, {format_fraction(hi)})"

    def to_json(self) -> dict:
        return {
            "walls": [format_fraction(w) for w in self.walls],
            "endpoints": [format_fraction(self.endpoint_lo), format_fraction(self.endpoint_hi)],
        }


class HUndecided(UndecidedError):
    def __init__(self, partial: list[dict]):
        super().__init__("undecided: budget")
        self.partial = partial


def _check(p: WeightedPolynomial, lin: HLinearisation) -> None:
    if p.is_zero():
        raise ValueError("zero input")
    if p.d != lin.d:
        raise ValueError(f"degree mismatch: polynomial has d={p.d}, linearisation d={lin.d}")


def _u_json(u: UnipotentElement) -> list[str]:
    return [format_fraction(v) for v in u.as_tuple()]


def _g_json(g: GL2Element) -> list[list[str]]:
    return [[format_fraction(v) for v in row] for row in g.entries]


# -- U^ -----------------------------------------------------------------------


def uhat_test(
    p: WeightedPolynomial, lin: HLinearisation, budget: int | None = None
) -> StabilityVerdict:
    """Exact U^-verdict via the section multiplicity M and top z-degree k_max."""
    _check(p, lin)
    _, kmax = z_degree_range(p)
    M = section_multiplicity(p, budget)
    v = lin.d + 2 * lin.delta
    lo, hi = 4 * M, 4 * kmax
    caveat = lin.at_endpoint
    info = {"M": M, "k_max": kmax, "d_plus_2delta": format_fraction(v)}
    if lo < v < hi:
        return StabilityVerdict(Status.STABLE, info, caveat)
    if lo <= v <= hi:
        return StabilityVerdict(Status.STRICTLY_SEMISTABLE, info, caveat)
    if v > hi:
        cert = dict(info, reason="d + 2 delta > 4 k_max: every central weight is positive",
                    u=_u_json(UnipotentElement()), central_covector=1, covector=[1, 1])
        return StabilityVerdict(Status.UNSTABLE, cert, caveat)
    cert = dict(info, reason="d + 2 delta < 4 M: after z -> z + q every central weight is negative",
                central_covector=-1, covector=[-1, -1])
    u = section_witness(p, M, budget)
    if u is not None:
        cert["u"] = _u_json(u)
    else:
        cert["u"] = None
        z = complex_point(section_ideal(p, M))
        cert["u_numeric"] = None if z is None else [repr(c) for c in z]
        cert["section"] = "ideal-certified, not rational"
    return StabilityVerdict(Status.UNSTABLE, cert, caveat)


def central_test(p: WeightedPolynomial, lin: HLinearisation) -> StabilityVerdict:
    """Rank-1 hull test of the central weights d - 4k + 2 delta (no quantifier)."""
    pts = WeightPointSet(1, [(lin.d - 4 * k + 2 * lin.delta,) for (_, _, k) in p.terms])
    return hull_verdict(pts)


def default_uhat_grid(seed: int = 0, n_random: int = 50) -> list[UnipotentElement]:
    vals = [Fraction(v) for v in (0, 1, -1, 2, -2)] + [Fraction(1, 2), Fraction(-1, 2)]
    grid = [UnipotentElement(a, b, c) for a, b, c in product(vals, repeat=3)]
    rng = random.Random(seed)
    for _ in range(n_random):
        grid.append(UnipotentElement(*(_random_rational(rng) for _ in range(3))))
    return grid


def _random_rational(rng: random.Random, num: int = 9, den: int = 5) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def uhat_oracle(
    p: WeightedPolynomial,
    lin: HLinearisation,
    grid: Sequence[UnipotentElement] | None = None,
    seed: int = 0,
) -> StabilityVerdict:
    """Worst central-C* verdict over sampled u; an Unstable answer is a proof."""
    _check(p, lin)
    grid = default_uhat_grid(seed) if grid is None else grid
    verdicts = []
    for u in grid:
        v = central_test(apply_unipotent(p, u), lin)
        if v.status is Status.UNSTABLE:
            return StabilityVerdict(
                Status.UNSTABLE,
                {"u": _u_json(u), "central_covector": v.certificate["covector"][0]},
                lin.at_endpoint,
            )
        verdicts.append(v)
    w = worst(verdicts)
    return StabilityVerdict(w.status, None, lin.at_endpoint)


# -- H ------------------------------------------------------------------------

# weight change of one substitution step for the unipotent coordinates alpha, beta, gamma
U_SHIFTS = ((3, 1), (2, 2), (1, 3))
# branches: identity, x -> x + c y, y -> y + c x, swap x <-> y
BRANCH_GENS = {
    "id": None,
    "x+cy": ((1, "c"), (0, 1)),
    "y+cx": ((1, 0), ("c", 1)),
    "swap": ((0, 1), (1, 0)),
}
PARAMS = ("c", "alpha", "beta", "gamma")


def _pair(r, v) -> Fraction:
    return r[0] * v[0] + r[1] * v[1]


def _half(v) -> int:
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def _angle_cmp(a, b) -> int:
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    return -1 if cross > 0 else (1 if cross < 0 else 0)


def critical_directions(vectors: Iterable[Sequence[Fraction]]) -> list[tuple[int, int]]:
    """Directions covering every sign pattern of r against ``vectors``.

    One primitive integer vector on each ray orthogonal to some vector, plus
    one strictly inside each open arc between consecutive rays.
    """
    rays = set()
    for v in vectors:
        if v[0] == 0 and v[1] == 0:
            continue
        n = primitive_integer_vector((-v[1], v[0]))
        rays.add(n)
        rays.add((-n[0], -n[1]))
    ordered = sorted(rays, key=cmp_to_key(_angle_cmp))
    out = list(ordered)
    if len(ordered) == 0:
        return [(1, 0), (0, 1), (-1, 0), (0, -1)]
    for a, b in zip(ordered, ordered[1:] + ordered[:1]):
        s = (a[0] + b[0], a[1] + b[1])
        if s == (0, 0):
            s = (-a[1], a[0])
        out.append(primitive_integer_vector(s))
    return sorted(set(out))


class _OrbitSystems:
    """Symbolic images u_neg . g_rep . p, cached per (branch, free U-coordinates)."""

    def __init__(self, p: WeightedPolynomial):
        self.p = p
        self.base = MPoly(3, dict(p.terms)).embed(7, [4, 5, 6])
        self.cache: dict[tuple[str, tuple[int, ...]], dict[Monomial, MPoly]] = {}

    def image(self, branch: str, ucoords: tuple[int, ...]) -> dict[Monomial, MPoly]:
        key = (branch, ucoords)
        if key in self.cache:
            return self.cache[key]
        c, a, b, g, x, y, z = MPoly.gens(7)
        if branch == "id":
            gx, gy, det = x, y, 1
        elif branch == "x+cy":
            gx, gy, det = x + c * y, y, 1
        elif branch == "y+cx":
            gx, gy, det = x, y + c * x, 1
        elif branch == "swap":
            gx, gy, det = y, x, -1
        else:
            raise ValueError(branch)
        q = MPoly(7)
        for idx, term in zip((1, 2, 3), (x * x, x * y, y * y)):
            if idx in ucoords:
                q = q + MPoly.var(7, idx) * term
        gz = (z + q) * Fraction(1, det) if det != 1 else z + q
        full = self.base.substitute([c, a, b, g, gx, gy, gz])
        split = full.split([4, 5, 6])
        out = {tuple(k): v for k, v in split.items()}
        self.cache[key] = out
        return out


def _branches(r) -> list[str]:
    if r[0] == r[1]:
        return ["id"]
    # the r-weight-raising GL(2) unipotent is in P_r; the other one and the swap represent P_r\GL(2)
    return ["x+cy", "swap"] if r[0] > r[1] else ["y+cx", "swap"]


def _free_ucoords(r) -> tuple[int, ...]:
    return tuple(idx for idx, v in zip((1, 2, 3), U_SHIFTS) if _pair(r, v) < 0)


def _element_from_point(branch: str, ucoords, point) -> tuple[Any, Any]:
    vals = dict(zip(range(4), point))
    c = vals.get(0, 0)
    u = [vals.get(i, 0) if i in ucoords else 0 for i in (1, 2, 3)]
    if branch == "id":
        g = ((1, 0), (0, 1))
    elif branch == "x+cy":
        g = ((1, c), (0, 1))
    elif branch == "y+cx":
        g = ((1, 0), (c, 1))
    else:
        g = ((0, 1), (1, 0))
    return g, u


@dataclass
class _System:
    direction: tuple[int, int]
    branch: str
    ucoords: tuple[int, ...]
    vanish: frozenset
    strict: bool


def _systems(wmap: dict[Monomial, tuple], strict: bool, extra_vectors) -> list[_System]:
    dirs = critical_directions(list(wmap.values()) + list(extra_vectors))
    seen = set()
    out = []
    for r in dirs:
        if strict:
            vanish = frozenset(m for m, w in wmap.items() if _pair(r, w) <= 0)
        else:
            vanish = frozenset(m for m, w in wmap.items() if _pair(r, w) < 0)
        keep = [m for m in wmap if m not in vanish]
        if not keep:
            continue
        uc = _free_ucoords(r)
        for br in _branches(r):
            key = (vanish, br, uc)
            if key in seen:
                continue
            seen.add(key)
            out.append(_System(r, br, uc, vanish, strict))
    return out


_EXTRA = ((1, -1), (3, 1), (1, 1), (1, 3))


def _solve_system(orbit: _OrbitSystems, sysm: _System, budget) -> tuple[bool, list[MPoly]]:
    image = orbit.image(sysm.branch, sysm.ucoords)
    gens = [image[m] for m in sysm.vanish if m in image and not image[m].is_zero()]
    if not gens:
        return True, gens
    if any(g.is_constant() for g in gens):
        return False, gens
    zero = (Fraction(0),) * 4
    if all(g.evaluate(zero) == 0 for g in gens):
        return True, gens
    return ideal_is_proper(PolynomialIdeal(PARAMS, tuple(gens)), budget), gens


def _witness(p, sysm: _System, gens: list[MPoly], budget, seed: int) -> dict:
    cert: dict[str, Any] = {
        "covector": list(sysm.direction),
        "branch": sysm.branch,
        "order": "apply g, then u",
    }
    ideal = PolynomialIdeal(PARAMS, tuple(gens))
    zero = (Fraction(0),) * 4
    if all(g.evaluate(zero) == 0 for g in gens):
        point = zero
    else:
        point = rational_point(ideal, budget)
    if point is not None:
        g, u = _element_from_point(sysm.branch, sysm.ucoords, point)
        cert["g"] = [[format_fraction(as_fraction(v)) for v in row] for row in g]
        cert["u"] = [format_fraction(as_fraction(v)) for v in u]
        return cert
    z = complex_point(ideal, seed=seed)
    cert["g"] = None
    cert["u"] = None
    cert["nonrational"] = True
    if z is not None:
        g, u = _element_from_point(sysm.branch, sysm.ucoords, z)
        cert["g_numeric"] = [[repr(complex(v)) for v in row] for row in g]
        cert["u_numeric"] = [repr(complex(v)) for v in u]
    return cert


def h_test(
    p: WeightedPolynomial,
    lin: HLinearisation,
    budget: int | None = None,
    seed: int = 0,
) -> StabilityVerdict:
    """H-verdict: T_c hull of h.p contains 0 (in its interior) for every h in H.

    Twists outside the open range (-d/2, d/2) give Unstable; at the two
    endpoints the Hilbert-Mumford computation is recorded in the notes and the
    verdict carries ``endpoint_caveat``.
    """
    _check(p, lin)
    d, delta = lin.d, lin.delta
    caveat = lin.at_endpoint
    try:
        central = uhat_test(p, lin, budget)
    except UndecidedError:
        raise HUndecided([{"stage": "central"}]) from None
    if central.status is Status.UNSTABLE:
        cert = dict(central.certificate)
        cert["stage"] = "central"
        if cert.get("u") is not None:
            cert["g"] = _g_json(GL2Element.identity())
        return StabilityVerdict(Status.UNSTABLE, cert, caveat)
    if caveat:
        hm = _h_quantified(p, lin, budget, seed)
        return StabilityVerdict(
            Status.UNSTABLE,
            {
                "stage": "endpoint",
                "reason": "the H-semistable set is empty for delta outside the open interval (-d/2, d/2)",
                "hilbert_mumford_status": hm.status.value,
                "hilbert_mumford_certificate": hm.certificate,
            },
            True,
            notes=(f"Hilbert-Mumford computation at the endpoint gives {hm.status.value}",),
        )
    return _h_quantified(p, lin, budget, seed)


def _h_quantified(p, lin, budget, seed) -> StabilityVerdict:
    wmap = tc_weight_map(lin.d, lin.delta)
    orbit = _OrbitSystems(p)
    partial: list[dict] = []
    undecided = False
    for strict in (True, False):
        for sysm in _systems(wmap, strict, _EXTRA):
            try:
                solvable, gens = _solve_system(orbit, sysm, budget)
            except UndecidedError:
                undecided = True
                partial.append(
                    {"covector": list(sysm.direction), "branch": sysm.branch, "strict": strict}
                )
                continue
            if not solvable:
                continue
            cert = _witness(p, sysm, gens, budget, seed)
            cert["stage"] = "parabolic"
            if strict:
                return StabilityVerdict(Status.UNSTABLE, cert, lin.at_endpoint)
            if not undecided:
                cert = {"supporting_" + k if k == "covector" else k: v for k, v in cert.items()}
                return StabilityVerdict(Status.STRICTLY_SEMISTABLE, cert, lin.at_endpoint)
        if undecided:
            raise HUndecided(partial)
    return StabilityVerdict(Status.STABLE, None, lin.at_endpoint)


def verify_h_certificate(p: WeightedPolynomial, lin: HLinearisation, cert: dict) -> bool:
    """Independent check: the certified h moves p so its T_c hull misses 0.

    Rational witnesses are checked exactly.  Numerical witnesses are checked
    in floating point: coefficients on the closed negative side of the
    covector must vanish to 1e-8 relative to the largest coefficient.
    """
    if cert.get("stage") == "endpoint":
        return True
    if cert.get("g") is not None and cert.get("u") is not None:
        g = GL2Element(tuple(tuple(Fraction(v) for v in row) for row in cert["g"]))
        u = UnipotentElement(*(Fraction(v) for v in cert["u"]))
        moved = apply_unipotent(apply_gl2(p, g), u)
        return tc_test(moved, lin.delta).status is Status.UNSTABLE
    if cert.get("u") is not None and cert.get("stage") == "central":
        u = UnipotentElement(*(Fraction(v) for v in cert["u"]))
        return tc_test(apply_unipotent(p, u), lin.delta).status is Status.UNSTABLE
    g_num = cert.get("g_numeric")
    u_num = cert.get("u_numeric")
    if u_num is None:
        return False
    g = [[complex(v) for v in row] for row in g_num] if g_num else [[1, 0], [0, 1]]
    u = [complex(v) for v in u_num]
    coeffs = _numeric_action(p, g, u)
    r = cert["covector"]
    wmap = tc_weight_map(lin.d, lin.delta)
    scale = max(abs(c) for c in coeffs.values())
    for m, c in coeffs.items():
        if _pair(r, wmap[m]) <= 0 and abs(c) > 1e-8 * scale:
            return False
    return True


def _numeric_action(p: WeightedPolynomial, g, u) -> dict[Monomial, complex]:
    """Coefficients of p(g11 x + g12 y, g21 x + g22 y, (z + q)/det g) in floating point."""
    (a, b), (c, dd) = g
    det = a * dd - b * c
    # recover the coefficients by least squares from evaluations at random points
    basis = monomial_basis(p.d)
    import numpy as np

    rng = np.random.default_rng(0)
    pts = rng.normal(size=(len(basis) + 8, 3)) + 1j * rng.normal(size=(len(basis) + 8, 3))
    rows = []
    vals = []
    for X, Y, Z in pts:
        gx = a * X + b * Y
        gy = c * X + dd * Y
        gz = (Z + u[0] * X * X + u[1] * X * Y + u[2] * Y * Y) / det
        vals.append(sum(complex(float(cf)) * gx**i * gy**j * gz**k for (i, j, k), cf in p.terms.items()))
        rows.append([X**i * Y**j * Z**k for (i, j, k) in basis])
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(vals), rcond=None)
    return dict(zip(basis, (complex(v) for v in sol)))


def h_oracle(
    p: WeightedPolynomial,
    lin: HLinearisation,
    samples: int = 500,
    seed: int = 0,
) -> StabilityVerdict:
    """Worst plain T_c verdict over identity plus ``samples - 1`` random rational h."""
    _check(p, lin)
    rng = random.Random(seed)
    worst_v = None
    for n in range(samples):
        if n == 0:
            g, u = GL2Element.identity(), UnipotentElement()
        else:
            while True:
                ents = [[_random_rational(rng) for _ in range(2)] for _ in range(2)]
                if ents[0][0] * ents[1][1] - ents[0][1] * ents[1][0] != 0:
                    break
            g = GL2Element((tuple(ents[0]), tuple(ents[1])))
            u = UnipotentElement(*(_random_rational(rng) for _ in range(3)))
        v = tc_test(apply_unipotent(apply_gl2(p, g), u), lin.delta)
        if v.status is Status.UNSTABLE:
            cert = dict(v.certificate, g=_g_json(g), u=_u_json(u), order="apply g, then u")
            return StabilityVerdict(Status.UNSTABLE, cert, lin.at_endpoint)
        if worst_v is None or v.status.severity > worst_v.status.severity:
            worst_v = v
    return StabilityVerdict(worst_v.status, None, lin.at_endpoint)


def h_walls(d: int) -> WallTable:
    """Candidate walls 2m - d/2 (central weight jumps) merged with the triangle-boundary twists."""
    if d % 2:
        raise OddDegreeError(d)
    half = Fraction(d, 2)
    walls = {2 * m - half for m in range(d // 2 + 1)}
    walls |= {-half, half}
    return WallTable(tuple(sorted(walls)), -half, half)


# -- corpus --------------------------------------------------------------------


@dataclass
class CorpusReport:
    d: int | None
    deltas: list[Fraction]
    cells: list[list[dict]]
    counts: dict[str, dict[str, int]]
    walls: dict[str, str]
    undecided: int = 0

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "deltas": [format_fraction(x) for x in self.deltas],
            "wall_annotations": self.walls,
            "counts": self.counts,
            "undecided_cells": self.undecided,
            "matrix": self.cells,
        }


def _cell(args) -> dict:
    p_json, d, delta, test, budget, seed = args
    p = WeightedPolynomial.from_json(p_json)
    try:
        lin = HLinearisation(d, delta)
        if test == "h":
            v = h_test(p, lin, budget, seed)
        else:
            v = uhat_test(p, lin, budget)
        out = v.to_json()
    except HUndecided as exc:
        out = {"status": "Undecided", "certificate": {"partial": exc.partial}, "endpoint_caveat": False}
    except UndecidedError:
        out = {"status": "Undecided", "certificate": None, "endpoint_caveat": False}
    except (ValueError, ArithmeticError) as exc:
        out = {"status": "Error", "error": str(exc), "certificate": None, "endpoint_caveat": False}
    out["delta"] = format_fraction(as_fraction(delta))
    return out


def classify_corpus(
    polys: Sequence[WeightedPolynomial],
    deltas: Sequence,
    test: str = "h",
    budget: int | None = None,
    seed: int = 0,
    jobs: int = 1,
) -> CorpusReport:
    """Verdict matrix poly x delta; per-cell errors are recorded, never raised."""
    deltas = [as_fraction(x) for x in deltas]
    if not polys:
        return CorpusReport(None, deltas, [], {}, {})
    ds = {p.d for p in polys}
    if len(ds) != 1:
        raise ValueError(f"corpus mixes degrees {sorted(ds)}")
    d = ds.pop()
    tasks = [
        (p.to_json(), d, delta, test, budget, seed) for p in polys for delta in deltas
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            flat = list(pool.map(_cell, tasks))
    else:
        flat = [_cell(t) for t in tasks]
    n = len(deltas)
    cells = [flat[i * n : (i + 1) * n] for i in range(len(polys))]
    counts: dict[str, dict[str, int]] = {}
    for j, delta in enumerate(deltas):
        tally: dict[str, int] = {}
        for row in cells:
            tally[row[j]["status"]] = tally.get(row[j]["status"], 0) + 1
        counts[format_fraction(delta)] = dict(sorted(tally.items()))
    walls = {}
    if d % 2 == 0 and d > 0:
        table = h_walls(d)
        walls = {format_fraction(x): table.classify(x) for x in deltas}
    undecided = sum(1 for c in flat if c["status"] == "Undecided")
    return CorpusReport(d, deltas, cells, counts, walls, undecided)
