"""Reductive envelope data for an abelian unipotent group U = (C^+)^r acting on V.

Elements of W_m are never expanded in a basis of the Theta spaces (those
dimensions explode); they are kept as *evaluation families*: one callable per
j that takes ``(us, hs)`` and returns a vector in V.  Identities between
polynomial maps are then checked exactly at random rational points.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Sequence

from .linalg import (
    Matrix,
    add,
    adjugate,
    column_space_basis,
    commutator,
    det,
    identity,
    inverse,
    is_zero,
    matmul,
    matvec,
    nullspace,
    rank,
    scale,
    to_matrix,
    transpose,
    zeros,
)
from .poly import as_fraction, format_fraction

Vector = list[Fraction]
Family = list[Callable[[Sequence[Vector], Sequence[Matrix]], Vector]]

SIZE_GUARD = 6


class NotNilpotentError(ValueError):
    pass


@dataclass(frozen=True)
class NilpotentRep:
    r: int
    dimV: int
    generators: tuple

    def __init__(self, r: int, dimV: int, generators: Sequence):
        gens = tuple(tuple(tuple(row) for row in to_matrix(g)) for g in generators)
        if r < 1 or len(gens) != r:
            raise ValueError(f"expected {r} generators, got {len(gens)}")
        for g in gens:
            if len(g) != dimV or any(len(row) != dimV for row in g):
                raise ValueError(f"generators must be {dimV}x{dimV}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "dimV", dimV)
        object.__setattr__(self, "generators", gens)
        for g in self.matrices:
            if not _is_nilpotent(g):
                raise NotNilpotentError("generator is not nilpotent")
        ms = self.matrices
        for a in range(r):
            for b in range(a + 1, r):
                if not is_zero(commutator(ms[a], ms[b])):
                    raise ValueError("generators do not commute")

    @property
    def matrices(self) -> list[Matrix]:
        return [[list(row) for row in g] for g in self.generators]

    def phi(self, u: Sequence) -> Matrix:
        """Infinitesimal action of u in Lie U = Q^r."""
        out = zeros(self.dimV)
        for c, g in zip(u, self.matrices):
            c = as_fraction(c)
            if c:
                out = add(out, scale(g, c))
        return out

    @classmethod
    def from_json(cls, data: dict) -> "NilpotentRep":
        return cls(int(data["r"]), int(data["dimV"]), data["generators"])

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "dimV": self.dimV,
            "generators": [[[format_fraction(x) for x in row] for row in g] for g in self.generators],
        }


def _is_nilpotent(m: Matrix) -> bool:
    p = m
    for _ in range(len(m)):
        if is_zero(p):
            return True
        p = matmul(p, m)
    return is_zero(p)


# -- flag and dimensions --------------------------------------------------------


@dataclass(frozen=True)
class FlagChain:
    bases: tuple
    dims: tuple[int, ...]


def derived_flag(rep: NilpotentRep) -> FlagChain:
    """V, U(V), U^2(V), ... down to 0, as exact bases."""
    current = identity(rep.dimV)
    bases = [current]
    mats = rep.matrices
    while current:
        images = [matvec(g, v) for v in current for g in mats]
        current = column_space_basis(images)
        bases.append(current)
    return FlagChain(tuple(tuple(tuple(v) for v in b) for b in bases), tuple(len(b) for b in bases))


@dataclass(frozen=True)
class ThetaSpec:
    r: int
    dimV: int
    j: int

    def __post_init__(self):
        if not 0 <= self.j <= max(self.dimV - 1, 0):
            raise ValueError("need 0 <= j <= dimV - 1")
        if self.degree_h < 0:
            raise ValueError("negative h-degree")

    @property
    def degree_h(self) -> int:
        return self.r * (self.dimV - 1) - (self.r - 1) * self.j


def theta_dim(spec: ThetaSpec) -> int:
    """r^j times the number of degree-D monomials in the r^2 (dimV - 1) h-coordinates."""
    D = spec.degree_h
    M = spec.r * spec.r * (spec.dimV - 1)
    if M == 0:
        return spec.r**spec.j if D == 0 else 0
    return spec.r**spec.j * comb(D + M - 1, M - 1)


@dataclass(frozen=True)
class WmDescriptor:
    components: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        return sum(a * b for a, b in self.components)

    def to_json(self) -> dict:
        return {
            "components": [
                {"j": j, "theta_dim": a, "flag_dim": b, "dim": a * b}
                for j, (a, b) in enumerate(self.components)
            ],
            "total": self.total,
        }


def wm_descriptor(rep: NilpotentRep) -> WmDescriptor:
    dims = derived_flag(rep).dims
    comps = []
    for j in range(max(rep.dimV, 1)):
        fd = dims[j] if j < len(dims) else 0
        comps.append((theta_dim(ThetaSpec(rep.r, rep.dimV, j)), fd))
    return WmDescriptor(tuple(comps))


# -- psi and the P-action --------------------------------------------------------


def _check_args(rep: NilpotentRep, us, hs, j: int) -> None:
    D = rep.dimV - 1
    if len(hs) != D:
        raise ValueError(f"need {D} h-matrices, got {len(hs)}")
    for h in hs:
        if len(h) != rep.r or any(len(row) != rep.r for row in h):
            raise ValueError(f"h-matrices must be {rep.r}x{rep.r}")
    if len(us) != j:
        raise ValueError(f"need {j} u-vectors, got {len(us)}")
    for u in us:
        if len(u) != rep.r:
            raise ValueError(f"u-vectors must have length {rep.r}")


def psi_component(rep: NilpotentRep, v: Sequence, j: int, us, hs) -> Vector:
    """psi_j(v)(u_1..u_j, h_1..h_D) with D = dimV - 1.

    det(h_1)...det(h_{D-j}) * phi(h_D u_1) ... phi(h_{D-j+1} u_j) v.
    """
    _check_args(rep, us, hs, j)
    D = rep.dimV - 1
    hs = [to_matrix(h) for h in hs]
    out = [as_fraction(x) for x in v]
    # the rightmost operator acts first
    for i in range(j, 0, -1):
        h = hs[D - i]  # h_{D-i+1}, 1-based
        out = matvec(rep.phi(matvec(h, [as_fraction(x) for x in us[i - 1]])), out)
    c = Fraction(1)
    for k in range(D - j):
        c *= det(hs[k])
    return [c * x for x in out]


def psi_family(rep: NilpotentRep, v: Sequence) -> Family:
    return [
        (lambda us, hs, j=j: psi_component(rep, v, j, us, hs)) for j in range(rep.dimV)
    ]


def psi_evaluate(rep: NilpotentRep, v: Sequence, us, hs) -> dict[int, Vector]:
    """All psi_j(v) at one point; component j uses the first j of ``us``."""
    if len(us) < rep.dimV - 1:
        raise ValueError(f"need {rep.dimV - 1} u-vectors")
    return {j: psi_component(rep, v, j, list(us[:j]), hs) for j in range(rep.dimV)}


def u_act_wm(rep: NilpotentRep, u: Sequence, alpha: Family) -> Family:
    """Infinitesimal U-action: (u.alpha)_j inserts adj(h_{D-j}) u as the (j+1)-th slot of alpha_{j+1}."""
    if len(u) != rep.r:
        raise ValueError("u has the wrong length")
    D = rep.dimV - 1
    u = [as_fraction(x) for x in u]
    zero = [Fraction(0)] * rep.dimV

    def component(j):
        if j == D:
            return lambda us, hs: list(zero)

        def f(us, hs):
            h = to_matrix(hs[D - j - 1])
            return alpha[j + 1](list(us) + [matvec(adjugate(h), u)], hs)

        return f

    return [component(j) for j in range(rep.dimV)]


def glr_act_wm(rep: NilpotentRep, g: Sequence, alpha: Family, convention: str = "left") -> Family:
    """GL(r)-action on W_m.

    ``convention="literal"`` evaluates (det g)^j alpha_j(g u, g h g^-1) as
    written; composed twice it gives (g2 g1), i.e. a right action.
    ``"left"`` (default) uses g^-1 in that formula, which is a left action:
    (g1 g2).alpha = g1.(g2.alpha).
    """
    g = to_matrix(g)
    if det(g) == 0:
        raise ValueError("singular matrix")
    if convention == "left":
        g = inverse(g)
    elif convention != "literal":
        raise ValueError(f"unknown convention {convention!r}")
    ginv = inverse(g)
    dg = det(g)

    def component(j):
        def f(us, hs):
            us2 = [matvec(g, [as_fraction(x) for x in u]) for u in us]
            hs2 = [matmul(matmul(g, to_matrix(h)), ginv) for h in hs]
            return [dg**j * x for x in alpha[j](us2, hs2)]

        return f

    return [component(j) for j in range(rep.dimV)]


def family_add(a: Family, b: Family, ca=1, cb=1) -> Family:
    ca, cb = as_fraction(ca), as_fraction(cb)
    return [
        (lambda us, hs, f=f, g=g: [ca * x + cb * y for x, y in zip(f(us, hs), g(us, hs))])
        for f, g in zip(a, b)
    ]


def _rand_q(rng: random.Random, num: int = 6, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_point(rep: NilpotentRep, rng: random.Random):
    D = rep.dimV - 1
    us = [[_rand_q(rng) for _ in range(rep.r)] for _ in range(D)]
    hs = [[[_rand_q(rng) for _ in range(rep.r)] for _ in range(rep.r)] for _ in range(D)]
    return us, hs


def families_equal_at(rep: NilpotentRep, a: Family, b: Family, us, hs) -> list[int]:
    """Indices j where the two families differ at (us, hs)."""
    return [j for j in range(rep.dimV) if a[j](us[:j], hs) != b[j](us[:j], hs)]


@dataclass
class EquivarianceReport:
    trials: int
    checks: int
    violations: list[dict]

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"trials": self.trials, "checks": self.checks, "violations": self.violations}


def check_psi_equivariance(
    rep: NilpotentRep, trials: int = 50, seed: int = 0, guard: int = SIZE_GUARD
) -> EquivarianceReport:
    """psi(phi(u) v) = u . psi(v), exactly, at random rational (v, u, us, hs)."""
    if rep.dimV > guard:
        raise ValueError(f"dimV={rep.dimV} exceeds the size guard {guard}")
    rng = random.Random(seed)
    violations = []
    checks = 0
    for t in range(trials):
        v = [_rand_q(rng) for _ in range(rep.dimV)]
        u = [_rand_q(rng) for _ in range(rep.r)]
        us, hs = random_point(rep, rng)
        lhs = psi_family(rep, matvec(rep.phi(u), v))
        rhs = u_act_wm(rep, u, psi_family(rep, v))
        bad = families_equal_at(rep, lhs, rhs, us, hs)
        checks += rep.dimV
        if bad:
            violations.append(
                {"trial": t, "components": bad, "v": [format_fraction(x) for x in v],
                 "u": [format_fraction(x) for x in u]}
            )
    return EquivarianceReport(trials, checks, violations)


def check_mixed_relation(
    rep: NilpotentRep, trials: int = 20, seed: int = 0, convention: str = "left"
) -> EquivarianceReport:
    """g X_u g^-1 = det(g) X_{g u} on W_m, tested on families psi(v) at random points."""
    rng = random.Random(seed)
    violations = []
    checks = 0
    for t in range(trials):
        while True:
            g = [[_rand_q(rng) for _ in range(rep.r)] for _ in range(rep.r)]
            if det(g) != 0:
                break
        v = [_rand_q(rng) for _ in range(rep.dimV)]
        u = [_rand_q(rng) for _ in range(rep.r)]
        us, hs = random_point(rep, rng)
        alpha = psi_family(rep, v)
        lhs = glr_act_wm(rep, g, u_act_wm(rep, u, glr_act_wm(rep, inverse(g), alpha, convention)), convention)
        gu = [det(g) * x for x in matvec(g, u)]
        rhs = u_act_wm(rep, gu, alpha)
        bad = families_equal_at(rep, lhs, rhs, us, hs)
        checks += rep.dimV
        if bad:
            violations.append({"trial": t, "components": bad})
    return EquivarianceReport(trials, checks, violations)


# -- sl2 completion ----------------------------------------------------------------


def jordan_chains(e: Matrix) -> list[list[Vector]]:
    """Jordan chains [e^{k-1} t, ..., e t, t] of a nilpotent matrix, longest first."""
    e = to_matrix(e)
    n = len(e)
    if not _is_nilpotent(e):
        raise NotNilpotentError("matrix is not nilpotent")
    if n == 0:
        return []
    powers = [identity(n)]
    while not is_zero(powers[-1]):
        powers.append(matmul(powers[-1], e))
    top = len(powers) - 1  # e^top = 0
    kernels = [nullspace(p) if not is_zero(p) else identity(n) for p in powers]
    kernels[0] = []
    chains: list[list[Vector]] = []
    for k in range(top, 0, -1):
        # vectors already accounted for at level k
        span = list(kernels[k - 1])
        for ch in chains:
            span.append(ch[k - 1])  # e^{m-k} t lies in ker e^k
        base_rank = rank(span) if span else 0
        for cand in kernels[k]:
            trial = span + [cand]
            if rank(trial) > base_rank:
                chain = [cand]
                for _ in range(k - 1):
                    chain.append(matvec(e, chain[-1]))
                chains.append(list(reversed(chain)))
                span = trial
                base_rank += 1
    chains.sort(key=len, reverse=True)
    return chains


@dataclass(frozen=True)
class Sl2Triple:
    e: Matrix
    h: Matrix
    f: Matrix
    block_sizes: tuple[int, ...]
    h_block: tuple[int, ...]
    basis: Matrix  # columns are the Jordan basis

    def to_json(self) -> dict:
        fmt = lambda m: [[format_fraction(x) for x in row] for row in m]
        return {
            "block_sizes": list(self.block_sizes),
            "h_block_diagonal": list(self.h_block),
            "e": fmt(self.e),
            "h": fmt(self.h),
            "f": fmt(self.f),
        }


def sl2_complete(e: Sequence) -> Sl2Triple:
    """Extend a nilpotent e to an sl2 triple, blockwise from the Sym^{k-1} model."""
    e = to_matrix(e)
    n = len(e)
    chains = jordan_chains(e)
    cols: list[Vector] = []
    hdiag: list[int] = []
    fblock = zeros(n)
    pos = 0
    for ch in chains:
        k = len(ch)
        cols.extend(ch)
        for i in range(1, k + 1):
            hdiag.append(k + 1 - 2 * i)
            if i < k:
                fblock[pos + i][pos + i - 1] = Fraction(i * (k - i))
        pos += k
    P = transpose(cols)
    Pinv = inverse(P)
    hb = [[Fraction(hdiag[i]) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    h = matmul(matmul(P, hb), Pinv)
    f = matmul(matmul(P, fblock), Pinv)
    return Sl2Triple(e, h, f, tuple(len(c) for c in chains), tuple(hdiag), P)


def exp_nilpotent(e: Sequence, t) -> Matrix:
    """exp(t e) = sum t^k e^k / k!, exact for nilpotent e."""
    e = to_matrix(e)
    t = as_fraction(t)
    n = len(e)
    out = identity(n)
    p = identity(n)
    for k in range(1, n + 1):
        p = matmul(p, e)
        if is_zero(p):
            break
        out = add(out, scale(p, t**k / factorial(k)))
    return out


def binary_form_translation(n: int, t) -> Matrix:
    """C^+ acting on degree-n binary forms by p(x, y) -> p(x + t y, y), basis x^n, ..., y^n."""
    t = as_fraction(t)
    m = zeros(n + 1)
    # column a: image of x^(n-a) y^a
    for a in range(n + 1):
        i = n - a
        for l in range(i + 1):
            m[a + l][a] += comb(i, l) * t**l
    return m


def xd_nilpotent_rep(d: int) -> NilpotentRep:
    """The three infinitesimal generators of the U-action on X_d (basis as monomial_basis)."""
    from .weighted import u_action_matrix

    mat = u_action_matrix(d)
    n = len(mat)
    gens = []
    for var in range(3):
        point = [Fraction(0)] * 3
        gens.append([[mat[i][j].diff(var).evaluate(point) for j in range(n)] for i in range(n)])
    return NilpotentRep(3, n, gens)
