"""Weighted-homogeneous polynomials on P(1,1,2) and the H = U x| GL(2) action.

A point of X_d is a nonzero polynomial ``sum a_ijk x^i y^j z^k`` with
``i + j + 2k = d``.  Group elements act by direct substitution:

* ``(alpha, beta, gamma)`` in U sends ``p`` to ``p(x, y, z + alpha x^2 + beta xy + gamma y^2)``;
* ``g`` in GL(2) sends ``p`` to ``p(g11 x + g12 y, g21 x + g22 y, z / det g)``.

Inverting an element means negating the unipotent triple or inverting the
matrix.  Stability verdicts are orbit properties and do not depend on this
choice.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .groebner import PolynomialIdeal, ideal_is_proper
from .poly import MPoly, as_fraction, format_fraction

Monomial = tuple[int, int, int]


class ZeroPolynomialError(ValueError):
    def __init__(self, message: str = "zero input"):
        super().__init__(message)


def monomial_basis(d: int) -> list[Monomial]:
    """Basis of weighted degree ``d``: z-power ascending, x-power descending."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for k in range(d // 2 + 1):
        rest = d - 2 * k
        for i in range(rest, -1, -1):
            out.append((i, rest - i, k))
    return out


@dataclass(frozen=True)
class WeightedPolynomial:
    d: int
    terms: Mapping[Monomial, Fraction]

    def __post_init__(self):
        clean = {}
        for mono, c in dict(self.terms).items():
            i, j, k = (int(a) for a in mono)
            if min(i, j, k) < 0:
                raise ValueError(f"negative exponent in {mono}")
            if i + j + 2 * k != self.d:
                raise ValueError(
                    f"monomial {monomial_str((i, j, k))} has weighted degree "
                    f"{i + j + 2 * k}, expected {self.d}"
                )
            c = as_fraction(c)
            if c:
                clean[(i, j, k)] = clean.get((i, j, k), Fraction(0)) + c
        object.__setattr__(self, "terms", {m: c for m, c in clean.items() if c})

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list[Monomial]:
        return sorted(self.terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def __eq__(self, other):
        if not isinstance(other, WeightedPolynomial):
            return NotImplemented
        return self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def __add__(self, other: "WeightedPolynomial") -> "WeightedPolynomial":
        if self.d != other.d:
            raise ValueError("degree mismatch")
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0) + c
        return WeightedPolynomial(self.d, terms)

    def __neg__(self):
        return WeightedPolynomial(self.d, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, WeightedPolynomial):
            terms: dict[Monomial, Fraction] = {}
            for (a, b, c), u in self.terms.items():
                for (e, f, g), v in other.terms.items():
                    key = (a + e, b + f, c + g)
                    terms[key] = terms.get(key, 0) + u * v
            return WeightedPolynomial(self.d + other.d, terms)
        c = as_fraction(other)
        return WeightedPolynomial(self.d, {m: v * c for m, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = WeightedPolynomial(0, {(0, 0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def to_mpoly(self) -> MPoly:
        return MPoly(3, dict(self.terms))

    def to_str(self) -> str:
        return self.to_mpoly().to_str(["x", "y", "z"]) if self.terms else "0"

    def __str__(self):
        return self.to_str()

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "terms": [
                {"i": i, "j": j, "k": k, "c": format_fraction(self.terms[(i, j, k)])}
                for (i, j, k) in monomial_basis(self.d)
                if (i, j, k) in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "WeightedPolynomial":
        terms: dict[Monomial, Fraction] = {}
        for t in obj["terms"]:
            key = (int(t["i"]), int(t["j"]), int(t["k"]))
            terms[key] = terms.get(key, Fraction(0)) + as_fraction(str(t["c"]))
        return cls(int(obj["d"]), terms)

    @classmethod
    def monomial(cls, i: int, j: int, k: int, c=1) -> "WeightedPolynomial":
        return cls(i + j + 2 * k, {(i, j, k): c})


def monomial_str(mono: Monomial) -> str:
    parts = [
        n if a == 1 else f"{n}^{a}" for n, a in zip("xyz", mono) if a
    ]
    return "*".join(parts) or "1"


def _require_nonzero(p: WeightedPolynomial) -> None:
    if p.is_zero():
        raise ZeroPolynomialError()


# -- text grammar ------------------------------------------------------------

_TOKEN = re.compile(r"\s*([+-])?\s*([^+-]+)")
_FACTOR = re.compile(r"^([xyz])(?:\^(\d+))?$")


class PolynomialSyntaxError(ValueError):
    pass


def parse_polynomial(text: str, d: int | None = None) -> WeightedPolynomial:
    """Parse ``c*x^i*y^j*z^k`` terms joined by ``+``/``-``.

    Exponents default to 1 and coefficients to +-1.  Like terms are combined.
    With ``d`` given, every monomial must have weighted degree ``d``.
    """
    src = text.strip()
    if not src:
        raise PolynomialSyntaxError("empty polynomial at position 0")
    terms: dict[Monomial, Fraction] = {}
    pos = 0
    first = True
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or (m.group(1) is None and not first):
            raise PolynomialSyntaxError(f"syntax error at position {pos}: {src[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        body = m.group(2).strip()
        body_pos = m.start(2)
        coeff = Fraction(sign)
        mono = [0, 0, 0]
        factors = [f.strip() for f in body.split("*")]
        for idx, factor in enumerate(factors):
            fm = _FACTOR.match(factor)
            if fm:
                mono["xyz".index(fm.group(1))] += int(fm.group(2) or 1)
                continue
            if idx == 0:
                try:
                    # allow "3/2" written as one factor, or "3" followed by "/2"
                    coeff *= Fraction(factor)
                    continue
                except (ValueError, ZeroDivisionError):
                    pass
            raise PolynomialSyntaxError(
                f"syntax error at position {body_pos}: bad factor {factor!r}"
            )
        key = tuple(mono)
        if d is not None and key[0] + key[1] + 2 * key[2] != d:
            raise ValueError(
                f"degree mismatch: monomial {monomial_str(key)} has weighted degree "
                f"{key[0] + key[1] + 2 * key[2]}, expected {d}"
            )
        terms[key] = terms.get(key, Fraction(0)) + coeff
        pos = m.end()
        first = False
    terms = {k: v for k, v in terms.items() if v}
    if not terms:
        raise ZeroPolynomialError("zero polynomial")
    degrees = {i + j + 2 * k for (i, j, k) in terms}
    if len(degrees) > 1:
        raise ValueError(f"polynomial is not weighted homogeneous: degrees {sorted(degrees)}")
    return WeightedPolynomial(degrees.pop() if d is None else d, terms)


# -- group actions -----------------------------------------------------------


@dataclass(frozen=True)
class UnipotentElement:
    alpha: Fraction = Fraction(0)
    beta: Fraction = Fraction(0)
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))

    def __add__(self, other: "UnipotentElement") -> "UnipotentElement":
        return UnipotentElement(
            self.alpha + other.alpha, self.beta + other.beta, self.gamma + other.gamma
        )

    def inverse(self) -> "UnipotentElement":
        return UnipotentElement(-self.alpha, -self.beta, -self.gamma)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class GL2Element:
    entries: tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]

    def __post_init__(self):
        (a, b), (c, d) = self.entries
        ents = ((as_fraction(a), as_fraction(b)), (as_fraction(c), as_fraction(d)))
        object.__setattr__(self, "entries", ents)
        if self.det == 0:
            raise ValueError("singular matrix")

    @property
    def det(self) -> Fraction:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    @classmethod
    def identity(cls) -> "GL2Element":
        return cls(((1, 0), (0, 1)))

    def __matmul__(self, other: "GL2Element") -> "GL2Element":
        (a, b), (c, d) = self.entries
        (e, f), (g, h) = other.entries
        return GL2Element(((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h)))

    def inverse(self) -> "GL2Element":
        (a, b), (c, d) = self.entries
        det = self.det
        return GL2Element(((d / det, -b / det), (-c / det, a / det)))


def _binary_power(lin: Mapping[tuple[int, int], Fraction], n: int, cache: dict):
    """n-th power of a binary form given as {(i, j): c}; memoized per form."""
    if n in cache:
        return cache[n]
    if n == 0:
        cache[0] = {(0, 0): Fraction(1)}
        return cache[0]
    prev = _binary_power(lin, n - 1, cache)
    out: dict[tuple[int, int], Fraction] = {}
    for (a, b), u in prev.items():
        for (e, f), v in lin.items():
            key = (a + e, b + f)
            out[key] = out.get(key, 0) + u * v
    cache[n] = {k: v for k, v in out.items() if v}
    return cache[n]


def apply_unipotent(p: WeightedPolynomial, u: UnipotentElement) -> WeightedPolynomial:
    """``p(x, y, z + alpha x^2 + beta xy + gamma y^2)``."""
    _require_nonzero(p)
    q = {m: c for m, c in {(2, 0): u.alpha, (1, 1): u.beta, (0, 2): u.gamma}.items() if c}
    if not q:
        return p
    cache: dict = {}
    out: dict[Monomial, Fraction] = {}
    for (i, j, k), c in p.terms.items():
        for l in range(k + 1):
            coeff = c * comb(k, l)
            for (a, b), v in _binary_power(q, l, cache).items():
                key = (i + a, j + b, k - l)
                out[key] = out.get(key, 0) + coeff * v
    return WeightedPolynomial(p.d, out)


def apply_gl2(p: WeightedPolynomial, g: GL2Element) -> WeightedPolynomial:
    """``p(g11 x + g12 y, g21 x + g22 y, z / det g)``; (g1 then g2) == g2 @ g1."""
    _require_nonzero(p)
    (a, b), (c, dd) = g.entries
    inv_det = 1 / g.det
    xs: dict = {}
    ys: dict = {}
    xform = {m: v for m, v in {(1, 0): a, (0, 1): b}.items() if v}
    yform = {m: v for m, v in {(1, 0): c, (0, 1): dd}.items() if v}
    out: dict[Monomial, Fraction] = {}
    for (i, j, k), coef in p.terms.items():
        base = coef * inv_det**k
        xi = _binary_power(xform, i, xs)
        yj = _binary_power(yform, j, ys)
        for (e, f), u in xi.items():
            for (s, t), v in yj.items():
                key = (e + s, f + t, k)
                out[key] = out.get(key, 0) + base * u * v
    return WeightedPolynomial(p.d, out)


# -- symbolic action ---------------------------------------------------------


def symbolic_unipotent_image(p: WeightedPolynomial) -> dict[Monomial, MPoly]:
    """Coefficients of ``p(x, y, z + l x^2 + m xy + n y^2)`` as polynomials in (l, m, n)."""
    ring = 6  # l, m, n, x, y, z
    l, m, n, x, y, z = MPoly.gens(ring)
    image = z + l * x * x + m * x * y + n * y * y
    full = MPoly(3, dict(p.terms)).substitute([x, y, image])
    return {tuple(k): v for k, v in full.split([3, 4, 5]).items()}


def u_action_matrix(d: int) -> list[list[MPoly]]:
    """Matrix of the U-action on ``monomial_basis(d)`` with entries in Q[l, m, n].

    Column c is the expansion of the substituted basis monomial c.
    """
    basis = monomial_basis(d)
    index = {mono: r for r, mono in enumerate(basis)}
    size = len(basis)
    zero = MPoly(3)
    mat = [[zero for _ in range(size)] for _ in range(size)]
    for col, mono in enumerate(basis):
        image = symbolic_unipotent_image(WeightedPolynomial(d, {mono: 1}))
        for out_mono, coeff in image.items():
            mat[index[out_mono]][col] = coeff
    return mat


# -- z-degree data -----------------------------------------------------------


def z_degree_range(p: WeightedPolynomial) -> tuple[int, int]:
    _require_nonzero(p)
    ks = [k for (_, _, k) in p.terms]
    return min(ks), max(ks)


def section_ideal(p: WeightedPolynomial, m: int) -> PolynomialIdeal:
    """Ideal in (alpha, beta, gamma) whose zeros q satisfy (z - q)^m | p."""
    l, mm, n, x, y, z = MPoly.gens(6)
    q = l * x * x + mm * x * y + n * y * y
    base = MPoly(3, dict(p.terms)).embed(6, [3, 4, 5])
    gens: list[MPoly] = []
    deriv = base
    for t in range(m):
        if t:
            deriv = deriv.diff(5)
        at_q = deriv.substitute([l, mm, n, x, y, q])
        gens.extend(c for c in at_q.split([3, 4, 5]).values() if not c.is_zero())
    return PolynomialIdeal(("alpha", "beta", "gamma"), tuple(gens))


def section_multiplicity(p: WeightedPolynomial, budget: int | None = None) -> int:
    """Largest m with (z - q)^m | p for some binary quadric q over the closure."""
    kmin, kmax = z_degree_range(p)
    m = kmin
    while m < kmax:
        if not ideal_is_proper(section_ideal(p, m + 1), budget):
            break
        m += 1
    return m


def section_witness(p: WeightedPolynomial, m: int, budget: int | None = None):
    """A rational (alpha, beta, gamma) with (z - q)^m | p, or None if none rational."""
    from .groebner import rational_point

    if m == 0:
        return UnipotentElement()
    point = rational_point(section_ideal(p, m), budget)
    return None if point is None else UnipotentElement(*point)


# -- binary forms ------------------------------------------------------------


def binary_form_rational_roots(
    coeffs: Mapping[tuple[int, int], object],
) -> tuple[list[tuple[tuple[int, int], int]], dict[tuple[int, int], Fraction]]:
    """Rational roots in P^1 of a binary form ``{(i, j): c}`` meaning ``c x^i y^j``.

    A root ``[a:b]`` is a zero ``b(a, b) = 0`` with coprime integers and
    corresponds to the linear factor ``b x - a y``.  Returns the roots with
    multiplicities, ordered by ``[a:b]``, and the residual cofactor, which has
    no rational root; the product of the factors and the residual equals the
    input up to a rational scalar.
    """
    import sympy

    terms = {(int(i), int(j)): as_fraction(c) for (i, j), c in coeffs.items()}
    terms = {k: v for k, v in terms.items() if v}
    if not terms:
        raise ZeroPolynomialError()
    degs = {i + j for i, j in terms}
    if len(degs) != 1:
        raise ValueError("binary form must be homogeneous")
    X, Y = sympy.symbols("x y")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X**i * Y**j for (i, j), c in terms.items())
    _, factors = sympy.factor_list(sympy.Poly(expr, X, Y, domain="QQ"))
    roots = []
    residual = sympy.Integer(1)
    for fac, mult in factors:
        if fac.total_degree() == 1:
            cx = fac.coeff_monomial(X)
            cy = fac.coeff_monomial(Y)
            # cx*x + cy*y = 0 at [a:b] = [-cy:cx]
            a, b = sympy.Rational(-cy), sympy.Rational(cx)
            den = sympy.ilcm(a.q, b.q)
            a, b = int(a * den), int(b * den)
            g = sympy.igcd(a, b)
            a, b = a // g, b // g
            if b < 0 or (b == 0 and a < 0):
                a, b = -a, -b
            roots.append(((a, b), int(mult)))
        else:
            residual *= fac.as_expr() ** mult
    roots.sort()
    res_poly = sympy.Poly(residual, X, Y, domain="QQ")
    res_terms = {}
    for (i, j), c in res_poly.terms():
        c = sympy.Rational(c)
        res_terms[(int(i), int(j))] = Fraction(int(c.p), int(c.q))
    return roots, res_terms


def random_polynomial(d: int, rng, density: float = 0.6, coeff_range: int = 3) -> WeightedPolynomial:
    """Seeded random element of X_d with small integer coefficients (never zero)."""
    basis = monomial_basis(d)
    while True:
        terms = {}
        for m in basis:
            if rng.random() < density:
                c = rng.randint(-coeff_range, coeff_range)
                if c:
                    terms[m] = c
        if terms:
            return WeightedPolynomial(d, terms)
