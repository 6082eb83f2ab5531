"""Buchberger's algorithm over Q and the ideal-properness decision kernel.

The kernel answers one question exactly: does a finite system of rational
polynomial equations have a common zero over the algebraic closure?  By the
weak Nullstellensatz that happens iff 1 is not in the ideal, which a finished
Groebner basis computation decides.  A pair budget bounds the work; running
out raises :class:`UndecidedError` instead of guessing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .poly import MPoly, as_fraction

try:  # gmpy2 rationals are an order of magnitude faster than Fraction
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction

MAX_VARIABLES = 8
DEFAULT_BUDGET = 20000
BUDGET_ENV = "GITKIT_GROEBNER_BUDGET"


class UndecidedError(RuntimeError):
    """Raised when the Groebner pair budget is exhausted."""

    def __init__(self, message: str = "undecided: budget"):
        super().__init__(message)


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        return int(raw)
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class PolynomialIdeal:
    variables: tuple[str, ...]
    generators: tuple[MPoly, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "generators", tuple(self.generators))
        n = len(self.variables)
        for g in self.generators:
            if g.nvars != n:
                raise ValueError(
                    f"generator uses {g.nvars} variables, ideal declares {n}"
                )


# -- monomial orders --------------------------------------------------------


def degrevlex_key(e):
    return (sum(e), tuple(-a for a in reversed(e)))


def lex_key(e):
    return tuple(e)


ORDERS: dict[str, Callable] = {"degrevlex": degrevlex_key, "lex": lex_key}


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _coprime(a, b) -> bool:
    return all(not (x and y) for x, y in zip(a, b))


class _Poly:
    """Internal representation: dict plus cached leading monomial."""

    __slots__ = ("terms", "lm")

    def __init__(self, terms: dict, key):
        self.terms = terms
        self.lm = max(terms, key=key) if terms else None

    def monic(self, key) -> "_Poly":
        lc = self.terms[self.lm]
        if lc == 1:
            return self
        inv = 1 / lc
        return _Poly({e: c * inv for e, c in self.terms.items()}, key)


def _to_internal(p: MPoly, key) -> _Poly:
    return _Poly({e: _Q(c.numerator, c.denominator) for e, c in p.terms.items()}, key)


def _to_mpoly(nvars: int, p: _Poly) -> MPoly:
    return MPoly(nvars, {e: as_fraction(c) for e, c in p.terms.items()})


def _reduce(terms: dict, basis: list[_Poly], key, full: bool = True) -> dict:
    """Reduce ``terms`` modulo ``basis`` (all monic).  Destroys ``terms``."""
    result: dict = {}
    while terms:
        lm = max(terms, key=key)
        c = terms[lm]
        for g in basis:
            if _divides(g.lm, lm):
                shift = tuple(a - b for a, b in zip(lm, g.lm))
                for e, gc in g.terms.items():
                    ne = tuple(a + b for a, b in zip(e, shift))
                    v = terms.get(ne, 0) - c * gc
                    if v:
                        terms[ne] = v
                    else:
                        terms.pop(ne, None)
                break
        else:
            if not full:
                result.update(terms)
                return result
            result[lm] = c
            del terms[lm]
    return result


def _spoly(f: _Poly, g: _Poly) -> dict:
    l = _lcm(f.lm, g.lm)
    sf = tuple(a - b for a, b in zip(l, f.lm))
    sg = tuple(a - b for a, b in zip(l, g.lm))
    terms: dict = {}
    for e, c in f.terms.items():
        terms[tuple(a + b for a, b in zip(e, sf))] = c
    for e, c in g.terms.items():
        ne = tuple(a + b for a, b in zip(e, sg))
        v = terms.get(ne, 0) - c
        if v:
            terms[ne] = v
        else:
            terms.pop(ne, None)
    return terms


def _groebner_internal(
    polys: list[_Poly], key, budget: int, stop_on_unit: bool
) -> list[_Poly]:
    basis: list[_Poly] = []
    pairs: list[tuple[int, int, tuple]] = []
    nvars = len(next(iter(polys)).lm) if polys else 0
    unit = (0,) * nvars

    def add(h: _Poly):
        n = len(basis)
        basis.append(h)
        new = [(i, n, _lcm(basis[i].lm, h.lm)) for i in range(n) if basis[i] is not None]
        # Gebauer-Moeller criterion B on existing pairs
        kept = []
        for i, j, l in pairs:
            if (
                _divides(h.lm, l)
                and _lcm(basis[i].lm, h.lm) != l
                and _lcm(basis[j].lm, h.lm) != l
            ):
                continue
            kept.append((i, j, l))
        # criteria M and F among the new pairs
        chosen: list[tuple[int, int, tuple]] = []
        for cand in sorted(new, key=lambda t: key(t[2])):
            l = cand[2]
            if any(_divides(o[2], l) for o in chosen):
                continue
            chosen.append(cand)
        for i, j, l in chosen:
            if _coprime(basis[i].lm, h.lm):
                continue
            kept.append((i, j, l))
        pairs[:] = kept

    for p in polys:
        if not p.terms:
            continue
        red = _reduce(dict(p.terms), [b for b in basis if b is not None], key)
        if not red:
            continue
        h = _Poly(red, key).monic(key)
        if h.lm == unit and stop_on_unit:
            return [h]
        add(h)

    steps = 0
    while pairs:
        steps += 1
        if steps > budget:
            raise UndecidedError()
        best = min(range(len(pairs)), key=lambda t: key(pairs[t][2]))
        i, j, _ = pairs.pop(best)
        s = _spoly(basis[i], basis[j])
        if not s:
            continue
        red = _reduce(s, basis, key)
        if not red:
            continue
        h = _Poly(red, key).monic(key)
        if h.lm == unit and stop_on_unit:
            return [h]
        add(h)

    # minimalize and interreduce
    minimal: list[_Poly] = []
    for idx, g in enumerate(basis):
        if any(
            _divides(o.lm, g.lm) and (o.lm != g.lm or k < idx)
            for k, o in enumerate(basis)
            if k != idx
        ):
            continue
        minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = [o for k, o in enumerate(minimal) if k != idx]
        tail = dict(g.terms)
        lead = tail.pop(g.lm)
        red = _reduce(tail, others, key)
        red[g.lm] = lead
        reduced.append(_Poly(red, key))
    reduced.sort(key=lambda g: key(g.lm))
    return reduced


def groebner(
    generators: Sequence[MPoly],
    order: str = "degrevlex",
    budget: int | None = None,
) -> list[MPoly]:
    """Reduced Groebner basis (monic) of the ideal generated by ``generators``."""
    key = ORDERS[order]
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        return []
    nvars = gens[0].nvars
    internal = [_to_internal(g, key) for g in gens]
    basis = _groebner_internal(
        internal, key, default_budget() if budget is None else budget, False
    )
    return [_to_mpoly(nvars, g) for g in basis]


def ideal_is_proper(ideal: PolynomialIdeal, budget: int | None = None) -> bool:
    """True iff 1 is not in the ideal, i.e. the generators share a zero over Qbar."""
    if len(ideal.variables) > MAX_VARIABLES:
        raise ValueError(
            f"ideal has {len(ideal.variables)} variables; the kernel accepts at most {MAX_VARIABLES}"
        )
    gens = [g for g in ideal.generators if not g.is_zero()]
    if not gens:
        return True
    if any(g.is_constant() for g in gens):
        return False
    key = degrevlex_key
    internal = [_to_internal(g, key) for g in gens]
    basis = _groebner_internal(
        internal, key, default_budget() if budget is None else budget, True
    )
    return not any(not any(g.lm) for g in basis)


def normal_form(p: MPoly, basis: Sequence[MPoly], order: str = "degrevlex") -> MPoly:
    key = ORDERS[order]
    internal = [_to_internal(g, key).monic(key) for g in basis if not g.is_zero()]
    red = _reduce(_to_internal(p, key).terms, internal, key)
    return MPoly(p.nvars, {e: as_fraction(c) for e, c in red.items()})


# -- witness extraction ------------------------------------------------------


def _univariate_rational_roots(coeffs: dict[int, Fraction]) -> list[Fraction]:
    """Exact rational roots of a univariate polynomial given as degree->coeff."""
    import sympy

    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * t**k for k, c in coeffs.items())
    roots = []
    for factor, _mult in sympy.factor_list(sympy.Poly(expr, t, domain="QQ"))[1]:
        if factor.degree() == 1:
            a, b = factor.all_coeffs()
            r = -sympy.Rational(b) / sympy.Rational(a)
            roots.append(Fraction(int(r.p), int(r.q)))
    return sorted(set(roots))


ELIMINATION_BUDGET = 400
SMALL_VALUES = (0, 1, -1, 2, -2, 3, -3, Fraction(1, 2), Fraction(-1, 2))


def rational_point(
    ideal: PolynomialIdeal,
    budget: int | None = None,
    free_values: Sequence = SMALL_VALUES,
    elimination_budget: int = ELIMINATION_BUDGET,
) -> tuple[Fraction, ...] | None:
    """Try to find a rational common zero of a proper ideal.

    Variables are fixed one at a time.  A candidate value is accepted only if
    the ideal stays proper after substituting it, so every accepted partial
    assignment extends to a full zero over the closure.  Small values are
    tried first; otherwise the rational roots of a lex eliminant are tried,
    with the elimination capped at ``elimination_budget`` steps.  Returns None
    when no candidate works or the cap is hit (the zero set may still be
    nonempty over the closure).
    """
    n = len(ideal.variables)
    gens = list(ideal.generators)
    if not ideal_is_proper(ideal, budget):
        return None
    fixed: dict[int, Fraction] = {}

    def accept(var: int, cand: Fraction) -> bool:
        trial = dict(fixed)
        trial[var] = cand
        sub = [g.partial_evaluate(trial) for g in gens]
        if ideal_is_proper(PolynomialIdeal(ideal.variables, sub), budget):
            fixed[var] = cand
            return True
        return False

    for var in reversed(range(n)):
        if any(accept(var, Fraction(v)) for v in free_values):
            continue
        current = [g.partial_evaluate(fixed) for g in gens]
        current = [g for g in current if not g.is_zero()]
        try:
            elim = groebner(current, order="lex", budget=elimination_budget)
        except UndecidedError:
            return None
        # with lex order, polynomials in the last free variable alone come last
        uni = [g for g in elim if g.used_variables() <= {var} and not g.is_zero()]
        if not uni:
            return None
        coeffs = {e[var]: c for e, c in uni[0].terms.items()}
        if not any(accept(var, cand) for cand in _univariate_rational_roots(coeffs)):
            return None
    return tuple(fixed[i] for i in range(n))


def complex_point(
    ideal: PolynomialIdeal,
    seed: int = 0,
    starts: int = 40,
    tol: float = 1e-10,
) -> tuple[complex, ...] | None:
    """Numerical common zero (Levenberg-Marquardt on real/imaginary parts).

    Used only to produce a concrete, independently checkable witness when the
    exact kernel has proved solvability but no rational zero was found.
    """
    import numpy as np
    from scipy.optimize import least_squares

    n = len(ideal.variables)
    gens = [g for g in ideal.generators if not g.is_zero()]
    if not gens:
        return tuple(0j for _ in range(n))
    derivs = [[g.diff(i) for i in range(n)] for g in gens]

    def residual(v):
        z = v[:n] + 1j * v[n:]
        vals = np.array([g.evaluate_complex(z) for g in gens])
        return np.concatenate([vals.real, vals.imag])

    def jac(v):
        z = v[:n] + 1j * v[n:]
        J = np.array([[d.evaluate_complex(z) for d in row] for row in derivs])
        # d/dRe = J, d/dIm = iJ
        top = np.hstack([J.real, -J.imag])
        bottom = np.hstack([J.imag, J.real])
        return np.vstack([top, bottom])

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        x0 = rng.normal(scale=1.5, size=2 * n)
        sol = least_squares(residual, x0, jac=jac, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        err = float(np.max(np.abs(residual(sol.x)))) if len(gens) else 0.0
        if best is None or err < best[0]:
            best = (err, sol.x)
        if err < tol:
            break
    if best is None or best[0] >= tol:
        return None
    v = best[1]
    return tuple(complex(a, b) for a, b in zip(v[:n], v[n:]))
