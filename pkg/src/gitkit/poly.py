"""Sparse multivariate polynomials with exact rational coefficients.

An :class:`MPoly` lives in a ring with a fixed number of variables and stores
its terms as a dict from exponent tuples to nonzero :class:`~fractions.Fraction`
coefficients.  Variable names are carried by the callers (ideals, matrices),
not by the polynomial itself.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    # gmpy2.mpq and friends
    return Fraction(int(value.numerator), int(value.denominator))


def format_fraction(q: Fraction) -> str:
    """Serialize as ``"n"`` or ``"p/q"``."""
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _add_exp(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class MPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not match {nvars} variables")
                c = as_fraction(c)
                if c:
                    clean[tuple(exp)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: dict[Exponent, Fraction]) -> "MPoly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def const(cls, nvars: int, c=1) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls._raw(nvars, {tuple(exp): Fraction(1)})

    @classmethod
    def gens(cls, nvars: int) -> list["MPoly"]:
        return [cls.var(nvars, i) for i in range(nvars)]

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def used_variables(self) -> set[int]:
        return {i for e in self.terms for i, a in enumerate(e) if a}

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MPoly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"MPoly({self.nvars}, {self.to_str()})"

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"v{i}" for i in range(self.nvars)]
        out = []
        for exp in sorted(self.terms, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                n if a == 1 else f"{n}^{a}" for n, a in zip(names, exp) if a
            )
            if not mono:
                body = format_fraction(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{format_fraction(abs(c))}*{mono}"
            sign = "-" if c < 0 else "+"
            out.append((sign, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            text += f" {sign} {body}"
        return text

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other.nvars != self.nvars:
                raise ValueError("ring mismatch")
            return other
        return MPoly.const(self.nvars, other)

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return MPoly._raw(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "MPoly":
        c = as_fraction(c)
        if not c:
            return MPoly(self.nvars)
        return MPoly._raw(self.nvars, {e: a * c for e, a in self.terms.items()})

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return self.scale(other)
        other = self._coerce(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exp(e1, e2)
                s = terms.get(e, 0) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        return MPoly._raw(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise ValueError("negative power")
        result = MPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def diff(self, i: int) -> "MPoly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = c * e[i]
        return MPoly._raw(self.nvars, terms)

    # -- evaluation and substitution ------------------------------------

    def evaluate(self, point: Sequence):
        """Evaluate at a point; works for any numeric type supporting ``*``/``+``."""
        if len(point) != self.nvars:
            raise ValueError("point has wrong length")
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, a in zip(point, e):
                if a:
                    term = term * v**a
            total = total + term
        return total

    def evaluate_complex(self, point: Sequence[complex]) -> complex:
        total = 0j
        for e, c in self.terms.items():
            term = complex(float(c))
            for v, a in zip(point, e):
                if a:
                    term *= v**a
            total += term
        return total

    def substitute(self, images: Sequence["MPoly"]) -> "MPoly":
        """Compose: replace variable i by ``images[i]`` (all in one target ring)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not images:
            return MPoly(0, dict(self.terms))
        target = images[0].nvars
        powers: list[list[MPoly]] = [[MPoly.const(target, 1)] for _ in images]
        result = MPoly(target)
        for e, c in self.terms.items():
            term = MPoly.const(target, c)
            for i, a in enumerate(e):
                if a:
                    cache = powers[i]
                    while len(cache) <= a:
                        cache.append(cache[-1] * images[i])
                    term = term * cache[a]
            result = result + term
        return result

    def partial_evaluate(self, values: Mapping[int, object]) -> "MPoly":
        """Substitute rational values for some variables, keeping the ring size."""
        terms: dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = list(e)
            for i, v in values.items():
                if ne[i]:
                    c = c * as_fraction(v) ** ne[i]
                    ne[i] = 0
            if c:
                key = tuple(ne)
                s = terms.get(key, 0) + c
                if s:
                    terms[key] = s
                else:
                    terms.pop(key, None)
        return MPoly._raw(self.nvars, terms)

    def split(self, outer: Sequence[int]) -> dict[Exponent, "MPoly"]:
        """Group terms by the exponents of the ``outer`` variables.

        Returns a map from outer exponent tuples to coefficient polynomials in
        the remaining variables (in their original order).
        """
        outer = list(outer)
        inner = [i for i in range(self.nvars) if i not in outer]
        groups: dict[Exponent, dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in outer)
            groups.setdefault(key, {})[tuple(e[i] for i in inner)] = c
        return {k: MPoly._raw(len(inner), v) for k, v in groups.items()}

    def embed(self, nvars: int, positions: Sequence[int]) -> "MPoly":
        """Move into a larger ring, variable i going to ``positions[i]``."""
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, a in enumerate(e):
                ne[positions[i]] += a
            terms[tuple(ne)] = c
        return MPoly._raw(nvars, terms)


def poly_from_terms(nvars: int, items: Iterable[tuple[Exponent, object]]) -> MPoly:
    p = MPoly(nvars)
    for e, c in items:
        p = p + MPoly(nvars, {tuple(e): c})
    return p
