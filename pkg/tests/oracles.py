"""Independent reference computations shared by the test suites."""

from __future__ import annotations

import random

import sympy

from gitkit.nonreductive import HLinearisation
from gitkit.torus import tc_weight_map
from gitkit.weighted import WeightedPolynomial, random_polynomial

X, Y, Z = sympy.symbols("x y z")


def corpus(d: int, n: int, seed: int = 0) -> list[WeightedPolynomial]:
    r = random.Random(seed)
    return [random_polynomial(d, r, density=r.choice([0.3, 0.5, 0.8])) for _ in range(n)]


def independent_h_check(p: WeightedPolynomial, lin: HLinearisation, cert: dict) -> bool:
    """Rebuild h.p with sympy and check the certified covector is positive on every T_c weight.

    The certificate's h acts as "apply g, then u": the result is
    p(g (x, y), (z + alpha x^2 + beta x y + gamma y^2) / det g).
    Numerical (nonrational) witnesses are checked to 1e-8 relative size.
    """
    if cert.get("stage") == "endpoint":
        return lin.at_endpoint
    num = cert.get("nonrational", False) or (cert.get("u") is None and "u_numeric" in cert)
    conv = (lambda v: sympy.nsimplify(complex(v))) if num else (lambda v: sympy.Rational(v))
    g = cert.get("g_numeric") if num else cert.get("g")
    g = [[conv(v) for v in row] for row in g] if g else [[1, 0], [0, 1]]
    u = [conv(v) for v in (cert["u_numeric"] if num else cert["u"])]
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    gz = (Z + u[0] * X**2 + u[1] * X * Y + u[2] * Y**2) / det
    expr = sum(
        sympy.Rational(c.numerator, c.denominator)
        * (g[0][0] * X + g[0][1] * Y) ** i * (g[1][0] * X + g[1][1] * Y) ** j * gz**k
        for (i, j, k), c in p.terms.items()
    )
    poly = sympy.Poly(sympy.expand(expr), X, Y, Z)
    coeffs = {m: complex(c) for m, c in poly.terms()}
    scale = max(abs(c) for c in coeffs.values())
    r = cert["covector"]
    wmap = tc_weight_map(lin.d, lin.delta)
    support = [m for m, c in coeffs.items() if abs(c) > (1e-8 * scale if num else 0)]
    return bool(support) and all(r[0] * wmap[m][0] + r[1] * wmap[m][1] > 0 for m in support)
