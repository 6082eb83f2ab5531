"""Moment maps for unitary representations and norm-square gradient flow.

This is the floating point side of the package.  It exists to cross-check the
exact torus verdicts: a point is semistable exactly when the closure of its
complex orbit meets the zero level of the moment map, so descending ||mu||^2
along the complexified directions either reaches 0 or stalls at a positive
value.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .hull import WeightPointSet, hull_vertices_2d
from .torus import TorusLinearisation, torus_test
from .verdict import Status

TWO_PI = 2 * math.pi


@dataclass
class CompactRepresentation:
    """Generators rho_*(a_j) of the compact Lie algebra, as skew-hermitian matrices.

    ``weights`` is set for diagonal (torus) representations; generator j is
    then i * diag(weight_k[j]).
    """

    dim: int
    generators: list[np.ndarray]
    weights: list[tuple[int, ...]] | None = None

    def __post_init__(self):
        gens = []
        for g in self.generators:
            g = np.asarray(g, dtype=complex)
            if g.shape != (self.dim, self.dim):
                raise ValueError(f"generator of shape {g.shape}, expected {(self.dim, self.dim)}")
            if not np.allclose(g, -g.conj().T, atol=1e-12):
                raise ValueError("generators must be skew-hermitian")
            gens.append(g)
        self.generators = gens

    @classmethod
    def diagonal(cls, weights: Sequence) -> "CompactRepresentation":
        ws = [tuple(w) if isinstance(w, (tuple, list)) else (w,) for w in weights]
        if not ws:
            raise ValueError("no weights")
        rank = len(ws[0])
        if any(len(w) != rank for w in ws):
            raise ValueError("weights of mixed rank")
        gens = [1j * np.diag([float(w[j]) for w in ws]) for j in range(rank)]
        return cls(len(ws), gens, ws)

    @classmethod
    def from_json(cls, data: dict) -> "CompactRepresentation":
        if data.get("mode", "diagonal") == "diagonal":
            rep = cls.diagonal(data["weights"])
            if "dim" in data and data["dim"] != rep.dim:
                raise ValueError("dim does not match the number of weights")
            return rep
        gens = [np.array([[_complex(v) for v in row] for row in g]) for g in data["generators"]]
        return cls(int(data["dim"]), gens)

    @property
    def hermitian(self) -> list[np.ndarray]:
        # H_j = -i rho_*(a_j); exp(-s H) is the complexified direction
        return [-1j * g for g in self.generators]


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(Fraction(str(v[0]))), float(Fraction(str(v[1]))))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


@dataclass
class ProjectivePoint:
    coords: np.ndarray

    def __init__(self, coords):
        c = np.asarray([_complex(v) for v in coords], dtype=complex)
        if not np.any(c != 0):
            raise ValueError("zero vector is not a projective point")
        self.coords = c

    def normalized(self) -> np.ndarray:
        return self.coords / np.linalg.norm(self.coords)


class FlowClass(str, enum.Enum):
    ZERO_REACHED = "ZeroReached"
    POSITIVE_INFIMUM = "PositiveInfimum"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class FlowResult:
    endpoint: ProjectivePoint
    residual: float
    iterations: int
    classification: FlowClass
    trace: list[float] = field(default_factory=list)

    def to_json(self, with_trace: bool = False) -> dict:
        out = {
            "classification": self.classification.value,
            "residual": self.residual,
            "iterations": self.iterations,
            "endpoint": [[z.real, z.imag] for z in self.endpoint.coords],
        }
        if with_trace:
            out["trace"] = self.trace
        return out


def _as_vector(x) -> np.ndarray:
    if isinstance(x, ProjectivePoint):
        return x.coords
    v = np.asarray(x, dtype=complex)
    if not np.any(v != 0):
        raise ValueError("zero vector is not a projective point")
    return v


def moment_value(rep: CompactRepresentation, x) -> np.ndarray:
    """Re( x^* rho_*(a) x / (2 pi i |x|^2) ) for each generator a."""
    v = _as_vector(x)
    norm2 = float(np.vdot(v, v).real)
    return np.array([(np.vdot(v, g @ v) / (TWO_PI * 1j * norm2)).real for g in rep.generators])


def product_moment_value(repA, a, repY, y, N: float) -> np.ndarray:
    mu_a = moment_value(repA, a)
    if not repY.generators:
        return N * mu_a
    return N * mu_a + moment_value(repY, y)


def twist_moment(mu: Sequence[float], chi_derivative) -> np.ndarray:
    """Add the central constant of a character, in weight units (so 1/2pi applies)."""
    mu = np.asarray(mu, dtype=float)
    chi = np.broadcast_to(np.asarray(chi_derivative, dtype=float), mu.shape)
    return mu + chi / TWO_PI


def _objective(rep, v, twist) -> tuple[float, np.ndarray]:
    mu = twist_moment(moment_value(rep, v), twist)
    return float(mu @ mu), mu


def _expm_hermitian(A: np.ndarray, s: float) -> np.ndarray:
    vals, vecs = np.linalg.eigh(A)
    return (vecs * np.exp(-s * vals)) @ vecs.conj().T


def _direction(rep, mu) -> np.ndarray:
    return sum(m * h for m, h in zip(mu, rep.hermitian))


def flow_derivative(rep: CompactRepresentation, x, twist=0.0) -> float:
    """d/ds ||mu_twisted||^2 at s = 0 along x -> exp(-s A) x, A = sum mu_j H_j."""
    v = _as_vector(x)
    _, mu = _objective(rep, v, twist)
    A = _direction(rep, mu)
    D = float(np.vdot(v, v).real)
    dD = -2 * float(np.vdot(v, A @ v).real)
    total = 0.0
    for m, H in zip(mu, rep.hermitian):
        N = float(np.vdot(v, H @ v).real)
        dN = -float(np.vdot(v, (A @ H + H @ A) @ v).real)
        total += 2 * m * (dN * D - N * dD) / (TWO_PI * D * D)
    return total


def kempf_ness_flow(
    rep: CompactRepresentation,
    x0,
    twist=0.0,
    step: float = 1.0,
    tol: float = 1e-8,
    max_iter: int = 20000,
    window: int = 100,
    stall: float | None = None,
    min_step: float = 1e-30,
    max_log_step: float = 1.0,
    check_monotone: bool = True,
) -> FlowResult:
    """Backtracking descent of ||mu + chi||^2 along exp(-s A) with A = sum mu_j H_j.

    The run stops as a positive infimum once the residual has dropped by less
    than ``stall`` (default ``tol``) over the last ``window`` steps.
    """
    if tol <= 0 or step <= 0:
        raise ValueError("tol and step must be positive")
    if stall is None:
        stall = tol
    v = _as_vector(x0)
    v = v / np.linalg.norm(v)
    f, mu = _objective(rep, v, twist)
    trace = [math.sqrt(f)]
    history = [f]
    it = 0
    cls = FlowClass.INCONCLUSIVE
    while True:
        if math.sqrt(f) < tol:
            cls = FlowClass.ZERO_REACHED
            break
        if it >= max_iter:
            break
        A = _direction(rep, mu)
        # bound the change of log|coordinates| so no coordinate is crushed in one step
        spread = float(np.ptp(np.linalg.eigvalsh(A))) if A.shape[0] > 1 else 0.0
        s = min(step, max_log_step / spread) if spread > 0 else step
        while True:
            w = _expm_hermitian(A, s) @ v
            w = w / np.linalg.norm(w)
            fw, muw = _objective(rep, w, twist)
            if fw < f:
                break
            s /= 2
            if s < min_step:
                w = None
                break
        if w is None:
            cls = FlowClass.POSITIVE_INFIMUM
            break
        if check_monotone and fw > f:
            raise AssertionError("flow increased the objective")
        v, f, mu = w, fw, muw
        it += 1
        trace.append(math.sqrt(f))
        history.append(f)
        if len(history) > window:
            old = history[-window - 1]
            if math.sqrt(old) - math.sqrt(f) < stall:
                cls = FlowClass.POSITIVE_INFIMUM if math.sqrt(f) >= tol else FlowClass.ZERO_REACHED
                break
    return FlowResult(ProjectivePoint(v), math.sqrt(f), it, cls, trace)


# -- comparison with the exact test ----------------------------------------------


def _segment_distance(a, b) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    den = dx * dx + dy * dy
    t = 0.0 if den == 0 else max(0.0, min(1.0, -(a[0] * dx + a[1] * dy) / den))
    return math.hypot(a[0] + t * dx, a[1] + t * dy)


def _boundary_distance(points: list[tuple[float, ...]]) -> float:
    """Euclidean distance from 0 to the boundary of conv(points) in the ambient space.

    A hull of lower dimension is all boundary, so this is then the distance to the hull.
    """
    dim = len(points[0])
    if dim == 1:
        lo = min(p[0] for p in points)
        hi = max(p[0] for p in points)
        if lo <= 0 <= hi:
            return min(-lo, hi)
        return min(abs(lo), abs(hi))
    verts = hull_vertices_2d(WeightPointSet(2, [tuple(Fraction(c) for c in p) for p in points]))
    verts = [(float(a), float(b)) for a, b in verts]
    if len(verts) == 1:
        return math.hypot(*verts[0])
    if len(verts) == 2:
        return _segment_distance(*verts)
    return min(_segment_distance(a, b) for a, b in zip(verts, verts[1:] + verts[:1]))


@dataclass
class FlowComparison:
    samples: int
    compared: int
    excluded: int
    agree: int
    mismatches: list[dict]
    max_iterations: int = 0

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "compared": self.compared,
            "excluded_by_margin": self.excluded,
            "agree": self.agree,
            "max_iterations": self.max_iterations,
            "mismatches": self.mismatches,
        }


def compare_flow_exact(
    weights: Sequence,
    twist=0,
    n_samples: int = 100,
    seed: int = 0,
    margin: float = 0.25,
    tol: float = 1e-8,
    max_iter: int = 10000,
    count_filtered: bool = False,
) -> FlowComparison:
    """Exact torus verdict against the flow classification on random points.

    With ``count_filtered`` the run keeps drawing until ``n_samples`` points
    have passed the margin filter (at most 100 * n_samples draws).
    """
    rep = CompactRepresentation.diagonal(weights)
    rank = len(rep.weights[0])
    tw = tuple(Fraction(str(t)) for t in np.broadcast_to(np.asarray(twist, dtype=object), (rank,)))
    lin = TorusLinearisation(rank, [w for w in rep.weights], tw)
    rng = random.Random(seed)
    compared = excluded = agree = max_its = 0
    mismatches = []
    n = -1
    while True:
        n += 1
        if count_filtered:
            if compared >= n_samples or n >= 100 * n_samples:
                break
        elif n >= n_samples:
            break
        sub = random.Random(rng.getrandbits(64))
        support = [k for k in range(rep.dim) if sub.random() < 0.6]
        if not support:
            support = [sub.randrange(rep.dim)]
        x = np.zeros(rep.dim, dtype=complex)
        for k in support:
            x[k] = complex(sub.gauss(0, 1), sub.gauss(0, 1))
        shifted = [tuple(float(c + t) for c, t in zip(rep.weights[k], tw)) for k in support]
        if _boundary_distance(shifted) < margin:
            excluded += 1
            continue
        exact = torus_test(lin.support_points(support), lin)
        flow = kempf_ness_flow(rep, x, [float(t) for t in tw], tol=tol, max_iter=max_iter)
        compared += 1
        max_its = max(max_its, flow.iterations)
        expected = FlowClass.POSITIVE_INFIMUM if exact.status is Status.UNSTABLE else FlowClass.ZERO_REACHED
        if flow.classification is expected:
            agree += 1
        else:
            mismatches.append(
                {
                    "sample": n,
                    "support": support,
                    "exact": exact.status.value,
                    "flow": flow.classification.value,
                    "residual": flow.residual,
                }
            )
    return FlowComparison(n, compared, excluded, agree, mismatches, max_its)
