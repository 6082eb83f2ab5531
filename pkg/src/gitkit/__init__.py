"""Exact-arithmetic tools for GIT stability: torus tests, walls, non-reductive tests on X_d."""

from __future__ import annotations

__version__ = "0.1.0"

from .groebner import PolynomialIdeal, UndecidedError, ideal_is_proper
from .hull import Position, WeightPointSet, zero_position
from .nonreductive import (
    HLinearisation,
    WallTable,
    classify_corpus,
    h_oracle,
    h_test,
    h_walls,
    uhat_oracle,
    uhat_test,
)
from .torus import (
    P12Point,
    TorusLinearisation,
    embed_hat,
    product_torus_test,
    rank_stratum,
    tc_weight_map,
    torus_test,
    vgit_chambers,
)
from .verdict import StabilityVerdict, Status
from .weighted import (
    GL2Element,
    UnipotentElement,
    WeightedPolynomial,
    apply_gl2,
    apply_unipotent,
    monomial_basis,
    parse_polynomial,
    section_multiplicity,
    u_action_matrix,
    z_degree_range,
)

__all__ = [name for name in dir() if not name.startswith("_")]
