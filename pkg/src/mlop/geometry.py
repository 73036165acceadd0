"""Linear ordering polytope utilities.

Vertex enumeration, 3-cycle (transitivity) residuals, membership tests, L1
projection onto the full polytope, and the smallest group count at which the
restricted mixture optimum matches the full-polytope projection.  Membership
and projection are decided by an exact LP over explicit vertex weights,
since complete facet descriptions are unavailable for general n; guards keep
the vertex sets small (at most 8! vertices enumerated, LPs up to 7!).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import InvalidInput, LinearOrder, PreferenceMatrix, num_pairs, pair_index
from .exact import ExactConfig, SizeGuardExceeded, solve_exact
from .simplex_fit import _fit_simplex_l1

VERTEX_GUARD_N = 8
MEMBERSHIP_GUARD_N = 7
SATURATION_GUARD_N = 4

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class PolytopeVertexSet:
    """All n! precedence vectors, with the orders they encode."""

    n: int
    orders: tuple[LinearOrder, ...]
    vertices: np.ndarray  # (n!, C(n,2)) uint8, rows aligned with orders


@lru_cache(maxsize=None)
def enumerate_vertices(n: int) -> PolytopeVertexSet:
    """Complete, duplicate-free vertex set in lexicographic permutation order."""
    if n < 2:
        raise InvalidInput(f"need n >= 2, got {n}")
    if n > VERTEX_GUARD_N:
        raise SizeGuardExceeded(
            f"vertex enumeration is guarded to n <= {VERTEX_GUARD_N}, got n={n}"
        )
    orders = tuple(LinearOrder(p) for p in itertools.permutations(range(n)))
    vertices = np.stack([o.prec for o in orders])
    vertices.flags.writeable = False
    return PolytopeVertexSet(n, orders, vertices)


def _as_point(point, n: int) -> np.ndarray:
    arr = np.asarray(point, dtype=np.float64)
    if arr.shape != (num_pairs(n),):
        raise InvalidInput(
            f"point for n={n} must have length {num_pairs(n)}, got shape {arr.shape}"
        )
    return arr


def cycle_residuals(point, n: int) -> list[tuple[tuple[int, int, int], float]]:
    """Transitivity residuals x_rs - x_rt + x_st for every triple r < s < t.

    A point violates a 3-cycle facet iff some residual falls outside [0, 1];
    precedence vectors of linear orders always land exactly on {0, 1}.
    """
    arr = _as_point(point, n)
    out = []
    for r in range(n - 2):
        for s in range(r + 1, n - 1):
            for t in range(s + 1, n):
                res = (
                    arr[pair_index(n, r, s)]
                    - arr[pair_index(n, r, t)]
                    + arr[pair_index(n, s, t)]
                )
                out.append(((r, s, t), float(res)))
    return out


def cycle_violations(point, n: int, tol: float = 1e-12):
    """Triples whose residual leaves [0, 1] by more than tol."""
    return [
        (triple, res)
        for triple, res in cycle_residuals(point, n)
        if res < -tol or res > 1.0 + tol
    ]


def l1_projection_full(point, n: int) -> tuple[np.ndarray, float]:
    """Globally optimal L1 projection of a point onto the full polytope.

    Returns (projected point, distance); the optimal point is not unique in
    general, but the LP's Bland pivoting makes the returned one deterministic.
    """
    if n > MEMBERSHIP_GUARD_N:
        raise SizeGuardExceeded(
            f"projection is guarded to n <= {MEMBERSHIP_GUARD_N}, got n={n}"
        )
    arr = _as_point(point, n)
    V = enumerate_vertices(n)
    w, dist = _fit_simplex_l1(V.vertices.astype(np.float64), arr)
    return w @ V.vertices.astype(np.float64), dist


def polytope_membership(point, n: int) -> bool:
    """True iff the point is a convex combination of precedence vectors."""
    _, dist = l1_projection_full(point, n)
    return dist <= MEMBERSHIP_TOL


def caratheodory_saturation(point, n: int, tol: float = MEMBERSHIP_TOL) -> int:
    """Smallest g whose restricted optimum OPT_g matches the full projection.

    Always at most C(n,2) + 1; at most C(n,2) when the point lies outside
    the polytope (its projection then sits on a proper face).
    """
    if n > SATURATION_GUARD_N:
        raise SizeGuardExceeded(
            f"saturation search is guarded to n <= {SATURATION_GUARD_N}, got n={n}"
        )
    arr = _as_point(point, n)
    _, dist = l1_projection_full(arr, n)
    bound = num_pairs(n) + 1
    if not polytope_membership(arr, n):
        bound = num_pairs(n)
    C = PreferenceMatrix(n, arr)
    for g in range(1, bound + 1):
        cfg = ExactConfig(g=g, max_n=SATURATION_GUARD_N, max_g=bound)
        _, obj, _ = solve_exact(C, cfg)
        if abs(obj - dist) <= tol:
            return g
    raise ArithmeticError(
        "no g within the Caratheodory bound reached the projection distance; "
        "tolerance too tight for this input"
    )
