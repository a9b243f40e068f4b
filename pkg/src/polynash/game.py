"""Constrained bi-matrix games and the epigraphs of their optimal value functions.

For a game ``(A, B; S, T)`` player 1 picks ``x`` in ``S`` and earns ``x A y``;
player 2 picks ``y`` in ``T`` and earns ``x B y``. The value functions are

    eta(y) = max_{x in S} x A y      (player 1's best-response value, on T)
    xi(x)  = max_{y in T} x B y      (player 2's best-response value, on S)

Both are polyhedral convex, and their epigraphs are built here by two
independent constructions: directly from the vertices of the opponent's set,
and by composing polyhedral-calculus operations around a polar cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from polynash import lp, polyhedra
from polynash.errors import ConsistencyError, GameError
from polynash.linalg import as_matrix, norm_inf
from polynash.reps import FEAS_TOL, HRep, VRep, sort_rows

VALUE_TOL = 1e-7


class Polytope:
    """Nonempty bounded polyhedron kept in both V- and H-representation.

    Both representations are computed at construction, so instances are
    immutable and safe to share between threads.
    """

    __slots__ = ("vrep", "hrep")

    def __init__(self, vrep: VRep, hrep: HRep):
        if vrep.is_empty:
            raise GameError("strategy set is empty")
        if len(vrep.rays):
            raise GameError("strategy set is unbounded")
        self.vrep = vrep
        self.hrep = hrep

    @classmethod
    def from_vertices(cls, points) -> Polytope:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.size == 0:
            raise GameError("strategy set is empty")
        v = polyhedra.prune(VRep.from_points(points))
        return cls(v, polyhedra.v_to_h(v))

    @classmethod
    def from_hrep(cls, h: HRep) -> Polytope:
        v = polyhedra.h_to_v(h)
        if v.is_empty:
            raise GameError("strategy set is empty")
        if len(v.rays):
            raise GameError("strategy set is unbounded")
        return cls(v, h)

    @classmethod
    def simplex(cls, dim: int) -> Polytope:
        return cls(VRep.from_points(np.eye(dim)), HRep.simplex(dim))

    @property
    def dim(self) -> int:
        return self.vrep.dim

    @property
    def vertices(self) -> np.ndarray:
        return self.vrep.vertices

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        return self.hrep.contains(x, tol)

    def is_simplex(self) -> bool:
        v = self.vertices
        return v.shape[0] == v.shape[1] and np.allclose(sort_rows(v), np.eye(v.shape[1])[::-1], atol=1e-12)

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, facets={self.hrep.rows})"


def as_polytope(spec, dim: int) -> Polytope:
    """Coerce ``None`` (simplex), a Polytope, a VRep/HRep or a vertex array (rows)."""
    if spec is None:
        return Polytope.simplex(dim)
    if isinstance(spec, Polytope):
        return spec
    if isinstance(spec, HRep):
        return Polytope.from_hrep(spec)
    if isinstance(spec, VRep):
        if len(spec.rays):
            raise GameError("strategy set is unbounded")
        return Polytope.from_vertices(spec.vertices)
    return Polytope.from_vertices(spec)


@dataclass(frozen=True, eq=False)
class ConstrainedGame:
    a: np.ndarray
    b: np.ndarray
    s: Polytope
    t: Polytope

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n(self) -> int:
        return self.a.shape[1]

    @property
    def payoff_scale(self) -> float:
        return max(1.0, norm_inf(self.a), norm_inf(self.b))

    @property
    def is_unconstrained(self) -> bool:
        return self.s.is_simplex() and self.t.is_simplex()


def make_game(a, b, s=None, t=None) -> ConstrainedGame:
    """Validated game; missing strategy sets default to probability simplices."""
    try:
        a = as_matrix(a, "A")
        b = as_matrix(b, "B")
    except ValueError as exc:
        raise GameError(str(exc)) from exc
    if a.shape != b.shape or a.size == 0:
        raise GameError(f"payoff matrices must share a nonempty shape, got {a.shape} and {b.shape}")
    m, n = a.shape
    s = as_polytope(s, m)
    t = as_polytope(t, n)
    if s.dim != m or t.dim != n:
        raise GameError(f"strategy sets live in R^{s.dim} x R^{t.dim}, payoffs are {m} x {n}")
    return ConstrainedGame(a, b, s, t)


def payoff(g: ConstrainedGame, x, y, tol: float = FEAS_TOL) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not g.s.contains(x, tol) or not g.t.contains(y, tol):
        raise GameError("strategy outside its feasible set")
    return float(x @ g.a @ y), float(x @ g.b @ y)


class OptimalValue(NamedTuple):
    """Best-response value; ``feasible`` is False (value +inf) off the domain."""

    feasible: bool
    value: float
    argmax: np.ndarray | None


def _best_response(weights: np.ndarray, own: Polytope) -> OptimalValue:
    res = lp.solve(lp.LpProblem(weights, own.hrep))
    if not res.optimal:
        raise ConsistencyError(f"best-response LP ended {res.status.value} on a bounded nonempty set")
    return OptimalValue(True, res.value, res.point)


def eta(g: ConstrainedGame, y, tol: float = FEAS_TOL) -> OptimalValue:
    """Player 1's optimal value against ``y``."""
    y = np.asarray(y, dtype=float)
    if not g.t.contains(y, tol):
        return OptimalValue(False, math.inf, None)
    return _best_response(g.a @ y, g.s)


def xi(g: ConstrainedGame, x, tol: float = FEAS_TOL) -> OptimalValue:
    """Player 2's optimal value against ``x``."""
    x = np.asarray(x, dtype=float)
    if not g.s.contains(x, tol):
        return OptimalValue(False, math.inf, None)
    return _best_response(g.b.T @ x, g.t)


def _sides(g: ConstrainedGame, player: int):
    """(domain, opponent set, M) with value(z) = max over w in opponent of w M z."""
    if player == 1:
        return g.t, g.s, g.a
    if player == 2:
        return g.s, g.t, g.b.T
    raise ValueError(f"player must be 1 or 2, got {player}")


def value_function(g: ConstrainedGame, player: int):
    return eta if player == 1 else xi


def epigraph_direct(g: ConstrainedGame, player: int) -> HRep:
    """Epigraph of eta (player 1) or xi (player 2) from the opponent set's vertices.

    Rows: the domain's inequalities, plus ``(w M) z - r <= 0`` for every vertex w.
    """
    dom, other, mat = _sides(g, player)
    payoff_rows = np.hstack([other.vertices @ mat, -np.ones((len(other.vertices), 1))])
    dom_rows = np.hstack([dom.hrep.a, np.zeros((dom.hrep.rows, 1))])
    return HRep(np.vstack([dom_rows, payoff_rows]), np.concatenate([dom.hrep.b, np.zeros(len(payoff_rows))]))


def epigraph_calculus(g: ConstrainedGame, player: int) -> HRep:
    """Same epigraph as :func:`epigraph_direct`, composed as

        (D x R)  intersect  [[M, 0], [0, -1]]^{-1} [ (O x {1})^* ]

    with D the domain and O the opponent's set.
    """
    dom, other, mat = _sides(g, player)
    lifted = polyhedra.h_to_v(polyhedra.product(other.hrep, HRep.point([1.0])))
    cone = polyhedra.polar_cone(lifted)
    pre = polyhedra.inverse_image(polyhedra.block_map(mat, [[-1.0]]), cone)
    return polyhedra.intersect(polyhedra.product(dom.hrep, HRep.universe(1)), pre)


def epigraph_dual(g: ConstrainedGame, player: int) -> HRep:
    """Epigraph from the LP dual of the best-response problem, projected by Fourier-Motzkin."""
    dom, other, mat = _sides(g, player)
    prep = lp.dual_epi_prep(other.hrep, mat)
    projected = polyhedra.p_to_h(prep)
    return polyhedra.intersect(polyhedra.product(dom.hrep, HRep.universe(1)), projected)


EPIGRAPH_ROUTES = {
    "direct": epigraph_direct,
    "calculus": epigraph_calculus,
    "dual": epigraph_dual,
}


@dataclass(frozen=True, eq=False)
class EpigraphVertex:
    point: np.ndarray
    value: float


def epigraph_vertices(h: HRep, g: ConstrainedGame, player: int) -> list[EpigraphVertex]:
    """Vertices of an epigraph, each certified against an independent LP value."""
    v = polyhedra.h_to_v(h)
    dim = h.dim - 1
    if v.is_empty:
        raise ConsistencyError("epigraph is empty")
    vertical = np.zeros(dim + 1)
    vertical[-1] = 1.0
    if len(v.rays) != 1 or np.abs(v.rays[0] - vertical).max() > 1e-7:
        raise ConsistencyError(f"epigraph recession cone is not the vertical ray: {v.rays.tolist()}")
    fn = value_function(g, player)
    out = []
    for row in v.vertices:
        point, value = row[:dim], float(row[dim])
        certified = fn(g, point, tol=1e-7)
        if not certified.feasible or abs(certified.value - value) > VALUE_TOL * (1.0 + abs(value)):
            raise ConsistencyError(
                f"epigraph vertex value {value} disagrees with LP value {certified.value} at {point.tolist()}"
            )
        out.append(EpigraphVertex(point, value))
    return out


def compute_epigraph_vertices(g: ConstrainedGame, player: int, method: str = "direct") -> list[EpigraphVertex]:
    try:
        route = EPIGRAPH_ROUTES[method]
    except KeyError:
        raise ValueError(f"unknown epigraph method {method!r}; choose from {sorted(EPIGRAPH_ROUTES)}") from None
    return epigraph_vertices(route(g, player), g, player)


def vertex_array(verts: list[EpigraphVertex]) -> np.ndarray:
    """Rows ``(point, value)``."""
    if not verts:
        return np.zeros((0, 0))
    return np.array([np.append(v.point, v.value) for v in verts])
