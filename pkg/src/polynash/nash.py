"""Extremal Nash equilibria, maximal Nash faces and payoff regions.

Extremal equilibria are exactly the pairs ``(x_i, y_j)`` of epigraph vertices
``(x_i, alpha_i)`` of xi and ``(y_j, beta_j)`` of eta with

    x_i B y_j == alpha_i   and   x_i A y_j == beta_j.

These pairs form a bipartite compatibility graph. Maximal Nash faces are its
maximal bicliques, and each face projects to an axis-aligned payoff region.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from polynash import lp
from polynash.errors import ConsistencyError, GameError
from polynash.game import (
    ConstrainedGame,
    EpigraphVertex,
    compute_epigraph_vertices,
    eta,
    xi,
)
from polynash.linalg import norm_inf
from polynash.reps import FEAS_TOL, HRep

log = logging.getLogger(__name__)

EQ_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class ExtremalEquilibrium:
    x: np.ndarray
    y: np.ndarray
    alpha: float  # player 2 payoff, xi(x)
    beta: float  # player 1 payoff, eta(y)
    i: int = -1
    j: int = -1


@dataclass(frozen=True)
class MaxNashFace:
    i_set: tuple[int, ...]
    j_set: tuple[int, ...]


@dataclass(frozen=True)
class PayoffRegion:
    p1_range: tuple[float, float]
    p2_range: tuple[float, float]
    face: MaxNashFace

    @property
    def kind(self) -> str:
        flat = [hi - lo <= 1e-9 * max(1.0, abs(lo), abs(hi)) for lo, hi in (self.p1_range, self.p2_range)]
        return {2: "point", 1: "segment", 0: "rectangle"}[sum(flat)]


@dataclass
class NashResult:
    xi_verts: list[EpigraphVertex]
    eta_verts: list[EpigraphVertex]
    equilibria: list[ExtremalEquilibrium]
    faces: list[MaxNashFace]
    regions: list[PayoffRegion]
    compat: np.ndarray = field(repr=False)


def eq_tolerance(g: ConstrainedGame, tol_eq: float | None = None) -> float:
    """Absolute tolerance of the equality test: ``tol_eq * (1 + max(|A|_inf, |B|_inf))``."""
    return (EQ_TOL if tol_eq is None else tol_eq) * (1.0 + max(norm_inf(g.a), norm_inf(g.b)))


def compatibility(
    g: ConstrainedGame,
    xi_verts: list[EpigraphVertex],
    eta_verts: list[EpigraphVertex],
    tol: float,
    threads: int = 1,
) -> np.ndarray:
    """Boolean matrix ``C[i, j]``: does the vertex pair pass the equality test."""
    xs = np.array([v.point for v in xi_verts]).reshape(len(xi_verts), g.m)
    ys = np.array([v.point for v in eta_verts]).reshape(len(eta_verts), g.n)
    alpha = np.array([v.value for v in xi_verts])
    beta = np.array([v.value for v in eta_verts])

    def block(rows: slice) -> np.ndarray:
        p2 = xs[rows] @ g.b @ ys.T
        p1 = xs[rows] @ g.a @ ys.T
        return (np.abs(p2 - alpha[rows, None]) <= tol) & (np.abs(p1 - beta[None, :]) <= tol)

    if threads <= 1 or len(xs) < 2 * threads:
        return block(slice(None))
    bounds = np.linspace(0, len(xs), threads + 1).astype(int)
    with ThreadPoolExecutor(threads) as pool:
        parts = pool.map(block, [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])])
        return np.vstack(list(parts))


def _equilibria_from_compat(xi_verts, eta_verts, compat) -> list[ExtremalEquilibrium]:
    out = []
    seen: list[np.ndarray] = []
    for i, j in zip(*np.nonzero(compat)):
        x, y = xi_verts[i].point, eta_verts[j].point
        key = np.concatenate([x, y])
        if any(np.abs(key - s).max() <= 1e-7 for s in seen):
            continue
        seen.append(key)
        out.append(ExtremalEquilibrium(x, y, xi_verts[i].value, eta_verts[j].value, int(i), int(j)))
    return out


def extremal_nash(
    g: ConstrainedGame, method: str = "direct", tol_eq: float | None = None, threads: int = 1
) -> list[ExtremalEquilibrium]:
    return solve_game(g, method, tol_eq, threads, validate=False).equilibria


def maximal_bicliques(compat: np.ndarray) -> list[MaxNashFace]:
    """All maximal bicliques (both sides nonempty) of a bipartite adjacency matrix.

    The right-hand sides of maximal bicliques are exactly the nonempty sets
    obtained by intersecting left-vertex neighbourhoods, so those intersections
    are expanded to a fixpoint and each is closed back to its left side.
    """
    k = compat.shape[0]
    nbrs = [frozenset(np.nonzero(compat[i])[0].tolist()) for i in range(k)]
    generators = {s for s in nbrs if s}
    seen = set(generators)
    queue = sorted(generators, key=sorted)
    while queue:
        current = queue.pop()
        for s in generators:
            inter = current & s
            if inter and inter not in seen:
                seen.add(inter)
                queue.append(inter)
    faces = []
    for right in seen:
        left = tuple(i for i in range(k) if right <= nbrs[i])
        faces.append(MaxNashFace(left, tuple(sorted(right))))
    return sorted(faces, key=lambda f: (f.i_set, f.j_set))


def is_nash(g: ConstrainedGame, x, y, tol: float) -> bool:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ev, xv = eta(g, y, tol=1e-7), xi(g, x, tol=1e-7)
    if not (ev.feasible and xv.feasible):
        return False
    return abs(x @ g.a @ y - ev.value) <= tol and abs(x @ g.b @ y - xv.value) <= tol


def maximal_nash_faces(
    xi_verts: list[EpigraphVertex],
    eta_verts: list[EpigraphVertex],
    g: ConstrainedGame,
    tol_eq: float | None = None,
    compat: np.ndarray | None = None,
) -> list[MaxNashFace]:
    """Maximal Nash faces, each validated by testing its centroid pair."""
    tol = eq_tolerance(g, tol_eq)
    if compat is None:
        compat = compatibility(g, xi_verts, eta_verts, tol)
    faces = maximal_bicliques(compat)
    for f in faces:
        xc = np.mean([xi_verts[i].point for i in f.i_set], axis=0)
        yc = np.mean([eta_verts[j].point for j in f.j_set], axis=0)
        if not is_nash(g, xc, yc, 10 * tol):
            raise ConsistencyError(f"centroid of face {f} is not a Nash equilibrium")
    return faces


def payoff_regions(
    faces: list[MaxNashFace], xi_verts: list[EpigraphVertex], eta_verts: list[EpigraphVertex]
) -> list[PayoffRegion]:
    """Per face: [min, max] of eta over its y-vertices times [min, max] of xi over its x-vertices."""
    out = []
    for f in faces:
        betas = [eta_verts[j].value for j in f.j_set]
        alphas = [xi_verts[i].value for i in f.i_set]
        out.append(PayoffRegion((min(betas), max(betas)), (min(alphas), max(alphas)), f))
    return out


def solve_game(
    g: ConstrainedGame,
    method: str = "direct",
    tol_eq: float | None = None,
    threads: int = 1,
    validate: bool = True,
) -> NashResult:
    """Epigraph vertices, extremal equilibria, maximal faces and payoff regions."""
    xi_verts = compute_epigraph_vertices(g, 2, method)
    eta_verts = compute_epigraph_vertices(g, 1, method)
    tol = eq_tolerance(g, tol_eq)
    compat = compatibility(g, xi_verts, eta_verts, tol, threads)
    equilibria = _equilibria_from_compat(xi_verts, eta_verts, compat)
    if validate:
        faces = maximal_nash_faces(xi_verts, eta_verts, g, tol_eq, compat)
    else:
        faces = maximal_bicliques(compat)
    regions = payoff_regions(faces, xi_verts, eta_verts)
    return NashResult(xi_verts, eta_verts, equilibria, faces, regions, compat)


def brute_force_oracle(g: ConstrainedGame, tol: float = 1e-9) -> list[ExtremalEquilibrium]:
    """Support enumeration over equal-size support pairs (simplex strategy sets only).

    For nondegenerate games this lists every equilibrium, all of which are
    extremal. Singular indifference systems are skipped and counted.
    """
    if not g.is_unconstrained:
        raise GameError("support enumeration needs probability-simplex strategy sets")
    a, b = g.a, g.b
    m, n = a.shape
    found: list[ExtremalEquilibrium] = []
    skipped = 0
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                y_sol = _indifference(a[np.ix_(rows, cols)])
                x_sol = _indifference(b[np.ix_(rows, cols)].T)
                if y_sol is None or x_sol is None:
                    skipped += 1
                    continue
                y = np.zeros(n)
                y[list(cols)] = y_sol[:k]
                x = np.zeros(m)
                x[list(rows)] = x_sol[:k]
                v, u = y_sol[k], x_sol[k]
                if y.min() < -tol or x.min() < -tol:
                    continue
                if np.any(a @ y > v + tol) or np.any(b.T @ x > u + tol):
                    continue
                key = np.concatenate([x, y])
                if any(np.abs(key - np.concatenate([e.x, e.y])).max() <= 1e-7 for e in found):
                    continue
                found.append(ExtremalEquilibrium(x, y, float(u), float(v)))
    if skipped:
        log.info("support enumeration skipped %d singular support pairs", skipped)
    return found


def _indifference(block: np.ndarray):
    """Solve ``block z = v 1, sum z = 1`` for ``(z, v)``; None if singular."""
    k = block.shape[0]
    mat = np.zeros((k + 1, k + 1))
    mat[:k, :k] = block
    mat[:k, k] = -1.0
    mat[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    if np.linalg.cond(mat) > 1e10:
        return None
    return np.linalg.solve(mat, rhs)


def minimax_value(a: np.ndarray) -> float:
    """Value of the zero-sum game where player 1 (rows) maximizes ``x A y``."""
    m, n = a.shape
    # variables (x, v): maximize v  s.t.  v - (A^T x)_j <= 0, x in simplex
    rows = np.vstack([np.hstack([-a.T, np.ones((n, 1))]), np.hstack([HRep.simplex(m).a, np.zeros((m + 2, 1))])])
    rhs = np.concatenate([np.zeros(n), HRep.simplex(m).b])
    c = np.zeros(m + 1)
    c[-1] = 1.0
    res = lp.maximize(c, rows, rhs, FEAS_TOL)
    if not res.optimal:
        raise ConsistencyError("minimax LP failed")
    return res.value
