"""Small dense linear programs ``max c x  s.t.  a x <= b`` with free ``x``.

The free variables are eliminated up front: a well-conditioned set of ``r``
independent rows ``I`` (pivoted Gram-Schmidt) defines the slack coordinates
``s = b_I - a_I x >= 0``, and the remaining rows become a standard-form problem
in ``s``. Basic feasible solutions of that problem are exactly the vertices of
the original polyhedron, so the returned point is always a vertex when the
feasible set is pointed. The standard-form problem is solved by a dense tableau
primal simplex (single-artificial phase one) under Bland's rule.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from polynash.errors import GameError
from polynash.linalg import orthogonal_complement, row_basis
from polynash.reps import FEAS_TOL, HRep, PRep

PIVOT_TOL = 1e-9
RHS_SNAP = 1e-12


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Maximize ``objective @ x`` over ``constraints``."""

    objective: np.ndarray
    constraints: HRep

    def __post_init__(self):
        c = np.array(self.objective, dtype=float).reshape(-1)
        if len(c) != self.constraints.dim:
            raise ValueError(f"objective has length {len(c)}, constraints live in R^{self.constraints.dim}")
        if not np.all(np.isfinite(c)):
            raise ValueError("objective has non-finite entries")
        object.__setattr__(self, "objective", c)


@dataclass(frozen=True, eq=False)
class LpResult:
    status: Status
    value: float | None = None
    point: np.ndarray | None = None
    tight_rows: tuple[int, ...] = field(default_factory=tuple)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _pivot(tab: np.ndarray, cost: np.ndarray, basis: list[int], row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    column = tab[:, col].copy()
    column[row] = 0.0
    tab -= np.outer(column, tab[row])
    cost -= cost[col] * tab[row]
    basis[row] = col
    # rounding drift in a degenerate basis would otherwise feed negative ratios into Bland's rule
    rhs = tab[:, -1]
    rhs[np.abs(rhs) < RHS_SNAP] = 0.0


def _run_simplex(tab, cost, basis, allowed: int, tol: float, max_iter: int) -> bool:
    """Bland's-rule iterations on ``tab``; returns False when the objective is unbounded.

    ``cost`` holds reduced profits (enter while positive) and ``allowed`` limits
    the entering columns to ``range(allowed)``.
    """
    for _ in range(max_iter):
        candidates = np.nonzero(cost[:allowed] > tol)[0]
        if len(candidates) == 0:
            return True
        col = int(candidates[0])
        column = tab[:, col]
        positive = np.nonzero(column > PIVOT_TOL)[0]
        if len(positive) == 0:
            return False
        ratios = np.maximum(tab[positive, -1], 0.0) / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(tab, cost, basis, row, col)
    raise RuntimeError("simplex iteration limit reached")


def _standard_form(g: np.ndarray, h: np.ndarray, d: np.ndarray, tol: float):
    """Solve ``max d s  s.t.  g s <= h, s >= 0``. Returns ``(status, s)``."""
    rows, n = g.shape
    if rows == 0:
        if np.any(d > tol):
            return Status.UNBOUNDED, None
        return Status.OPTIMAL, np.zeros(n)
    max_iter = 50 * (rows + n) + 100
    # columns: s (n) | slacks (rows) | artificial (1) | rhs
    tab = np.zeros((rows, n + rows + 2))
    tab[:, :n] = g
    tab[:, n : n + rows] = np.eye(rows)
    tab[:, -1] = h
    basis = list(range(n, n + rows))
    art = n + rows
    if h.min() < -tol:
        tab[:, art] = -1.0
        cost = np.zeros(n + rows + 2)
        cost[art] = -1.0
        _pivot(tab, cost, basis, int(np.argmin(h)), art)
        _run_simplex(tab, cost, basis, art + 1, tol, max_iter)
        art_value = tab[basis.index(art), -1] if art in basis else 0.0
        if art_value > tol:
            return Status.INFEASIBLE, None
        if art in basis:
            row = basis.index(art)
            nz = np.nonzero(np.abs(tab[row, :art]) > PIVOT_TOL)[0]
            if len(nz):
                _pivot(tab, cost, basis, row, int(nz[0]))
            else:
                tab = np.delete(tab, row, axis=0)
                del basis[row]
        tab[:, art] = 0.0
    cost = np.zeros(tab.shape[1])
    cost[:n] = d
    for i, j in enumerate(basis):
        if cost[j] != 0.0:
            cost -= cost[j] * tab[i]
    if not _run_simplex(tab, cost, basis, art, tol, max_iter):
        return Status.UNBOUNDED, None
    s = np.zeros(n + rows + 1)
    for i, j in enumerate(basis):
        s[j] = tab[i, -1]
    return Status.OPTIMAL, np.maximum(s[:n], 0.0)


@dataclass(frozen=True, eq=False)
class _Prepared:
    """Objective-independent part of :func:`solve`: the free-variable elimination."""

    dim: int
    infeasible: bool
    a: np.ndarray
    b: np.ndarray
    rows: np.ndarray
    pivots: list
    q: np.ndarray
    g: np.ndarray | None = None
    h: np.ndarray | None = None
    a_i_inv: np.ndarray | None = None  # inverse of the pivot block in q coordinates


def _prepare(constraints: HRep, tol: float) -> _Prepared:
    h = constraints.normalized()
    n = h.dim
    nonzero = np.abs(h.a).max(axis=1) > 0 if h.rows else np.zeros(0, dtype=bool)
    infeasible = bool(np.any(h.b[~nonzero] < -tol))
    a, b = h.a[nonzero], h.b[nonzero]
    rows = np.nonzero(nonzero)[0]
    pivots, q = row_basis(a) if len(a) else ([], np.zeros((n, 0)))
    if infeasible or not pivots:
        return _Prepared(n, infeasible, a, b, rows, pivots, q)
    a_red = a @ q
    a_i_inv = np.linalg.inv(a_red[pivots])
    a_j = a_red[np.setdiff1d(np.arange(len(a)), pivots)]
    g = -a_j @ a_i_inv
    hh = b[np.setdiff1d(np.arange(len(a)), pivots)] + g @ b[pivots]
    return _Prepared(n, infeasible, a, b, rows, pivots, q, g, hh, a_i_inv)


def _solve_prepared(prep: _Prepared, c: np.ndarray, tol: float) -> LpResult:
    if prep.infeasible:
        return LpResult(Status.INFEASIBLE)
    q, pivots = prep.q, prep.pivots
    c_perp = c - q @ (q.T @ c)
    lineal_gain = np.abs(c_perp).max() > tol * max(1.0, np.abs(c).max()) if prep.dim else False
    if not pivots:
        if lineal_gain:
            return LpResult(Status.UNBOUNDED)
        return LpResult(Status.OPTIMAL, 0.0, np.zeros(prep.dim), tuple(int(i) for i in prep.rows))
    d = -(prep.a_i_inv.T @ (np.zeros(len(pivots)) if lineal_gain else q.T @ c))
    status, s = _standard_form(prep.g, prep.h, d, tol)
    if status is Status.INFEASIBLE:
        return LpResult(status)
    if lineal_gain or status is Status.UNBOUNDED:
        return LpResult(Status.UNBOUNDED)
    x = q @ (prep.a_i_inv @ (prep.b[pivots] - s))
    slack = prep.b - prep.a @ x
    tight = tuple(int(i) for i in prep.rows[slack <= 1e3 * tol])
    return LpResult(Status.OPTIMAL, float(c @ x), x, tight)


def solve(problem: LpProblem, tol: float = FEAS_TOL) -> LpResult:
    """Maximize a linear objective over an H-polyhedron."""
    return _solve_prepared(_prepare(problem.constraints, tol), problem.objective, tol)


def solve_many(objectives, constraints: HRep, tol: float = FEAS_TOL) -> list[LpResult]:
    """Maximize several objectives over one polyhedron, sharing the elimination step."""
    prep = _prepare(constraints, tol)
    out = []
    for c in objectives:
        c = LpProblem(c, constraints).objective
        out.append(_solve_prepared(prep, c, tol))
    return out


def maximize(c, a, b, tol: float = FEAS_TOL) -> LpResult:
    return solve(LpProblem(np.asarray(c, dtype=float), HRep(a, b)), tol)


def is_feasible(h: HRep, tol: float = FEAS_TOL) -> bool:
    return solve(LpProblem(np.zeros(h.dim), h), tol).status is not Status.INFEASIBLE


def is_bounded(h: HRep) -> bool:
    """True iff the recession cone ``{x | a x <= 0}`` is ``{0}``."""
    cone = HRep(h.a, np.zeros(h.rows))
    for i in range(h.dim):
        for sign in (1.0, -1.0):
            c = np.zeros(h.dim)
            c[i] = sign
            res = solve(LpProblem(c, cone))
            if res.status is Status.UNBOUNDED or (res.optimal and res.value > FEAS_TOL):
                return False
    return True


def lineality(h: HRep) -> np.ndarray:
    """Orthonormal basis of the lineality space ``{x | a x = 0}``."""
    _, q = row_basis(h.normalized().a) if h.rows else ([], np.zeros((h.dim, 0)))
    return orthogonal_complement(q)


def dual_epi_prep(s_h: HRep, a) -> PRep:
    """P-representation of the epigraph of ``y -> max{(a y) x | x in S}``.

    Variables are ``(y, r)`` with auxiliary multipliers ``u >= 0`` on the rows of
    ``s_h``: ``s_h.a.T u = a y`` and ``r >= s_h.b u``.
    """
    a = np.asarray(a, dtype=float)
    sbar, sb = s_h.a, s_h.b
    k, m = sbar.shape
    if a.shape[0] != m:
        raise ValueError(f"payoff matrix has {a.shape[0]} rows, strategy set lives in R^{m}")
    if not is_bounded(s_h):
        raise GameError("strategy set is unbounded")
    n = a.shape[1]
    zm = np.zeros((m, 1))
    x_part = np.vstack(
        [
            np.hstack([-a, zm]),
            np.hstack([a, zm]),
            np.zeros((k, n + 1)),
            np.hstack([np.zeros((1, n)), [[-1.0]]]),
        ]
    )
    u_part = np.vstack([sbar.T, -sbar.T, -np.eye(k), sb[None, :]])
    return PRep(x_part, u_part, np.zeros(2 * m + k + 1))
