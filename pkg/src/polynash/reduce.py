"""Low-rank reduction of games.

With ``A + tB = U diag(sigma) V^T`` (rank k), the reduced game is
``(U^T A V, U^T B V; U^T[S], V^T[T])``. The original payoffs are recovered as
``U Abar V^T`` and ``U Bbar V^T`` exactly when

    rank [A | B] == rank(A + tB) == rank [A ; B].

Under that condition maximal Nash faces of the two games correspond one to
one; :func:`lift_faces` maps reduced faces back to the original game.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polynash import lp, polyhedra
from polynash.errors import DegenerateParameterError, GameError, NotReducibleError
from polynash.game import ConstrainedGame, EpigraphVertex, Polytope, make_game
from polynash.linalg import DEFAULT_RANK_TOL, hconcat, rank, svd_truncated, vconcat
from polynash.nash import MaxNashFace, PayoffRegion
from polynash.reps import FEAS_TOL, HRep, VRep

DEFAULT_T_CANDIDATES = (1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 5.0, -5.0)


@dataclass(frozen=True, eq=False)
class ReducedGame:
    t: float
    u: np.ndarray
    v: np.ndarray
    sigma: np.ndarray
    abar: np.ndarray
    bbar: np.ndarray
    sbar: Polytope
    tbar: Polytope
    restorable: bool

    @property
    def k(self) -> int:
        return self.u.shape[1]

    @property
    def game(self) -> ConstrainedGame:
        return ConstrainedGame(self.abar, self.bbar, self.sbar, self.tbar)


@dataclass(frozen=True, eq=False)
class LiftedFace:
    f_h: HRep  # face of epi xi in R^{m+1}
    g_h: HRep  # face of epi eta in R^{n+1}


def check_restorable(a, b, t: float, tol: float = DEFAULT_RANK_TOL) -> bool:
    if t == 0:
        raise ValueError("t must be nonzero")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    k = rank(a + t * b, tol)
    return rank(hconcat(a, b), tol) == k == rank(vconcat(a, b), tol)


def reduce_game(g: ConstrainedGame, t: float = 1.0, tol: float = DEFAULT_RANK_TOL) -> ReducedGame:
    if t == 0:
        raise ValueError("t must be nonzero")
    svd = svd_truncated(g.a + t * g.b, tol)
    if svd.k == 0:
        raise DegenerateParameterError(f"A + tB vanishes for t={t:g}; try another t")
    u, v = svd.u, svd.v
    abar = u.T @ g.a @ v
    bbar = u.T @ g.b @ v
    sbar = _image_polytope(u.T, g.s)
    tbar = _image_polytope(v.T, g.t)
    return ReducedGame(
        t=float(t),
        u=u,
        v=v,
        sigma=svd.sigma,
        abar=abar,
        bbar=bbar,
        sbar=sbar,
        tbar=tbar,
        restorable=check_restorable(g.a, g.b, t, tol),
    )


def _image_polytope(mat: np.ndarray, p: Polytope) -> Polytope:
    vrep = polyhedra.image(polyhedra.LinearMap(mat), p.vrep)
    return Polytope(vrep, polyhedra.v_to_h(vrep))


def restore(r: ReducedGame) -> tuple[np.ndarray, np.ndarray]:
    return r.u @ r.abar @ r.v.T, r.u @ r.bbar @ r.v.T


def choose_t(a, b, candidates=DEFAULT_T_CANDIDATES, tol: float = DEFAULT_RANK_TOL) -> float:
    """First candidate reaching the maximal rank of A + tB that is also restorable."""
    candidates = [float(c) for c in candidates]
    if not candidates or any(c == 0 for c in candidates):
        raise ValueError("candidates must be a nonempty list of nonzero reals")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ranks = [rank(a + c * b, tol) for c in candidates]
    best = max(ranks)
    if best == 0:
        raise NotReducibleError("A + tB vanishes for every candidate t")
    for c, k in zip(candidates, ranks):
        if k == best and check_restorable(a, b, c, tol):
            return c
    raise NotReducibleError(f"no candidate t in {candidates} satisfies the restorability condition")


def map_equilibrium(r: ReducedGame, g: ConstrainedGame, x, y, tol: float = FEAS_TOL):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not g.s.contains(x, tol) or not g.t.contains(y, tol):
        raise GameError("strategy outside its feasible set")
    return r.u.T @ x, r.v.T @ y


def _face_hrep(verts: list[EpigraphVertex], idx) -> HRep:
    pts = np.array([np.append(verts[i].point, verts[i].value) for i in idx])
    return polyhedra.v_to_h(VRep.from_points(pts))


def lift_faces(
    r: ReducedGame,
    faces: list[MaxNashFace],
    xi_verts: list[EpigraphVertex],
    eta_verts: list[EpigraphVertex],
    g: ConstrainedGame,
) -> list[LiftedFace]:
    """Map reduced faces back: ``F = Umap^{-1}[Fbar] cap (S x R)``, ``G = Vmap^{-1}[Gbar] cap (T x R)``.

    ``xi_verts``/``eta_verts`` are the reduced game's epigraph vertices that the
    faces index into.
    """
    if not r.restorable:
        raise NotReducibleError("faces can only be lifted through a restorable reduction")
    umap = polyhedra.block_map(r.u.T, [[1.0]])
    vmap = polyhedra.block_map(r.v.T, [[1.0]])
    s_strip = polyhedra.product(g.s.hrep, HRep.universe(1))
    t_strip = polyhedra.product(g.t.hrep, HRep.universe(1))
    out = []
    for f in faces:
        fbar = _face_hrep(xi_verts, f.i_set)
        gbar = _face_hrep(eta_verts, f.j_set)
        out.append(
            LiftedFace(
                f_h=polyhedra.intersect(polyhedra.inverse_image(umap, fbar), s_strip),
                g_h=polyhedra.intersect(polyhedra.inverse_image(vmap, gbar), t_strip),
            )
        )
    return out


def _last_coordinate_range(h: HRep) -> tuple[float, float]:
    c = np.zeros(h.dim)
    c[-1] = 1.0
    hi, lo = lp.solve_many([c, -c], h)
    if not (hi.optimal and lo.optimal):
        raise GameError("lifted face is empty or unbounded")
    return -lo.value, hi.value


def lifted_region(face: LiftedFace, reduced_face: MaxNashFace) -> PayoffRegion:
    """Payoff region of a lifted face, from LPs over its H-representation in the original space."""
    return PayoffRegion(_last_coordinate_range(face.g_h), _last_coordinate_range(face.f_h), reduced_face)


def region_discrepancy(first: list[PayoffRegion], second: list[PayoffRegion]) -> float:
    """Largest coordinate gap between two region lists matched after sorting; inf on count mismatch."""
    if len(first) != len(second):
        return float("inf")

    def key(reg: PayoffRegion):
        return (*np.round(reg.p1_range, 6), *np.round(reg.p2_range, 6))

    gap = 0.0
    for p, q in zip(sorted(first, key=key), sorted(second, key=key)):
        gap = max(gap, float(np.abs(np.array([*p.p1_range, *p.p2_range]) - [*q.p1_range, *q.p2_range]).max()))
    return gap


def reduced_game_from_matrices(a, b, s=None, t_set=None, t: float | None = None) -> tuple[ConstrainedGame, ReducedGame]:
    g = make_game(a, b, s, t_set)
    if t is None:
        t = choose_t(g.a, g.b)
    return g, reduce_game(g, t)
