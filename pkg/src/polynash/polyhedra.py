"""Polyhedral calculus: conversions between H-, V- and P-representations,
polar cones, images and inverse images, intersections and products.

Vertex and facet enumeration share one double description routine for
polyhedral cones ``{z | H z <= 0}``. Rows are inserted in index order; two rays
are combined only if they are adjacent, decided combinatorially from the sets
of rows they make tight.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from polynash import lp
from polynash.errors import DegenerateInputError
from polynash.linalg import orthogonal_complement, row_basis
from polynash.reps import FEAS_TOL, HRep, LinearMap, PRep, VRep, sort_rows, unique_rows

ZERO_TOL = 1e-9
CHUNK = 4096
SNAP_TOL = 1e-12


def _normalize_rows(m: np.ndarray) -> np.ndarray:
    norms = np.abs(m).max(axis=1) if len(m) else np.zeros(0)
    return m / np.where(norms > 0, norms, 1.0)[:, None]


def _adjacent_pairs(z: np.ndarray, pos: np.ndarray, neg: np.ndarray, need: int):
    """Pairs (p, n) whose common tight set is contained in no third ray's tight set."""
    zi = z.astype(np.int32)
    common_count = zi[pos] @ zi[neg].T
    pi, ni = np.nonzero(common_count >= need)
    if len(pi) == 0:
        return []
    p_idx, n_idx = pos[pi], neg[ni]
    out = []
    for start in range(0, len(p_idx), CHUNK):
        pp, nn = p_idx[start : start + CHUNK], n_idx[start : start + CHUNK]
        commons = z[pp] & z[nn]
        sizes = commons.sum(axis=1)
        containing = (zi @ commons.T.astype(np.int32)) == sizes[None, :]
        ok = containing.sum(axis=0) == 2
        out.extend(zip(pp[ok].tolist(), nn[ok].tolist()))
    return out


def cone_generators(h: np.ndarray, tol: float = ZERO_TOL):
    """Extreme rays and a lineality basis of ``{z | h z <= 0}``.

    Returns ``(rays, lines)`` as row arrays, rays normalized to unit 2-norm.
    """
    h = np.asarray(h, dtype=float)
    dim = h.shape[1]
    if len(h):
        h = h[np.abs(h).max(axis=1) > 0]
    h = _normalize_rows(h)
    if len(h) == 0:
        return np.zeros((0, dim)), np.eye(dim)
    pivots, q = row_basis(h)
    lines = orthogonal_complement(q).T
    r = len(pivots)
    hr = h @ q
    m = len(hr)

    rays = -np.linalg.inv(hr[pivots]).T
    rays /= np.linalg.norm(rays, axis=1)[:, None]
    tight = np.zeros((r, m), dtype=bool)
    for k, row in enumerate(pivots):
        tight[:, row] = True
        tight[k, row] = False
    done = set(pivots)
    for i in range(m):
        if i in done:
            continue
        done.add(i)
        vals = rays @ hr[i]
        pos = np.nonzero(vals > tol)[0]
        neg = np.nonzero(vals < -tol)[0]
        zero = np.abs(vals) <= tol
        if len(pos) == 0:
            tight[:, i] = zero
            continue
        new_rays, new_tight = [], []
        for p, n in _adjacent_pairs(tight, pos, neg, r - 2):
            ray = vals[p] * rays[n] - vals[n] * rays[p]
            ray /= np.linalg.norm(ray)
            t = tight[p] & tight[n]
            t[i] = True
            new_rays.append(ray)
            new_tight.append(t)
        keep = ~(vals > tol)
        tight[:, i] = zero
        rays = rays[keep]
        tight = tight[keep]
        if new_rays:
            rays = np.vstack([rays, new_rays])
            tight = np.vstack([tight, new_tight])
    full = rays @ q.T if len(rays) else np.zeros((0, dim))
    if len(full):
        full /= np.linalg.norm(full, axis=1)[:, None]
    return full, lines


def h_to_v(h: HRep) -> VRep:
    """All vertices and extreme rays of ``{x | a x <= b}``.

    Lines are returned as pairs of opposite rays. An empty polyhedron yields a
    VRep with no vertices.
    """
    n = h.dim
    hn = h.normalized()
    homog = np.vstack([np.hstack([hn.a, -hn.b[:, None]]), np.eye(1, n + 1, n) * -1.0])
    rays, lines = cone_generators(homog)
    lam = rays[:, n]
    is_vertex = lam > ZERO_TOL
    verts = rays[is_vertex, :n] / lam[is_vertex, None]
    if len(verts) == 0:
        return VRep(np.zeros((0, n)), np.zeros((0, n)))
    dirs = [rays[~is_vertex, :n]]
    if len(lines):
        dirs += [lines[:, :n], -lines[:, :n]]
    dirs = np.vstack(dirs)
    dirs = dirs[np.abs(dirs).max(axis=1) > ZERO_TOL] if len(dirs) else dirs
    dirs = _normalize_rows(dirs)
    verts = sort_rows(unique_rows(verts))
    dirs = sort_rows(unique_rows(dirs))
    _check_vertices(hn, verts, n - len(lines))
    return VRep(verts, dirs)


def _check_vertices(hn: HRep, verts: np.ndarray, need: int, tol: float = 1e-7) -> None:
    scale = np.maximum(1.0, np.abs(verts).max(axis=1))
    slack = hn.b[None, :] - verts @ hn.a.T
    if np.any(slack < -tol * scale[:, None]):
        raise DegenerateInputError("vertex enumeration produced an infeasible point; system too degenerate")
    for v, s, sc in zip(verts, slack, scale):
        rows = hn.a[s <= tol * sc]
        if len(rows) < need or len(row_basis(rows, 1e-8)[0]) < need:
            raise DegenerateInputError("vertex enumeration produced a point that is not a vertex")


def v_to_h(v: VRep) -> HRep:
    """Irredundant H-representation of ``conv(vertices) + cone(rays)``.

    Lower-dimensional sets get their affine hull as equality pairs.
    """
    if v.is_empty:
        raise ValueError("cannot describe the empty set from a V-representation")
    n = v.dim
    cone = np.vstack(
        [
            np.hstack([v.vertices, -np.ones((len(v.vertices), 1))]),
            np.hstack([v.rays, np.zeros((len(v.rays), 1))]),
        ]
    )
    rays, lines = cone_generators(cone)
    rows = []
    for ray in rays:
        if np.abs(ray[:n]).max() > ZERO_TOL:
            rows.append(ray)
    for line in lines:
        if np.abs(line[:n]).max() > ZERO_TOL:
            rows.extend([line, -line])
    if not rows:
        return HRep.universe(n)
    rows = _normalize_rows(np.array(rows))
    rows = unique_rows(rows, 1e-9)
    return HRep(rows[:, :n], rows[:, n])


def polar_cone(v: VRep) -> HRep:
    """``{z | g z <= 0 for every vertex and ray g}``."""
    if v.is_empty:
        raise ValueError("polar cone of an empty V-representation")
    gens = np.vstack([v.vertices, v.rays])
    return HRep(gens, np.zeros(len(gens)))


def inverse_image(mapping: LinearMap, h: HRep) -> HRep:
    """``{x | M x in P}`` for ``P = {y | a y <= b}``."""
    if mapping.target_dim != h.dim:
        raise ValueError(f"map targets R^{mapping.target_dim}, polyhedron lives in R^{h.dim}")
    return HRep(h.a @ mapping.m, h.b)


def image(mapping: LinearMap, v: VRep, tol: float = 1e-9) -> VRep:
    """``{M x | x in P}``, with non-extremal generators pruned."""
    if mapping.source_dim != v.dim:
        raise ValueError(f"map acts on R^{mapping.source_dim}, polyhedron lives in R^{v.dim}")
    verts = v.vertices @ mapping.m.T
    rays = v.rays @ mapping.m.T
    if len(rays):
        rays = rays[np.abs(rays).max(axis=1) > ZERO_TOL]
    return prune(VRep(verts, _normalize_rows(rays) if len(rays) else rays), tol)


def _separation(target, others, rays, with_offset: bool):
    """Optimum of ``max a.target - beta`` over ``a.others <= beta, a.rays <= 0, |a| <= 1``.

    Returns ``(value, a)``; the value is positive iff ``target`` lies outside the
    hull (cone) of the others.
    """
    k = len(target)
    n_var = k + 1 if with_offset else k
    others = np.asarray(others, dtype=float).reshape(-1, k)
    rays = np.asarray(rays, dtype=float).reshape(-1, k)
    blocks = []
    if len(others):
        blocks.append(np.hstack([others, -np.ones((len(others), 1))]) if with_offset else others)
    if len(rays):
        blocks.append(np.hstack([rays, np.zeros((len(rays), 1))]) if with_offset else rays)
    box = np.hstack([np.eye(k), np.zeros((k, n_var - k))])
    rows = np.vstack(blocks + [box, -box])
    rhs = np.concatenate([np.zeros(len(rows) - 2 * k), np.ones(2 * k)])
    c = np.append(target, -1.0) if with_offset else np.asarray(target, dtype=float)
    res = lp.maximize(c, rows, rhs)
    if res.status is lp.Status.UNBOUNDED:
        return np.inf, None
    return res.value, res.point[:k]


def _separation_value(target, others, rays, with_offset: bool) -> float:
    return _separation(target, others, rays, with_offset)[0]


def _lex_max(points: np.ndarray, idx: np.ndarray) -> int:
    order = np.lexsort(points[idx].T[::-1])
    return int(idx[order[-1]])


def _extreme_points(verts: np.ndarray, tol: float) -> list[int]:
    """Indices of the extreme points of a finite point set (no rays).

    Each point is tested against the hull of the vertices confirmed so far; when
    it is separated, the lexicographic maximizer of the separating direction over
    all points is a new vertex. LPs therefore only see the small confirmed set.
    """
    k = verts.shape[1]
    confirmed: list[int] = []
    for d in np.vstack([np.eye(k), -np.eye(k)]):
        scores = verts @ d
        i = _lex_max(verts, np.nonzero(scores >= scores.max() - tol)[0])
        if i not in confirmed:
            confirmed.append(i)
    for j in range(len(verts)):
        while j not in confirmed:
            value, a = _separation(verts[j], verts[confirmed], [], True)
            if value <= tol:
                break
            scores = verts @ a
            confirmed.append(_lex_max(verts, np.nonzero(scores >= scores.max() - tol)[0]))
    # near-ties can admit a point lying within tol of the hull; re-check the small set
    return [
        c for c in confirmed if _separation_value(verts[c], verts[[i for i in confirmed if i != c]], [], True) > tol
    ]


def prune(v: VRep, tol: float = 1e-9) -> VRep:
    """Remove duplicate and non-extremal vertices and rays."""
    verts = unique_rows(v.vertices)
    rays = unique_rows(v.rays) if len(v.rays) else v.rays
    scale = max(1.0, float(np.abs(verts).max())) if len(verts) else 1.0
    if len(rays) == 0 and len(verts) > 2:
        keep = sorted(_extreme_points(verts, tol * scale))
    else:
        keep = [
            j
            for j in range(len(verts))
            if len(verts) == 1 or _separation_value(verts[j], np.delete(verts, j, axis=0), rays, True) > tol * scale
        ]
    keep_r = []
    for j in range(len(rays)):
        others = np.delete(rays, j, axis=0)
        if _separation_value(rays[j], others, [], False) > tol:
            keep_r.append(j)
    return VRep(sort_rows(verts[keep]), sort_rows(rays[keep_r]))


def intersect(h1: HRep, h2: HRep) -> HRep:
    if h1.dim != h2.dim:
        raise ValueError(f"cannot intersect R^{h1.dim} with R^{h2.dim}")
    return HRep(np.vstack([h1.a, h2.a]), np.concatenate([h1.b, h2.b]))


def product(h1: HRep, h2: HRep) -> HRep:
    """Cartesian product ``P1 x P2`` as a block-diagonal system."""
    a = np.zeros((h1.rows + h2.rows, h1.dim + h2.dim))
    a[: h1.rows, : h1.dim] = h1.a
    a[h1.rows :, h1.dim :] = h2.a
    return HRep(a, np.concatenate([h1.b, h2.b]))


def block_map(*blocks) -> LinearMap:
    return LinearMap(block_diag(*[np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]))


def is_bounded(h: HRep) -> bool:
    return lp.is_bounded(h)


def remove_redundant(h: HRep, tol: float = FEAS_TOL) -> HRep:
    """Drop duplicate rows and rows implied by the others (one LP per row).

    An infeasible system collapses to the single row ``0 <= -1``.
    """
    hn = h.normalized()
    a, b = hn.a, hn.b
    zero = np.abs(a).max(axis=1) <= 0 if len(a) else np.zeros(0, dtype=bool)
    if np.any(b[zero] < -tol):
        return _empty(h.dim)
    a, b = a[~zero], b[~zero]
    if len(a) == 0:
        return HRep.universe(h.dim)
    ab = unique_rows(np.hstack([a, b[:, None]]), 1e-12)
    a, b = ab[:, :-1], ab[:, -1]
    if not lp.is_feasible(HRep(a, b)):
        return _empty(h.dim)
    keep = np.ones(len(a), dtype=bool)
    for i in range(len(a)):
        keep[i] = False
        res = lp.maximize(a[i], a[keep], b[keep])
        if res.status is lp.Status.UNBOUNDED or (res.optimal and res.value > b[i] + tol):
            keep[i] = True
    return HRep(a[keep], b[keep])


def _empty(dim: int) -> HRep:
    return HRep(np.zeros((1, dim)), [-1.0])


def _equality_pairs(m: np.ndarray, rhs: np.ndarray, tol: float = 1e-12):
    rows = np.hstack([m, rhs[:, None]])
    pairs = []
    used = set()
    for i in range(len(rows)):
        if i in used:
            continue
        match = np.nonzero(np.abs(rows + rows[i]).max(axis=1) <= tol)[0]
        match = [j for j in match if j != i and j not in used]
        if match:
            pairs.append((i, match[0]))
            used.update((i, match[0]))
    return pairs


def p_to_h(p: PRep) -> HRep:
    """Project out the auxiliary variables of a P-representation.

    Equality pairs that involve an auxiliary variable are used to substitute it
    away; otherwise Fourier-Motzkin elimination is applied to the variable with
    the fewest generated rows. Redundant rows are removed after every step.
    """
    n = p.dim
    m = np.hstack([p.a, p.bmat])
    rhs = p.b.copy()
    h = remove_redundant(HRep(m, rhs))
    m, rhs = h.a, h.b
    while m.shape[1] > n:
        # cancellation noise would otherwise count as a sign in the elimination
        scale = np.abs(m).max(axis=1, keepdims=True)
        m = np.where(np.abs(m) <= SNAP_TOL * scale, 0.0, m)
        if np.all(np.abs(m[:, n:]) <= 0):
            m = m[:, :n]
            break
        substituted = False
        for i, j in _equality_pairs(m, rhs):
            aux = np.abs(m[i, n:])
            if aux.max() > 1e-9:
                col = n + int(np.argmax(aux))
                row, b_row = m[i].copy(), rhs[i]
                factors = m[:, col] / row[col]
                m = m - np.outer(factors, row)
                rhs = rhs - factors * b_row
                m = np.delete(np.delete(m, [i, j], axis=0), col, axis=1)
                rhs = np.delete(rhs, [i, j])
                substituted = True
                break
        if not substituted:
            costs = []
            for col in range(n, m.shape[1]):
                npos = int(np.sum(m[:, col] > 0))
                nneg = int(np.sum(m[:, col] < 0))
                costs.append(npos * nneg - npos - nneg)
            col = n + int(np.argmin(costs))
            c = m[:, col]
            pos, neg, zer = np.nonzero(c > 0)[0], np.nonzero(c < 0)[0], np.nonzero(c == 0)[0]
            new_m = [m[zer]]
            new_b = [rhs[zer]]
            if len(pos) and len(neg):
                mp = m[pos] / c[pos, None]
                mn = m[neg] / -c[neg, None]
                new_m.append((mp[:, None, :] + mn[None, :, :]).reshape(-1, m.shape[1]))
                new_b.append(((rhs[pos] / c[pos])[:, None] + (rhs[neg] / -c[neg])[None, :]).reshape(-1))
            m = np.delete(np.vstack(new_m), col, axis=1)
            rhs = np.concatenate(new_b)
        h = remove_redundant(HRep(m, rhs))
        m, rhs = h.a, h.b
    return remove_redundant(HRep(m[:, :n], rhs))
