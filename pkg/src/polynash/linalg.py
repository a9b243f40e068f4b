"""Dense real matrix kernel.

Matrices are plain 2-D ``float64`` numpy arrays; :func:`as_matrix` is the single
entry point that validates shape and finiteness. The SVD is a one-sided
(Hestenes) Jacobi iteration run on the smaller side of the matrix, with all
disjoint column pairs of a round-robin round rotated at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_RANK_TOL = 1e-9
# relative drop in a downdated squared norm past which it is recomputed
STALE = np.sqrt(np.finfo(float).eps)


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D float array, raising ``ValueError`` otherwise."""
    arr = np.array(m, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def matmul(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def hconcat(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row count mismatch: {a.shape[0]} vs {b.shape[0]}")
    return np.hstack([a, b])


def vconcat(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column count mismatch: {a.shape[1]} vs {b.shape[1]}")
    return np.vstack([a, b])


def norm_inf(m) -> float:
    """Maximum absolute row sum (0 for empty matrices)."""
    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    return float(np.abs(m).sum(axis=1).max())


@dataclass(frozen=True)
class SvdResult:
    """Truncated SVD ``M = u @ diag(sigma) @ v.T`` keeping the ``k`` significant values."""

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def k(self) -> int:
        return len(self.sigma)

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint index pairs covering every pair of ``range(n)`` once per sweep."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = [(players[i], players[size - 1 - i]) for i in range(size // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        if pairs:
            p, q = zip(*pairs)
            rounds.append((np.array(p), np.array(q)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _jacobi_columns(g: np.ndarray, max_sweeps: int = 80, eps: float = 1e-15):
    """Orthogonalize the columns of ``g`` in place; return the accumulated rotation."""
    n = g.shape[1]
    v = np.eye(n)
    rounds = _round_robin(n)
    # columns below this squared norm are numerically zero and never rotated
    floor = (1e-14 * np.linalg.norm(g)) ** 2
    for _ in range(max_sweeps):
        rotated = False
        for p, q in rounds:
            gp, gq = g[:, p], g[:, q]
            alpha = np.einsum("ij,ij->j", gp, gp)
            beta = np.einsum("ij,ij->j", gq, gq)
            gamma = np.einsum("ij,ij->j", gp, gq)
            active = np.abs(gamma) > eps * np.sqrt(alpha * beta)
            active &= (gamma != 0.0) & (np.minimum(alpha, beta) > floor)
            if not active.any():
                continue
            rotated = True
            p, q = p[active], q[active]
            alpha, beta, gamma = alpha[active], beta[active], gamma[active]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            for mat in (g, v):
                mp, mq = mat[:, p], mat[:, q]
                mat[:, p] = c * mp - s * mq
                mat[:, q] = s * mp + c * mq
        if not rotated:
            break
    return v


def svd_truncated(m, rel_tol: float = DEFAULT_RANK_TOL) -> SvdResult:
    """Singular value decomposition truncated to values above ``rel_tol * sigma_max``.

    Columns are sign-normalized so that the largest-magnitude entry of each
    column of ``u`` is positive.
    """
    m = as_matrix(m)
    if m.size == 0:
        raise ValueError("svd of an empty matrix")
    if not 0.0 < rel_tol < 1.0:
        raise ValueError("rel_tol must lie in (0, 1)")
    rows, cols = m.shape
    transpose = cols > rows
    g = (m.T if transpose else m).copy()
    # compress to the numerical row space first; residual directions sit far below the cutoff
    _, basis = row_basis(g, tol=rel_tol * 1e-3 / np.sqrt(g.shape[0]))
    if basis.shape[1] < g.shape[1]:
        g = g @ basis
        right = basis @ _jacobi_columns(g)
    else:
        right = _jacobi_columns(g)
    sigma = np.linalg.norm(g, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    g = g[:, order]
    right = right[:, order]
    smax = sigma[0] if len(sigma) else 0.0
    k = int(np.sum(sigma > rel_tol * smax)) if smax > 0 else 0
    left = g[:, :k] / sigma[:k]
    right = right[:, :k]
    if transpose:
        left, right = right, left
    idx = np.argmax(np.abs(left), axis=0)
    signs = np.sign(left[idx, np.arange(k)])
    signs[signs == 0] = 1.0
    left = left * signs
    right = right * signs
    return SvdResult(u=left, sigma=sigma[:k].copy(), v=right)


def rank(m, rel_tol: float = DEFAULT_RANK_TOL) -> int:
    m = as_matrix(m)
    if m.size == 0:
        return 0
    return svd_truncated(m, rel_tol).k


def row_basis(a: np.ndarray, tol: float = 1e-10):
    """Pivoted Gram-Schmidt over the rows of ``a``.

    Returns ``(pivots, q)`` where ``pivots`` are indices of linearly independent
    rows and ``q`` (n x r) is an orthonormal basis of the row space.

    Rows with a single nonzero entry (sign constraints, mostly) are taken first:
    they are mutually orthogonal, and removing their coordinates leaves a much
    smaller problem for the greedy pass.
    """
    a = np.asarray(a, dtype=float)
    m, n = a.shape
    scale = max(1.0, float(np.abs(a).max())) if a.size else 1.0
    cutoff = tol * scale
    single = np.nonzero(np.count_nonzero(a, axis=1) == 1)[0] if a.size else np.zeros(0, dtype=int)
    cols = np.argmax(np.abs(a[single]), axis=1) if len(single) else np.zeros(0, dtype=int)
    big = np.abs(a[single, cols]) > cutoff if len(single) else np.zeros(0, dtype=bool)
    cols, first = np.unique(cols[big], return_index=True)
    axis_rows = single[big][first]
    rest = np.setdiff1d(np.arange(n), cols)
    sub_pivots, sub_q = _greedy_basis(a[:, rest], cutoff)
    q = np.zeros((n, len(cols) + len(sub_pivots)))
    q[cols, np.arange(len(cols))] = 1.0
    q[rest, len(cols) :] = sub_q
    return [int(i) for i in axis_rows] + sub_pivots, q


def _greedy_basis(a: np.ndarray, cutoff: float):
    """Greedy pivoted Gram-Schmidt; see :func:`row_basis`.

    Residual norms are downdated rather than recomputed: with an orthonormal
    basis the coefficient of row i on a new vector q is just ``a_i . q``. Only
    the pivot row's residual is formed explicitly. As in LAPACK's pivoted QR,
    a row whose estimate has shrunk by more than sqrt(eps) since it was last
    computed has lost its significant digits and is recomputed, and rows whose
    true residual is below the cutoff are retired.
    """
    m, n = a.shape
    pivots: list[int] = []
    basis = np.zeros((min(m, n), n))
    norms2 = np.einsum("ij,ij->i", a, a)
    ref2 = norms2.copy()
    live = norms2 > cutoff * cutoff
    for r in range(min(m, n)):
        stale = live & (norms2 <= STALE * ref2)
        if stale.any():
            resid = a[stale] - (a[stale] @ basis[:r].T) @ basis[:r]
            norms2[stale] = ref2[stale] = np.einsum("ij,ij->i", resid, resid)
            live &= norms2 > cutoff * cutoff
        while True:
            est = np.where(live, norms2, -1.0)
            i = int(np.argmax(est))
            q = a[i] - basis[:r].T @ (basis[:r] @ a[i])
            # second projection pass keeps q orthogonal under cancellation
            q -= basis[:r].T @ (basis[:r] @ q)
            true = float(np.linalg.norm(q))
            if true * true >= 0.5 * est[i] or est[i] <= cutoff * cutoff:
                break
            resid = a - (a @ basis[:r].T) @ basis[:r]
            norms2 = np.einsum("ij,ij->i", resid, resid)
            ref2 = norms2.copy()
            live &= norms2 > cutoff * cutoff
        if est[i] <= 0 or true <= cutoff:
            break
        q /= true
        basis[r] = q
        pivots.append(i)
        live[i] = False
        norms2 -= (a @ q) ** 2
    q = basis[: len(pivots)].T.copy()
    return pivots, q


def orthogonal_complement(q: np.ndarray) -> np.ndarray:
    """Orthonormal basis (n x (n-r)) of the complement of the orthonormal columns ``q``."""
    n, r = q.shape
    if r == n:
        return np.zeros((n, 0))
    resid = np.eye(n) - q @ q.T
    _, comp = row_basis(resid, tol=1e-8)
    return comp[:, : n - r]


def null_space(a, tol: float = 1e-10) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    _, q = row_basis(a, tol)
    return orthogonal_complement(q)
