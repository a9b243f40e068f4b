"""Polyhedron representations.

``HRep`` is ``{x | a x <= b}``, ``VRep`` is ``conv(vertices) + cone(rays)``,
``PRep`` is ``{x | exists u: a x + bmat u <= b}``. Equalities are stored as a
pair of opposite inequalities throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polynash.linalg import as_matrix

FEAS_TOL = 1e-9
DEDUP_TOL = 1e-7


def _vector(v, name: str) -> np.ndarray:
    arr = np.array(v, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class HRep:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        if a.ndim != 2:
            raise ValueError(f"HRep matrix must be 2-D, got shape {a.shape}")
        a = as_matrix(a, "HRep.a")
        b = _vector(self.b, "HRep.b")
        if a.shape[0] != len(b):
            raise ValueError(f"HRep has {a.shape[0]} rows but {len(b)} right-hand sides")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.shape[1]

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @classmethod
    def universe(cls, dim: int) -> HRep:
        return cls(np.zeros((0, dim)), np.zeros(0))

    @classmethod
    def point(cls, p) -> HRep:
        p = _vector(p, "point")
        eye = np.eye(len(p))
        return cls(np.vstack([eye, -eye]), np.concatenate([p, -p]))

    @classmethod
    def box(cls, lower, upper) -> HRep:
        lower = _vector(lower, "lower")
        upper = _vector(upper, "upper")
        eye = np.eye(len(lower))
        return cls(np.vstack([eye, -eye]), np.concatenate([upper, -lower]))

    @classmethod
    def simplex(cls, dim: int) -> HRep:
        """Probability simplex ``{x >= 0, sum x = 1}``."""
        ones = np.ones((1, dim))
        return cls(np.vstack([-np.eye(dim), ones, -ones]), np.concatenate([np.zeros(dim), [1.0, -1.0]]))

    def normalized(self) -> HRep:
        """Rows scaled to unit infinity-norm; all-zero rows are kept unscaled."""
        scale = np.abs(self.a).max(axis=1) if self.rows else np.zeros(0)
        scale = np.where(scale > 0, scale, 1.0)
        return HRep(self.a / scale[:, None], self.b / scale)

    def slack(self, x) -> np.ndarray:
        """``b - a x`` on normalized rows."""
        h = self.normalized()
        return h.b - h.a @ np.asarray(x, dtype=float)

    def contains(self, x, tol: float = FEAS_TOL) -> bool:
        if self.rows == 0:
            return True
        return bool(np.all(self.slack(x) >= -tol))


@dataclass(frozen=True, eq=False)
class VRep:
    vertices: np.ndarray
    rays: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        rays = np.array(self.rays, dtype=float)
        dim = None
        for arr in (verts, rays):
            if arr.ndim == 2 and arr.shape[0] > 0:
                dim = arr.shape[1]
        if dim is None:
            dim = max(verts.shape[-1] if verts.ndim == 2 else 0, rays.shape[-1] if rays.ndim == 2 else 0)
        verts = verts.reshape(-1, dim) if verts.size else np.zeros((0, dim))
        rays = rays.reshape(-1, dim) if rays.size else np.zeros((0, dim))
        if not (np.all(np.isfinite(verts)) and np.all(np.isfinite(rays))):
            raise ValueError("VRep has non-finite entries")
        if len(rays):
            norms = np.abs(rays).max(axis=1)
            if np.any(norms == 0):
                raise ValueError("VRep rays must be nonzero")
            rays = rays / norms[:, None]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rays", rays)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_empty(self) -> bool:
        return len(self.vertices) == 0

    @classmethod
    def from_points(cls, points, rays=None) -> VRep:
        points = np.atleast_2d(np.array(points, dtype=float))
        if rays is None:
            rays = np.zeros((0, points.shape[1]))
        return cls(points, rays)


@dataclass(frozen=True, eq=False)
class PRep:
    a: np.ndarray
    bmat: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = as_matrix(self.a, "PRep.a")
        bmat = as_matrix(self.bmat, "PRep.bmat")
        b = _vector(self.b, "PRep.b")
        if not (a.shape[0] == bmat.shape[0] == len(b)):
            raise ValueError("PRep row counts disagree")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "bmat", bmat)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix ``m`` acting as ``x -> m x`` from R^source to R^target."""

    m: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", as_matrix(self.m, "LinearMap.m"))

    @property
    def source_dim(self) -> int:
        return self.m.shape[1]

    @property
    def target_dim(self) -> int:
        return self.m.shape[0]


def unique_rows(points: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    """Drop rows within ``tol`` (infinity norm) of an earlier row, keeping first occurrences."""
    points = np.asarray(points, dtype=float)
    keep: list[int] = []
    for i, p in enumerate(points):
        if not keep or np.abs(points[keep] - p).max(axis=1).min() > tol:
            keep.append(i)
    return points[keep]


def sort_rows(points: np.ndarray, decimals: int = 9) -> np.ndarray:
    """Lexicographic row order, robust to noise below ``10**-decimals``."""
    if len(points) == 0:
        return points
    keys = np.round(points, decimals) + 0.0
    order = np.lexsort(keys.T[::-1])
    return points[order]
