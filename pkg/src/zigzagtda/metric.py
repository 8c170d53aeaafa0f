"""Finite metric spaces: point clouds, distance matrices, sampling, landmarks."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

# Above this size a distance matrix is kept lazy (entries computed from the
# backing points on demand) to avoid O(n^2) storage.
_DENSE_LIMIT = 3000

SHAPES = ("circle", "figure8", "sphere", "torus4d")


class PointCloud:
    """A finite list of points in R^d, all with the same dimension."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("point cloud must be a nonempty n x d array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud contains non-finite coordinates")
        self._points = pts
        self._points.setflags(write=False)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    def __len__(self) -> int:
        return self.n


class DistanceMatrix:
    """Symmetric nonnegative distances with zero diagonal.

    Backed either by a dense array or lazily by a point cloud; lazy storage
    keeps large clouds usable without materializing n^2 entries.
    """

    def __init__(self, dense: np.ndarray):
        d = np.asarray(dense, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.all(np.isfinite(d)):
            raise ValueError("distance matrix has non-finite entries")
        if np.any(d < 0):
            raise ValueError("distance matrix has negative entries")
        if np.any(np.diagonal(d) != 0):
            raise ValueError("distance matrix has nonzero diagonal")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix is not symmetric")
        self.n = d.shape[0]
        self._dense = d
        self._points = None

    @classmethod
    def from_points(cls, points: np.ndarray) -> "DistanceMatrix":
        pts = np.asarray(points, dtype=float)
        if pts.shape[0] <= _DENSE_LIMIT:
            d = _euclidean_cross(pts, pts)
            # exact zero diagonal and symmetry despite float rounding
            d = np.triu(d, 1)
            return cls(d + d.T)
        obj = cls.__new__(cls)
        obj.n = pts.shape[0]
        obj._dense = None
        obj._points = pts
        return obj

    def entry(self, i: int, j: int) -> float:
        if self._dense is not None:
            return float(self._dense[i, j])
        return float(np.linalg.norm(self._points[i] - self._points[j]))

    def submatrix(self, indices: Sequence[int]) -> np.ndarray:
        idx = np.asarray(indices, dtype=int)
        if self._dense is not None:
            return self._dense[np.ix_(idx, idx)]
        d = _euclidean_cross(self._points[idx], self._points[idx])
        # exact zero diagonal and symmetry despite float rounding
        d = np.triu(d, 1)
        return d + d.T

    def cross(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        r = np.asarray(rows, dtype=int)
        c = np.asarray(cols, dtype=int)
        if self._dense is not None:
            return self._dense[np.ix_(r, c)]
        return _euclidean_cross(self._points[r], self._points[c])

    def toarray(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return _euclidean_cross(self._points, self._points)


def _euclidean_cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    sq = np.sum(a * a, axis=1)[:, None] + np.sum(b * b, axis=1)[None, :]
    sq -= 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq)


def distance_matrix(cloud: PointCloud) -> DistanceMatrix:
    """Pairwise Euclidean distance matrix of a point cloud."""
    return DistanceMatrix.from_points(cloud.points)


def generate(shape: str, n: int, seed: int) -> PointCloud:
    """Sample n points uniformly at random from a named space.

    Shapes: circle (unit circle in R^2), figure8 (two unit circles tangent
    at the origin, centers at (-1,0) and (1,0)), sphere (unit S^2 in R^3),
    torus4d (product of two unit circles in R^4).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if shape == "circle":
        a = rng.uniform(0.0, 2.0 * math.pi, n)
        pts = np.column_stack([np.cos(a), np.sin(a)])
    elif shape == "figure8":
        a = rng.uniform(0.0, 2.0 * math.pi, n)
        side = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        pts = np.column_stack([side + np.cos(a), np.sin(a)])
    elif shape == "sphere":
        v = rng.normal(size=(n, 3))
        pts = v / np.linalg.norm(v, axis=1)[:, None]
    elif shape == "torus4d":
        a = rng.uniform(0.0, 2.0 * math.pi, n)
        b = rng.uniform(0.0, 2.0 * math.pi, n)
        pts = np.column_stack([np.cos(a), np.sin(a), np.cos(b), np.sin(b)])
    else:
        raise ValueError(f"unknown shape {shape!r}; expected one of {SHAPES}")
    return PointCloud(pts)


def random_subsample(n: int, k: int, seed: int) -> tuple[int, ...]:
    """k distinct indices out of range(n), uniform without replacement."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    return tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))


def maxmin_landmarks(dm: DistanceMatrix, k: int, first: int) -> list[int]:
    """Greedy farthest-point landmark sequence of length k starting at `first`.

    Each new landmark maximizes its minimum distance to those already chosen;
    ties break toward the lowest index. The returned list preserves selection
    order, so prefixes are themselves valid max-min selections.
    """
    n = dm.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 0 <= first < n:
        raise ValueError(f"first index {first} out of range")
    chosen = [first]
    mindist = dm.cross([first], range(n))[0].copy()
    for _ in range(k - 1):
        mindist[chosen] = -1.0
        nxt = int(np.argmax(mindist))  # argmax takes the first max: lowest index
        chosen.append(nxt)
        np.minimum(mindist, dm.cross([nxt], range(n))[0], out=mindist)
    return chosen


def load_point_cloud(path) -> PointCloud:
    """Read a point cloud: one point per line, comma or whitespace separated.

    Lines starting with `#` are ignored.
    """
    return PointCloud(_load_rows(path))


def load_distance_matrix(path) -> DistanceMatrix:
    """Read a dense distance matrix in the same textual format as clouds."""
    return DistanceMatrix(_load_rows(path))


def save_point_cloud(path, cloud: PointCloud) -> None:
    with open(path, "w") as fh:
        for row in cloud.points:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _load_rows(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            rows.append([float(p) for p in parts])
    if not rows:
        raise ValueError(f"no data rows in {path}")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ValueError(f"inconsistent row lengths in {path}")
    return np.asarray(rows, dtype=float)
