"""Parameterized point filters (codensity, Gaussian KDE) and top-T% levelsets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .metric import DistanceMatrix, PointCloud

_BLOCK = 512


@dataclass(frozen=True)
class FilterValues:
    """One filter value per point; `order` says which end of the scale is best."""

    values: np.ndarray
    order: str  # "ascending" (low is best) or "descending" (high is best)

    def __post_init__(self):
        if self.order not in ("ascending", "descending"):
            raise ValueError(f"bad order {self.order!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or not np.all(np.isfinite(self.values)):
            raise ValueError("filter values must be a finite vector")


def codensity(dm: DistanceMatrix, k: int) -> FilterValues:
    """Distance from each point to its k-th nearest neighbor (self excluded).

    Low codensity means high local density, so ascending order is best.
    """
    n = dm.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"need 1 <= k <= n-1, got k={k}, n={n}")
    out = np.empty(n)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        rows = dm.cross(range(lo, hi), range(n)).copy()
        rows[np.arange(hi - lo), np.arange(lo, hi)] = np.inf  # drop self
        out[lo:hi] = np.partition(rows, k - 1, axis=1)[:, k - 1]
    return FilterValues(out, "ascending")


def gaussian_kde(cloud: PointCloud, sigma: float) -> FilterValues:
    """Gaussian kernel density estimate at each cloud point (self term included)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    pts = cloud.points
    n, d = pts.shape
    norm = (math.sqrt(2.0 * math.pi) * sigma) ** (-d)
    sq_norms = np.sum(pts * pts, axis=1)
    out = np.empty(n)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        sq = sq_norms[lo:hi, None] + sq_norms[None, :] - 2.0 * (pts[lo:hi] @ pts.T)
        np.maximum(sq, 0.0, out=sq)
        out[lo:hi] = np.mean(np.exp(-sq / (2.0 * sigma * sigma)), axis=1)
    return FilterValues(norm * out, "descending")


def top_percent(fv: FilterValues, T: float) -> tuple[int, ...]:
    """Indices of the best ceil(T*n/100) points; cutoff ties break by lowest index."""
    if not 0 < T <= 100:
        raise ValueError("T must lie in (0, 100]")
    n = len(fv.values)
    m = math.ceil(T * n / 100.0)
    key = fv.values if fv.order == "ascending" else -fv.values
    ranked = sorted(range(n), key=lambda i: (key[i], i))
    return tuple(sorted(ranked[:m]))
