"""Deterministic small fixtures used by tests, examples, and documentation."""

from __future__ import annotations

import math

import numpy as np

from .metric import DistanceMatrix, PointCloud, distance_matrix


def hexagon_circle_fixture(n_witnesses: int = 120):
    """Two interleaved landmark triples on a densely sampled unit circle.

    Returns (dm, witnesses, L, M): L sits at angles {0, 2pi/3, 4pi/3} and M at
    {pi/3, pi, 5pi/3}; the witness set is the full uniform circle sample with
    n divisible by 6 so the landmark angles are hit exactly.
    """
    if n_witnesses % 6 != 0:
        raise ValueError("witness count must be divisible by 6")
    ang = 2.0 * math.pi * np.arange(n_witnesses) / n_witnesses
    cloud = PointCloud(np.column_stack([np.cos(ang), np.sin(ang)]))
    step = n_witnesses // 6
    L = (0, 2 * step, 4 * step)
    M = (step, 3 * step, 5 * step)
    return distance_matrix(cloud), tuple(range(n_witnesses)), L, M


def figure8_landmark_fixture(per_circle: int = 48, spacing: int = 6):
    """Landmark sets A (left lobe), B (right lobe), and C = A disjoint-union B
    on a figure-8 sampled so that midpoints between consecutive landmarks are
    exact witnesses (equidistant ties are exact in the distance matrix).

    Intra-lobe distances come from a shared chord table so that symmetric
    pairs compare exactly equal; cross-lobe distances are Euclidean.

    Returns (dm, witnesses, A, B, C).
    """
    n = per_circle
    if n % spacing != 0:
        raise ValueError("spacing must divide per_circle")
    chord = [2.0 * math.sin(math.pi * k / n) for k in range(n)]
    # left lobe: angle 0 is the junction point (origin)
    left_ang = 2.0 * math.pi * np.arange(n) / n
    left = np.column_stack([-1.0 + np.cos(left_ang), np.sin(left_ang)])
    # right lobe: half-step offset keeps it disjoint from the junction point
    right_ang = math.pi + 2.0 * math.pi * (np.arange(n) + 0.5) / n
    right = np.column_stack([1.0 + np.cos(right_ang), np.sin(right_ang)])

    total = 2 * n
    d = np.zeros((total, total))
    for i in range(n):
        for j in range(i + 1, n):
            gap = min(j - i, n - (j - i))
            d[i, j] = d[j, i] = chord[gap]
            d[n + i, n + j] = d[n + j, n + i] = chord[gap]
    cross = np.sqrt(np.sum((left[:, None, :] - right[None, :, :]) ** 2, axis=2))
    d[:n, n:] = cross
    d[n:, :n] = cross.T
    dm = DistanceMatrix(d)
    A = tuple(range(0, n, spacing))
    B = tuple(range(n, 2 * n, spacing))
    C = A + B
    return dm, tuple(range(total)), A, B, C


def witness_nonfunctoriality_fixture():
    """Three collinear points: the edge between the outer pair is witnessed
    vacuously for L = {outer pair} but disappears once the middle point joins
    the landmark set."""
    cloud = PointCloud([[0.0], [1.0], [2.0]])
    return distance_matrix(cloud), (0, 1, 2), (0, 2), (0, 1, 2)
