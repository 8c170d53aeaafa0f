"""Simplicial and bisimplicial complexes over Z/2.

Cells are plain tuples: a simplex is a strictly increasing tuple of global
point indices, a bisimplex is a pair (left_simplex, right_simplex). Chains
are frozensets of cells of one dimension (Z/2 coefficients).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .metric import DistanceMatrix

Simplex = tuple
Bisimplex = tuple  # (Simplex, Simplex)
ChainZ2 = frozenset


def simplex_dim(cell) -> int:
    return len(cell) - 1


def bisimplex_dim(cell) -> int:
    return len(cell[0]) + len(cell[1]) - 2


def cell_dim(cell) -> int:
    return bisimplex_dim(cell) if is_bisimplex(cell) else simplex_dim(cell)


def is_bisimplex(cell) -> bool:
    return len(cell) == 2 and isinstance(cell[0], tuple)


class SimplicialComplex:
    """Cells graded by dimension, closed under faces by construction."""

    def __init__(self, cells_by_dim: dict[int, list]):
        self._by_dim = {p: sorted(cs) for p, cs in cells_by_dim.items() if cs}
        self._set = {c for cs in self._by_dim.values() for c in cs}

    def cells(self, p: int) -> list:
        return self._by_dim.get(p, [])

    @property
    def dims(self) -> list[int]:
        return sorted(self._by_dim)

    @property
    def max_dim(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    def __contains__(self, cell) -> bool:
        return cell in self._set

    def __len__(self) -> int:
        return len(self._set)

    def num_cells(self, p: int) -> int:
        return len(self._by_dim.get(p, ()))

    def is_face_closed(self) -> bool:
        return all(f in self._set for c in self._set for f in boundary(c))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self._set <= other._set


class Bicomplex(SimplicialComplex):
    """Bisimplices graded by total dimension; closed under subcells."""


def boundary(cell) -> ChainZ2:
    """Mod-2 boundary of a simplex or bisimplex; 0-cells have empty boundary."""
    if is_bisimplex(cell):
        left, right = cell
        faces = []
        if len(left) > 1:
            faces.extend((left[:i] + left[i + 1:], right) for i in range(len(left)))
        if len(right) > 1:
            faces.extend((left, right[:i] + right[i + 1:]) for i in range(len(right)))
        return frozenset(faces)
    if len(cell) <= 1:
        return frozenset()
    return frozenset(cell[:i] + cell[i + 1:] for i in range(len(cell)))


def chain_boundary(chain: ChainZ2) -> ChainZ2:
    out = set()
    for cell in chain:
        out.symmetric_difference_update(boundary(cell))
    return frozenset(out)


def project_chain(chain: ChainZ2, side: str, p: int) -> ChainZ2:
    """Project a homogeneous bisimplex chain of dimension p to one factor.

    Only terms whose chosen factor has full grade p (the other factor a
    vertex) survive; the rest are annihilated by the grading projection.
    """
    if side not in ("left", "right"):
        raise ValueError(f"bad side {side!r}")
    out = set()
    for cell in chain:
        if bisimplex_dim(cell) != p:
            raise ValueError("chain is not homogeneous of the stated dimension")
        factor = cell[0] if side == "left" else cell[1]
        if len(factor) - 1 == p:
            out.symmetric_difference_update((factor,))
    return frozenset(out)


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _flag_complex(vertices, adj_masks, max_dim) -> SimplicialComplex:
    """Clique complex of a graph given as local adjacency bitmasks.

    `vertices` maps local index -> global vertex id (must be increasing).
    """
    n = len(vertices)
    by_dim = {0: [(v,) for v in vertices]}
    if max_dim == 0:
        return SimplicialComplex(by_dim)
    # frontier holds (local_vertex_tuple, candidate extensions above the last vertex)
    frontier = []
    for u in range(n):
        upper = adj_masks[u] >> (u + 1) << (u + 1)
        if upper:
            frontier.append(((u,), upper))
    for p in range(1, max_dim + 1):
        cells = []
        nxt = []
        for clique, cand in frontier:
            for v in _bits(cand):
                cell = clique + (v,)
                cells.append(cell)
                if p < max_dim:
                    new_cand = cand & adj_masks[v] >> (v + 1) << (v + 1)
                    if new_cand:
                        nxt.append((cell, new_cand))
        if not cells:
            break
        by_dim[p] = [tuple(vertices[u] for u in c) for c in cells]
        frontier = nxt
    return SimplicialComplex(by_dim)


def vietoris_rips(dm: DistanceMatrix, subset, epsilon: float, max_dim: int) -> SimplicialComplex:
    """Flag complex of the epsilon-neighborhood graph on `subset` (global ids)."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    verts = sorted(set(subset))
    if not verts:
        raise ValueError("subset must be nonempty")
    sub = dm.submatrix(verts)
    adjacent = sub <= epsilon
    np.fill_diagonal(adjacent, False)
    masks = [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
             for row in adjacent]
    return _flag_complex(verts, masks, max_dim)


def vietoris_rips_filtration(dm: DistanceMatrix, subset, max_eps: float, max_dim: int):
    """Filtered VR complex: list of (cell, appearance scale), face-monotone."""
    complex_ = vietoris_rips(dm, subset, max_eps, max_dim)
    verts = sorted(set(subset))
    local = {v: i for i, v in enumerate(verts)}
    sub = dm.submatrix(verts)
    filtered = []
    for p in complex_.dims:
        for cell in complex_.cells(p):
            if p == 0:
                val = 0.0
            else:
                val = max(sub[local[u], local[v]] for u, v in combinations(cell, 2))
            filtered.append((cell, float(val)))
    return filtered


def lazy_witness_complex(dm: DistanceMatrix, witnesses, landmarks, epsilon: float,
                         max_dim: int) -> SimplicialComplex:
    """Lazy witness complex at nu = 0: flag complex on landmarks where an edge
    [a, b] needs a witness x with max(d(x,a), d(x,b)) <= epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    wit = sorted(set(witnesses))
    lm = sorted(set(landmarks))
    if not set(lm) <= set(wit):
        raise ValueError("landmarks must be a subset of the witnesses")
    close = dm.cross(wit, lm) <= epsilon  # witness x landmark
    covered = close.astype(np.uint8)
    pair_counts = covered.T @ covered  # landmark x landmark co-witness counts
    adjacent = pair_counts > 0
    np.fill_diagonal(adjacent, False)
    masks = [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")
             for row in adjacent]
    return _flag_complex(lm, masks, max_dim)


def _witnessed_sets(row: np.ndarray, landmark_ids, max_size: int) -> dict[int, list]:
    """Simplices over `landmark_ids` weakly witnessed by the point with
    landmark-distance vector `row`, keyed by vertex-set size.

    A witnessed set of size s consists of every landmark strictly nearer than
    the s-th distance plus a choice among the landmarks exactly at it (ties
    witness all competing simplices, per the non-strict inequality).
    """
    order = np.argsort(row, kind="stable")
    svals = row[order]
    out = {}
    m = len(row)
    for s in range(1, min(max_size, m) + 1):
        t = svals[s - 1]
        a = int(np.searchsorted(svals, t, side="left"))
        b = int(np.searchsorted(svals, t, side="right")) - a
        base = [landmark_ids[order[i]] for i in range(a)]
        tie = [landmark_ids[order[i]] for i in range(a, a + b)]
        sets = [tuple(sorted(base + list(extra))) for extra in combinations(tie, s - a)]
        out[s] = sets
    return out


def weak_witness_complex(dm: DistanceMatrix, witnesses, landmarks, max_dim: int,
                         exclude_landmark_witnesses: bool = False) -> SimplicialComplex:
    """Weak witness complex: simplices on landmarks all of whose faces have a
    weak witness (a point whose nearest landmarks, non-strictly, are the face's
    vertices)."""
    wit = sorted(set(witnesses))
    lm = sorted(set(landmarks))
    if not lm:
        raise ValueError("landmark set must be nonempty")
    if not set(lm) <= set(wit):
        raise ValueError("landmarks must be a subset of the witnesses")
    if exclude_landmark_witnesses:
        wit = [w for w in wit if w not in set(lm)]
    witnessed = _collect_witnessed(dm, wit, lm, max_dim + 1)
    return _close_witnessed(witnessed, max_dim)


def _nearest_prefixes(dist: np.ndarray, landmark_ids, k: int):
    """Per-row nearest-landmark prefixes for rows without distance ties.

    Returns (strict, prefixes): `strict[i]` is True when row i's nearest
    min(k+1, m) distances are strictly increasing, in which case its witnessed
    set of each size s <= k is exactly the single prefix `prefixes[s][i]`
    (sorted global ids). Rows with ties must take the exhaustive path.
    """
    m = dist.shape[1]
    kk = min(k + 1, m)
    if kk < m:
        part = np.argpartition(dist, kk - 1, axis=1)[:, :kk]
    else:
        part = np.broadcast_to(np.arange(m), dist.shape)
    pd = np.take_along_axis(dist, part, axis=1)
    order = np.argsort(pd, axis=1, kind="stable")
    top = np.take_along_axis(part, order, axis=1)
    topd = np.take_along_axis(pd, order, axis=1)
    strict = np.all(topd[:, 1:] > topd[:, :-1], axis=1)
    ids = np.asarray(landmark_ids, dtype=np.int64)[top]
    prefixes = {s: np.sort(ids[:, :s], axis=1) for s in range(1, min(k, m) + 1)}
    return strict, prefixes


def _collect_witnessed(dm, wit, lm, max_size) -> dict[int, set]:
    witnessed = {s: set() for s in range(1, max_size + 1)}
    if not wit:
        return witnessed
    dist = np.asarray(dm.cross(wit, lm))
    k = min(max_size, len(lm))
    strict, prefixes = _nearest_prefixes(dist, lm, k)
    fast = np.nonzero(strict)[0]
    for s, pref in prefixes.items():
        witnessed[s].update(map(tuple, np.unique(pref[fast], axis=0).tolist()))
    for i in np.nonzero(~strict)[0]:
        for s, sets in _witnessed_sets(dist[i], lm, k).items():
            witnessed[s].update(sets)
    return witnessed


def _close_witnessed(witnessed, max_dim) -> SimplicialComplex:
    by_dim = {0: sorted(witnessed.get(1, ()))}
    present = set(by_dim[0])
    for p in range(1, max_dim + 1):
        cells = []
        for sigma in sorted(witnessed.get(p + 1, ())):
            if all(f in present for f in boundary(sigma)):
                cells.append(sigma)
        if not cells:
            break
        by_dim[p] = cells
        present.update(cells)
    return SimplicialComplex(by_dim)


def biwitness_complex(dm: DistanceMatrix, witnesses, L, M, max_total_dim: int,
                      factor_max_dim: int | None = None) -> Bicomplex:
    """Weak biwitness bicomplex: bisimplices (sigma, tau) all of whose subcells
    have a common point witnessing sigma w.r.t. L and tau w.r.t. M."""
    wit = sorted(set(witnesses))
    lms = sorted(set(L))
    rms = sorted(set(M))
    if not lms or not rms:
        raise ValueError("both landmark sets must be nonempty")
    if not set(lms) <= set(wit) or not set(rms) <= set(wit):
        raise ValueError("landmarks must be a subset of the witnesses")
    fmax = max_total_dim if factor_max_dim is None else factor_max_dim
    size_cap = min(fmax, max_total_dim) + 1
    dist_l = np.asarray(dm.cross(wit, lms))
    dist_r = np.asarray(dm.cross(wit, rms))
    kl = min(size_cap, len(lms))
    kr = min(size_cap, len(rms))
    strict_l, pref_l = _nearest_prefixes(dist_l, lms, kl)
    strict_r, pref_r = _nearest_prefixes(dist_r, rms, kr)
    candidates: dict[tuple[int, int], set] = {}

    def add_products(wl, wr):
        for p, sigmas in wl.items():
            for q, taus in wr.items():
                if (p - 1) + (q - 1) > max_total_dim:
                    continue
                bucket = candidates.setdefault((p - 1, q - 1), set())
                for sg in sigmas:
                    for tu in taus:
                        bucket.add((sg, tu))

    # tie-free rows witness exactly one set per size and side: their products
    # dedupe in bulk; rows with ties enumerate all competing sets
    both = strict_l & strict_r
    for p in range(1, kl + 1):
        for q in range(1, kr + 1):
            if (p - 1) + (q - 1) > max_total_dim:
                continue
            pairs = np.concatenate([pref_l[p][both], pref_r[q][both]], axis=1)
            bucket = candidates.setdefault((p - 1, q - 1), set())
            for row in np.unique(pairs, axis=0).tolist():
                bucket.add((tuple(row[:p]), tuple(row[p:])))
    for i in np.nonzero(~both)[0]:
        add_products(_witnessed_sets(dist_l[i], lms, kl),
                     _witnessed_sets(dist_r[i], rms, kr))
    by_dim: dict[int, list] = {}
    present = set()
    for t in range(max_total_dim + 1):
        cells = []
        for p in range(t + 1):
            q = t - p
            for cell in sorted(candidates.get((p, q), ())):
                if all(f in present for f in boundary(cell)):
                    cells.append(cell)
        if cells:
            by_dim[t] = cells
            present.update(cells)
    return Bicomplex(by_dim)


def dump_complex(complex_: SimplicialComplex) -> str:
    """Debug dump: `dim: v0 v1 ...` per simplex, `dim: (v0 v1 | w0)` per bisimplex."""
    lines = []
    for p in complex_.dims:
        for cell in complex_.cells(p):
            if is_bisimplex(cell):
                left = " ".join(map(str, cell[0]))
                right = " ".join(map(str, cell[1]))
                lines.append(f"{p}: ({left} | {right})")
            else:
                lines.append(f"{p}: " + " ".join(map(str, cell)))
    return "\n".join(lines) + ("\n" if lines else "")
