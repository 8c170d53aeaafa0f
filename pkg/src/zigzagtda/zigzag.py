"""Interval decompositions of union, intersection, and biwitness zigzags.

Zigzag indices are stored doubled: stage j is 2j and the bridge between j and
j+1 is 2j+1, so half-integers stay exact integers internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import homology
from .complexes import (Bicomplex, SimplicialComplex, biwitness_complex,
                        project_chain, vietoris_rips, weak_witness_complex)
from .metric import DistanceMatrix


@dataclass(frozen=True, order=True)
class Interval:
    """Closed interval over doubled zigzag indices."""

    start: int  # doubled
    end: int    # doubled

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"bad interval [{self.start}, {self.end}] (doubled)")

    @property
    def is_half_integral(self) -> bool:
        return self.start % 2 == 1 and self.end % 2 == 1

    def value(self, doubled: int):
        return doubled // 2 if doubled % 2 == 0 else doubled / 2

    def endpoints(self):
        return self.value(self.start), self.value(self.end)

    def covers_stage(self, j: int) -> bool:
        return self.start <= 2 * j <= self.end


@dataclass(frozen=True)
class Barcode:
    """Multiset of intervals grouped by homology dimension."""

    by_dim: tuple  # tuple of (dimension, tuple of sorted Interval)

    @classmethod
    def build(cls, intervals: dict[int, list[Interval]]) -> "Barcode":
        return cls(tuple((p, tuple(sorted(ivs)))
                         for p, ivs in sorted(intervals.items())))

    def dims(self) -> list[int]:
        return [p for p, _ in self.by_dim]

    def intervals(self, p: int) -> tuple:
        for q, ivs in self.by_dim:
            if q == p:
                return ivs
        return ()

    def covering_count(self, p: int, stage: int) -> int:
        return sum(1 for iv in self.intervals(p) if iv.covers_stage(stage))

    def to_json_obj(self) -> list:
        out = []
        for p, ivs in self.by_dim:
            out.append({
                "dimension": p,
                "intervals": [
                    {"start": iv.value(iv.start), "end": iv.value(iv.end),
                     "half_open": False}
                    for iv in ivs
                ],
            })
        return out

    def mirrored(self, n_stages: int) -> "Barcode":
        last = 2 * (n_stages - 1)
        return Barcode.build({
            p: [Interval(last - iv.end, last - iv.start) for iv in ivs]
            for p, ivs in self.by_dim
        })


def interval(start, end) -> Interval:
    """Interval from plain (possibly half-integer) endpoints."""
    return Interval(int(round(2 * start)), int(round(2 * end)))


def suppress_half_integral(b: Barcode, clip: bool = True) -> Barcode:
    """Drop purely half-integral intervals; optionally clip half-integral
    endpoints inward to the nearest integer index."""
    out: dict[int, list[Interval]] = {}
    for p, ivs in b.by_dim:
        kept = []
        for iv in ivs:
            if iv.is_half_integral:
                continue
            if clip:
                s = iv.start + 1 if iv.start % 2 else iv.start
                e = iv.end - 1 if iv.end % 2 else iv.end
                iv = Interval(s, e)
            kept.append(iv)
        out[p] = kept
    return Barcode.build(out)


def _decompose(n_stages: int, stage_ranks, match_fn, bridge_only_fn,
               keep_half_integral: bool):
    """Run the class-matching sweep shared by all three zigzag kinds.

    match_fn(j) yields an injective list of (class index at j, class index at
    j+1) pairs; bridge_only_fn(j) counts bridge classes invisible at both
    neighboring stages.
    """
    intervals: list[Interval] = []
    open_start = {a: 0 for a in range(stage_ranks(0))}
    for j in range(n_stages - 1):
        matches = match_fn(j)
        matched_a = {a for a, _ in matches}
        matched_b = {b for _, b in matches}
        nxt = {}
        for a, b in matches:
            nxt[b] = open_start[a]
        for a in sorted(open_start):
            if a not in matched_a:
                intervals.append(Interval(open_start[a], 2 * j))
        for b in range(stage_ranks(j + 1)):
            if b not in matched_b:
                nxt[b] = 2 * (j + 1)
        if keep_half_integral:
            for _ in range(bridge_only_fn(j)):
                intervals.append(Interval(2 * j + 1, 2 * j + 1))
        open_start = nxt
    last = 2 * (n_stages - 1)
    for a in sorted(open_start):
        intervals.append(Interval(open_start[a], last))
    return intervals


def _greedy_pairs(pairs_iter):
    """First-come injective matching over candidate (a, b) pairs."""
    matched_a, matched_b, out = set(), set(), []
    for a, b in pairs_iter:
        if a not in matched_a and b not in matched_b:
            matched_a.add(a)
            matched_b.add(b)
            out.append((a, b))
    return out


class _PushforwardMatcher:
    """Matches stage classes through a bridge that both stages include into
    (union-type sequences): classes match when their literal cycles are
    homologous and nonzero in the bridge.

    Stage complexes are built on demand and only their homology bases are
    retained; bridges are rebuilt per step so long sequences stay within
    memory.
    """

    def __init__(self, n_stages, stage_complex, bridge_complex, p):
        self.n_stages = n_stages
        self.stage_complex = stage_complex    # j -> SimplicialComplex
        self.bridge_complex = bridge_complex  # j -> SimplicialComplex
        self.p = p
        self._bases: dict[int, homology.HomologyBasis] = {}
        self._bridge: tuple[int, homology.HomologyEngine] | None = None

    def basis(self, j):
        if j not in self._bases:
            self._bases[j] = homology.homology_basis(self.stage_complex(j), self.p)
        return self._bases[j]

    def rank(self, j):
        return self.basis(j).rank

    def _bridge_engine(self, j):
        if self._bridge is None or self._bridge[0] != j:
            self._bridge = (j, homology.HomologyEngine(self.bridge_complex(j)))
        return self._bridge[1]

    def match(self, j):
        eng = self._bridge_engine(j)
        nf_a = [eng.normal_form(rep, self.p) for rep in self.basis(j).representatives]
        nf_b = [eng.normal_form(rep, self.p) for rep in self.basis(j + 1).representatives]
        # Greedy rounds: a pair matches when its bridge classes agree modulo
        # the span of classes already carried across. The quotient lets a
        # class match even when a basis representative happens to wrap an
        # already-continued class as well. Classes that vanish in the bridge
        # (or modulo matched classes) never match.
        matched = []
        free_a = list(range(len(nf_a)))
        free_b = list(range(len(nf_b)))
        carried = homology._Echelon()
        progress = True
        while progress:
            progress = False
            for a in list(free_a):
                fa = carried.normal_form(nf_a[a])
                if fa == 0:
                    continue
                for b in free_b:
                    if carried.normal_form(nf_b[b]) == fa:
                        matched.append((a, b))
                        free_a.remove(a)
                        free_b.remove(b)
                        carried.insert(fa)
                        progress = True
                        break
        return matched

    def bridge_only(self, j):
        eng = self._bridge_engine(j)
        span = homology._Echelon()
        pushed = 0
        for basis in (self.basis(j), self.basis(j + 1)):
            for rep in basis.representatives:
                if span.insert(eng.normal_form(rep, self.p)):
                    pushed += 1
        return eng.rank(self.p) - pushed


class _ProjectionMatcher:
    """Matches stage classes through a bridge that maps into both stages
    (intersection and bicomplex sequences): basis classes a, b match when some
    bridge class pushes to exactly (a, b), and neither (a, 0) nor (0, b) is
    itself realized (which would split the pair into two shorter bars)."""

    def __init__(self, stage_complexes, bridge_for, chain_into_stage, p):
        self.stages = stage_complexes
        self.bridge_for = bridge_for
        self.chain_into_stage = chain_into_stage  # (bridge rep, side) -> stage chain
        self.p = p
        self.bases = [homology.homology_basis(c, p) for c in stage_complexes]

    def rank(self, j):
        return self.bases[j].rank

    def _pushed_span(self, j):
        """Echelon span of (class in H_p(stage j), class in H_p(stage j+1))
        pairs realized by bridge classes, as bitsets over both bases."""
        bridge = self.bridge_for(j)
        left_eng = homology.engine(self.stages[j])
        right_eng = homology.engine(self.stages[j + 1])
        r_right = self.bases[j + 1].rank
        span = homology._Echelon()
        for rep in homology.homology_basis(bridge, self.p).representatives:
            va = left_eng.class_vector(self.chain_into_stage(rep, "left"), self.p)
            vb = right_eng.class_vector(self.chain_into_stage(rep, "right"), self.p)
            bits = 0
            for i in va:
                bits |= 1 << (r_right + i)
            for i in vb:
                bits |= 1 << i
            span.insert(bits)
        return span, r_right

    def match(self, j):
        span, r_right = self._pushed_span(j)
        cands = []
        for a in range(self.bases[j].rank):
            left_alone = 1 << (r_right + a)
            if span.normal_form(left_alone) == 0:
                continue  # realized with a vanishing right side: no genuine match
            for b in range(r_right):
                if span.normal_form(1 << b) == 0:
                    continue
                if span.normal_form(left_alone | (1 << b)) == 0:
                    cands.append((a, b))
        return _greedy_pairs(cands)

    def bridge_only(self, j):
        # bridge classes invisible at both neighboring stages
        span, _ = self._pushed_span(j)
        bridge = self.bridge_for(j)
        return homology.engine(bridge).rank(self.p) - span.rank


def _run_matcher(matcher, n_stages, keep_half_integral) -> Barcode:
    ivs = _decompose(n_stages, matcher.rank, matcher.match, matcher.bridge_only,
                     keep_half_integral)
    return Barcode.build({matcher.p: ivs})


def union_zigzag(stages, dm: DistanceMatrix, epsilon: float, max_dim: int, p: int,
                 keep_half_integral: bool = False) -> Barcode:
    """Barcode of the union zigzag of VR complexes on the given index sets."""
    matcher = _union_matcher(stages, dm, epsilon, max_dim, p)
    return _run_matcher(matcher, len(stages), keep_half_integral)


def _union_matcher(stages, dm, epsilon, max_dim, p):
    stages = [tuple(sorted(set(s))) for s in stages]
    if len(stages) < 2:
        raise ValueError("need at least 2 stages")
    # cells above dimension p+1 cannot affect H_p
    trunc = min(max_dim, p + 1)

    def stage_complex(j):
        return vietoris_rips(dm, stages[j], epsilon, trunc)

    def bridge_complex(j):
        union = sorted(set(stages[j]) | set(stages[j + 1]))
        return vietoris_rips(dm, union, epsilon, trunc)

    return _PushforwardMatcher(len(stages), stage_complex, bridge_complex, p)


def intersection_zigzag(stages, dm: DistanceMatrix, epsilon: float, max_dim: int,
                        p: int, keep_half_integral: bool = False) -> Barcode:
    """Barcode of the intersection zigzag of VR complexes.

    Classes at adjacent stages match when some bridge class (on the shared
    points) pushes forward to both of them.
    """
    stages = [tuple(sorted(set(s))) for s in stages]
    if len(stages) < 2:
        raise ValueError("need at least 2 stages")
    trunc = min(max_dim, p + 1)
    complexes = [vietoris_rips(dm, s, epsilon, trunc) for s in stages]
    bridges: dict[int, SimplicialComplex] = {}

    def bridge_for(j):
        if j not in bridges:
            common = sorted(set(stages[j]) & set(stages[j + 1]))
            if common:
                bridges[j] = vietoris_rips(dm, common, epsilon, trunc)
            else:
                bridges[j] = SimplicialComplex({})
        return bridges[j]

    def chain_into_stage(rep, side):
        return rep  # cells carry global indices, inclusion is verbatim

    matcher = _ProjectionMatcher(complexes, bridge_for, chain_into_stage, p)
    return _run_matcher(matcher, len(stages), keep_half_integral)


def bicomplex_zigzag(landmark_stages, witnesses, dm: DistanceMatrix, max_dim: int,
                     p: int, keep_half_integral: bool = False,
                     exclude_landmark_witnesses: bool = False) -> Barcode:
    """Barcode of the biwitness zigzag: witness complexes at integer indices,
    biwitness bicomplexes at half-integers, matched by grade projection."""
    matcher = _bicomplex_matcher(landmark_stages, witnesses, dm, max_dim, p,
                                 exclude_landmark_witnesses)
    return _run_matcher(matcher, len(landmark_stages), keep_half_integral)


def _bicomplex_matcher(landmark_stages, witnesses, dm, max_dim, p,
                       exclude_landmark_witnesses=False):
    stages = [tuple(sorted(set(s))) for s in landmark_stages]
    if len(stages) < 2:
        raise ValueError("need at least 2 landmark stages")
    witnesses = tuple(sorted(set(witnesses)))
    trunc = min(max_dim, p + 1)
    complexes = [
        weak_witness_complex(dm, witnesses, s, trunc,
                             exclude_landmark_witnesses=exclude_landmark_witnesses)
        for s in stages
    ]
    bridges: dict[int, Bicomplex] = {}

    def bridge_for(j):
        if j not in bridges:
            bridges[j] = biwitness_complex(dm, witnesses, stages[j], stages[j + 1],
                                           p + 1, factor_max_dim=max_dim)
        return bridges[j]

    def chain_into_stage(rep, side):
        return project_chain(rep, side, p)

    return _ProjectionMatcher(complexes, bridge_for, chain_into_stage, p)


def pairwise_compatibility_graph(landmarks, witnesses, dm: DistanceMatrix,
                                 max_dim: int, criterion: dict[int, Barcode | list],
                                 exclude_landmark_witnesses: bool = False):
    """Edges over landmark-set indices whose 2-stage biwitness barcode equals
    the per-dimension criterion exactly (multiset equality)."""
    if len(landmarks) < 2:
        raise ValueError("need at least 2 landmark sets")
    want = {p: tuple(sorted(ivs)) for p, ivs in criterion.items()}
    edges = []
    for i, j in combinations(range(len(landmarks)), 2):
        ok = True
        for p, expected in want.items():
            bc = bicomplex_zigzag([landmarks[i], landmarks[j]], witnesses, dm,
                                  max_dim, p,
                                  exclude_landmark_witnesses=exclude_landmark_witnesses)
            if tuple(sorted(bc.intervals(p))) != expected:
                ok = False
                break
        if ok:
            edges.append((i, j))
    return edges
