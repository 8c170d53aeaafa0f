"""Z/2 homology engine: bitset boundary matrices, bases, and persistence.

Columns are Python ints used as bitsets over the lexicographic cell order of
a complex, which keeps reductions deterministic and fast without extra
dependencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .complexes import ChainZ2, SimplicialComplex, boundary, chain_boundary


@dataclass
class HomologyBasis:
    """Independent cycle representatives spanning H_p of one complex."""

    dimension: int
    representatives: list[ChainZ2]

    @property
    def rank(self) -> int:
        return len(self.representatives)


@dataclass
class PersistenceIntervals:
    """Per-dimension multiset of [birth, death) pairs; death may be inf.

    Zero-length intervals are retained internally and filtered from reports.
    """

    intervals: dict[int, list[tuple[float, float]]] = field(default_factory=dict)

    def reported(self, p: int) -> list[tuple[float, float]]:
        return sorted(iv for iv in self.intervals.get(p, []) if iv[0] < iv[1])

    def all_intervals(self, p: int) -> list[tuple[float, float]]:
        return sorted(self.intervals.get(p, []))


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class _Echelon:
    """A set of bitset columns in column-echelon form (distinct top bits)."""

    def __init__(self):
        self.cols: dict[int, int] = {}  # top bit -> column

    def insert(self, col: int) -> int:
        """Reduce col against the basis; insert the residual if nonzero.

        Returns the residual (0 when col was already in the span).
        """
        while col:
            top = col.bit_length() - 1
            other = self.cols.get(top)
            if other is None:
                self.cols[top] = col
                return col
            col ^= other
        return 0

    def normal_form(self, col: int) -> int:
        """Canonical representative of col modulo the span (full reduction)."""
        out = 0
        while col:
            top = col.bit_length() - 1
            other = self.cols.get(top)
            if other is None:
                out |= 1 << top
                col ^= 1 << top
            else:
                col ^= other
        return out

    @property
    def rank(self) -> int:
        return len(self.cols)


class HomologyEngine:
    """Caches boundary matrices, image/cycle bases, and H_p data per complex."""

    def __init__(self, complex_: SimplicialComplex):
        self.complex = complex_
        self._index: dict[int, dict] = {}
        self._image: dict[int, _Echelon] = {}
        self._kernel: dict[int, list[int]] = {}
        self._hom: dict[int, tuple[list[int], _Echelon]] = {}

    def cell_index(self, p: int) -> dict:
        if p not in self._index:
            self._index[p] = {c: i for i, c in enumerate(self.complex.cells(p))}
        return self._index[p]

    def encode(self, chain: ChainZ2, p: int) -> int:
        idx = self.cell_index(p)
        bits = 0
        for cell in chain:
            try:
                bits |= 1 << idx[cell]
            except KeyError:
                raise ValueError(f"chain cell {cell} is not a {p}-cell of the complex")
        return bits

    def decode(self, bits: int, p: int) -> ChainZ2:
        cells = self.complex.cells(p)
        return frozenset(cells[i] for i in _iter_bits(bits))

    def boundary_columns(self, p: int) -> list[int]:
        """Columns of the boundary map from p-cells to (p-1)-cells."""
        idx = self.cell_index(p - 1)
        cols = []
        for cell in self.complex.cells(p):
            bits = 0
            for f in boundary(cell):
                bits ^= 1 << idx[f]
            cols.append(bits)
        return cols

    def image_basis(self, p: int) -> _Echelon:
        """Echelon basis of the boundary image inside the (p-1)-chain space."""
        if p not in self._image:
            ech = _Echelon()
            if self.complex.num_cells(p):
                for col in self.boundary_columns(p):
                    ech.insert(col)
            self._image[p] = ech
        return self._image[p]

    def kernel_basis(self, p: int) -> list[int]:
        """Bitset basis of the p-cycle space."""
        if p not in self._kernel:
            n = self.complex.num_cells(p)
            if p == 0:
                self._kernel[p] = [1 << i for i in range(n)]
            else:
                kernel = []
                cols = self.boundary_columns(p)
                # reduce columns while tracking the combination that formed them
                lookup: dict[int, int] = {}  # top bit -> position in stored lists
                stored_cols: list[int] = []
                stored_combos: list[int] = []
                for j in range(n):
                    col, cmb = cols[j], 1 << j
                    while col:
                        top = col.bit_length() - 1
                        pos = lookup.get(top)
                        if pos is None:
                            lookup[top] = len(stored_cols)
                            stored_cols.append(col)
                            stored_combos.append(cmb)
                            break
                        col ^= stored_cols[pos]
                        cmb ^= stored_combos[pos]
                    else:
                        kernel.append(cmb)
                self._kernel[p] = kernel
        return self._kernel[p]

    def homology_data(self, p: int) -> tuple[list[int], _Echelon]:
        """Chosen H_p representatives (bitsets) plus their echelon extension."""
        if p not in self._hom:
            image = self.image_basis(p + 1)
            reps = []
            chosen = _Echelon()
            chosen.cols.update(image.cols)
            for z in self.kernel_basis(p):
                residual = chosen.insert(image.normal_form(z))
                if residual:
                    reps.append(residual)
            self._hom[p] = (reps, chosen)
        return self._hom[p]

    def rank(self, p: int) -> int:
        return len(self.homology_data(p)[0])

    def normal_form(self, chain: ChainZ2, p: int) -> int:
        """Canonical form of a chain modulo boundaries; equal forms <=> homologous."""
        return self.image_basis(p + 1).normal_form(self.encode(chain, p))

    def class_vector(self, chain: ChainZ2, p: int) -> tuple[int, ...]:
        """Coordinates of a cycle's class in the chosen H_p basis."""
        reps, _ = self.homology_data(p)
        by_top = {rep.bit_length() - 1: i for i, rep in enumerate(reps)}
        residual = self.normal_form(chain, p)
        used = set()
        while residual:
            i = by_top.get(residual.bit_length() - 1)
            if i is None:
                raise ValueError("chain is not a cycle of the complex")
            residual ^= reps[i]
            used.symmetric_difference_update((i,))
        return tuple(sorted(used))


def engine(complex_: SimplicialComplex) -> HomologyEngine:
    eng = getattr(complex_, "_homology_engine", None)
    if eng is None:
        eng = HomologyEngine(complex_)
        complex_._homology_engine = eng
    return eng


def homology_basis(complex_: SimplicialComplex, p: int) -> HomologyBasis:
    """Cycle representatives spanning H_p over Z/2, deterministic for a complex."""
    if p < 0:
        raise ValueError("dimension must be >= 0")
    eng = engine(complex_)
    reps, _ = eng.homology_data(p)
    return HomologyBasis(p, [eng.decode(r, p) for r in reps])


def betti_numbers(complex_: SimplicialComplex, max_dim: int) -> tuple[int, ...]:
    eng = engine(complex_)
    return tuple(eng.rank(p) for p in range(max_dim + 1))


def is_boundary(chain: ChainZ2, complex_: SimplicialComplex, p: int) -> bool:
    """True iff the p-cycle `chain` bounds in the complex."""
    if chain and chain_boundary(chain):
        raise ValueError("chain is not a cycle")
    if not chain:
        return True
    return engine(complex_).normal_form(chain, p) == 0


def classes_equal(a: ChainZ2, b: ChainZ2, complex_: SimplicialComplex, p: int) -> bool:
    """True iff two p-cycles differ by a boundary."""
    return is_boundary(frozenset(a) ^ frozenset(b), complex_, p)


def persistent_homology(filtered) -> PersistenceIntervals:
    """Standard persistence pairing of a filtered complex.

    `filtered` is a sequence of (cell, value) with face values never exceeding
    coface values. Intervals are [birth, death) with death = inf when unpaired.
    """
    value_of = {cell: val for cell, val in filtered}
    for cell, val in filtered:
        for f in boundary(cell):
            if f not in value_of:
                raise ValueError(f"face {f} of {cell} missing from filtration")
            if value_of[f] > val:
                raise ValueError("filtration is not monotone")
    order = sorted(range(len(filtered)),
                   key=lambda i: (filtered[i][1], len(filtered[i][0]), filtered[i][0]))
    pos = {filtered[i][0]: r for r, i in enumerate(order)}
    cells = [filtered[i][0] for i in order]
    values = [filtered[i][1] for i in order]

    low_to_col: dict[int, int] = {}
    columns: dict[int, int] = {}
    pair_of: dict[int, int] = {}
    for j, cell in enumerate(cells):
        col = 0
        for f in boundary(cell):
            col ^= 1 << pos[f]
        while col:
            low = col.bit_length() - 1
            other = low_to_col.get(low)
            if other is None:
                break
            col ^= columns[other]
        if col:
            low = col.bit_length() - 1
            low_to_col[low] = j
            columns[j] = col
            pair_of[low] = j

    result: dict[int, list[tuple[float, float]]] = {}
    for j, cell in enumerate(cells):
        if j in columns:
            continue  # j creates a cycle
        death_col = pair_of.get(j)
        death = values[death_col] if death_col is not None else math.inf
        result.setdefault(len(cell) - 1, []).append((values[j], death))
    return PersistenceIntervals(result)
