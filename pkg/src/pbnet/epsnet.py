"""Finite grids over probability simplices and the hypothesis stream.

The grid with resolution M on the k-simplex is the set of probability
vectors whose entries are multiples of 1/M; it has C(M+k-1, k-1) points
and l1 covering radius at most k/M.  Choosing M = ceil(n*k/eps) makes
the radius at most eps/n: rounding every CPT row of an n-node net onto
the grid moves each local conditional by at most eps/(2n) in TV, which
moves the joint by at most eps/2.  The candidate stream for a DAG is
every assignment of grid points to its CPT rows.

Plain coordinate-wise rounding can leave the simplex; rounding here
floors each coordinate to the grid and hands the leftover grid units to
the largest fractional remainders, which keeps the result a valid
distribution and the l1 error within k/M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InputError
from .model import BayesNet, Cpt, Dag, mixed_radix_decode


@dataclass(frozen=True)
class SimplexGrid:
    """All probability vectors of a given dimension with entries in units of 1/resolution."""

    dimension: int
    resolution: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise InputError("dimension must be >= 1")
        if self.resolution < 1:
            raise InputError("resolution must be >= 1")

    @property
    def size(self) -> int:
        return math.comb(self.resolution + self.dimension - 1, self.dimension - 1)

    @property
    def covering_radius_l1(self) -> float:
        return self.dimension / self.resolution

    def counts(self) -> Iterator[tuple[int, ...]]:
        """Integer compositions of resolution into dimension parts, lex ascending."""
        k, total = self.dimension, self.resolution
        buf = [0] * k

        def rec(j: int, rem: int) -> Iterator[tuple[int, ...]]:
            if j == k - 1:
                buf[j] = rem
                yield tuple(buf)
                return
            for c in range(rem + 1):
                buf[j] = c
                yield from rec(j + 1, rem - c)

        yield from rec(0, total)

    def points(self) -> Iterator[np.ndarray]:
        for c in self.counts():
            yield np.asarray(c, dtype=float) / self.resolution

    def point_array(self) -> np.ndarray:
        """All grid points stacked as a (size, dimension) array."""
        return np.asarray(list(self.counts()), dtype=float) / self.resolution

    def rank(self, counts: Sequence[int]) -> int:
        """Position of a composition in the counts() enumeration order."""
        c = tuple(int(x) for x in counts)
        if len(c) != self.dimension or any(x < 0 for x in c) or sum(c) != self.resolution:
            raise InputError(f"{counts!r} is not a composition of {self.resolution}")
        rank = 0
        rem = self.resolution
        for j in range(self.dimension - 1):
            parts_left = self.dimension - j - 1
            for t in range(c[j]):
                rank += math.comb(rem - t + parts_left - 1, parts_left - 1)
            rem -= c[j]
        return rank

    def snap_counts(self, vec) -> np.ndarray:
        """Nearest-by-rounding composition for a probability vector.

        Floors each scaled coordinate and distributes the remaining grid
        units to the largest fractional remainders (ties to the lowest
        coordinate), so the l1 error is below dimension/resolution.
        """
        v = np.asarray(vec, dtype=float)
        if v.shape != (self.dimension,):
            raise InputError(f"expected a vector of length {self.dimension}")
        if np.any(v < -1e-9) or abs(v.sum() - 1.0) > 1e-6:
            raise InputError("not a probability vector")
        v = np.clip(v, 0.0, None)
        v = v / v.sum()
        scaled = v * self.resolution
        base = np.floor(scaled + 1e-12).astype(np.int64)
        base = np.minimum(base, self.resolution)
        remainders = scaled - base
        deficit = int(self.resolution - base.sum())
        if deficit > 0:
            order = np.argsort(-remainders, kind="stable")
            base[order[:deficit]] += 1
        elif deficit < 0:
            order = np.argsort(remainders, kind="stable")
            taken = 0
            for idx in order:
                while base[idx] > 0 and taken < -deficit:
                    base[idx] -= 1
                    taken += 1
                if taken == -deficit:
                    break
        return base

    def round(self, vec) -> np.ndarray:
        """The grid point nearest by the snapping rule, as a probability vector."""
        return self.snap_counts(vec) / self.resolution


def build_grid(alphabet: int, n: int, eps: float) -> SimplexGrid:
    """Grid fine enough that rounding a row costs at most eps/n in l1.

    Resolution is ceil(n * alphabet / eps), one step finer than the
    plain coordinate step so the simplex-preserving rounding still
    covers.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if n < 1:
        raise InputError("n must be >= 1")
    if alphabet < 1:
        raise InputError("alphabet must be >= 1")
    return SimplexGrid(alphabet, max(1, math.ceil(n * alphabet / eps)))


def grid_size_bound(alphabet: int, n: int, eps: float, p: int) -> int:
    """Bound on candidates per DAG: grid size to the power of the row budget.

    A DAG within parameter budget p has at most p // (alphabet - 1) CPT
    rows in total, and every row independently picks a grid point.
    """
    if alphabet < 2:
        raise InputError("alphabet must be >= 2")
    grid = build_grid(alphabet, n, eps)
    return grid.size ** (p // (alphabet - 1))


def _row_layout(dag: Dag, grid: SimplexGrid) -> list[int]:
    sizes = dag.alphabet_sizes
    if any(k != grid.dimension for k in sizes):
        raise InputError("candidate grids need a uniform alphabet equal to the grid dimension")
    return [math.prod(sizes[p] for p in dag.parents(i)) for i in range(dag.n)]


def candidate_count(dag: Dag, grid: SimplexGrid) -> int:
    """Exact size of the candidate stream for dag: grid.size ** total rows."""
    return grid.size ** sum(_row_layout(dag, grid))


def candidate_nets(dag: Dag, grid: SimplexGrid, start: int = 0) -> Iterator[BayesNet]:
    """Every assignment of grid points to the CPT rows of dag, each once.

    Enumeration is mixed-radix over (variable, row, grid index) with the
    earliest row most significant, so the stream order is deterministic
    and a shard can resume from any start offset.
    """
    row_counts = _row_layout(dag, grid)
    total_rows = sum(row_counts)
    points = grid.point_array()
    g = len(points)
    total = g ** total_rows
    if start < 0:
        raise InputError("start must be >= 0")
    if start >= total:
        return
    digits = list(mixed_radix_decode(start, (g,) * total_rows))
    parents = [dag.parents(i) for i in range(dag.n)]
    offsets = np.cumsum([0] + row_counts)
    while True:
        cpts = []
        for i in range(dag.n):
            chosen = digits[offsets[i]:offsets[i + 1]]
            cpts.append(Cpt(i, parents[i], points[chosen]))
        yield BayesNet(dag, cpts)
        j = total_rows - 1
        while j >= 0:
            digits[j] += 1
            if digits[j] < g:
                break
            digits[j] = 0
            j -= 1
        if j < 0:
            return


def snap_to_grid(net: BayesNet, grid: SimplexGrid) -> BayesNet:
    """Round every CPT row of net onto the grid (the stream's covering witness)."""
    cpts = []
    for i, cpt in enumerate(net.cpts):
        rows = np.stack([grid.round(row) for row in cpt.rows])
        cpts.append(Cpt(i, cpt.parent_order, rows))
    return BayesNet(net.dag, cpts)


def stream_index(net: BayesNet, grid: SimplexGrid) -> int:
    """Offset of a net whose rows are all grid points within candidate_nets order."""
    _row_layout(net.dag, grid)
    g = grid.size
    index = 0
    for cpt in net.cpts:
        for row in cpt.rows:
            scaled = row * grid.resolution
            counts = np.rint(scaled).astype(np.int64)
            if np.abs(scaled - counts).max() > 1e-9 or counts.sum() != grid.resolution:
                raise InputError("net rows are not grid points")
            index = index * g + grid.rank(counts)
    return index
