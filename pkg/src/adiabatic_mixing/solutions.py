"""The degenerate ground manifold: all independent sets of a graph.

Solutions are ordered canonically by (popcount, bitmask), so the empty set
sits at index 0 and the ``n`` singletons at indices ``1..n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError
from .graph import Graph

__all__ = [
    "DEFAULT_MAX_VERTICES",
    "MedianAdjacency",
    "SolutionBasis",
    "basis_csv",
    "count_independent_sets",
    "enumerate_independent_sets",
    "median_adjacency",
    "median_csv",
    "trivial_indices",
]

DEFAULT_MAX_VERTICES = 30


def popcount(masks: np.ndarray) -> np.ndarray:
    masks = np.asarray(masks, dtype=np.int64)
    out = np.zeros(masks.shape, dtype=np.int64)
    x = masks.copy()
    while np.any(x):
        out += x & 1
        x >>= 1
    return out


@dataclass(frozen=True, eq=False)
class SolutionBasis:
    n: int
    masks: np.ndarray  # int64, canonical order
    popcounts: np.ndarray

    @property
    def size(self) -> int:
        return int(self.masks.shape[0])

    def __len__(self):
        return self.size

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {int(s): i for i, s in enumerate(self.masks)}

    @cached_property
    def cardinality_histogram(self) -> np.ndarray:
        """``N_k`` for ``k = 0..n``."""
        return np.bincount(self.popcounts, minlength=self.n + 1)

    @property
    def max_cardinality(self) -> int:
        return int(self.popcounts.max())

    @property
    def solutions(self) -> list[int]:
        return [int(s) for s in self.masks]


@dataclass(frozen=True, eq=False)
class MedianAdjacency:
    """Pairs ``alpha < beta`` whose solutions differ in exactly one vertex."""

    alpha: np.ndarray
    beta: np.ndarray
    flipped: np.ndarray  # vertex that differs

    def __len__(self):
        return int(self.alpha.shape[0])

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.alpha.tolist(), self.beta.tolist()))

    def degrees(self, size: int) -> np.ndarray:
        return np.bincount(self.alpha, minlength=size) + np.bincount(self.beta, minlength=size)


def _canonical(n: int, masks) -> SolutionBasis:
    masks = np.asarray(masks, dtype=np.int64)
    pc = popcount(masks)
    order = np.lexsort((masks, pc))
    return SolutionBasis(n=n, masks=masks[order], popcounts=pc[order])


def enumerate_independent_sets(g: Graph, max_vertices: int = DEFAULT_MAX_VERTICES) -> SolutionBasis:
    """All independent sets of ``g`` in canonical order.

    Backtracking that extends the current set only by higher-numbered
    vertices outside its neighbourhood, so each node of the search tree is
    one solution.
    """
    if g.n > max_vertices:
        raise CapacityError(f"n={g.n} exceeds enumeration limit {max_vertices}")
    nbr = g.neighbor_masks
    n = g.n
    out: list[int] = []
    append = out.append
    # (current set, candidate vertices) stack
    stack = [(0, (1 << n) - 1)]
    while stack:
        cur, avail = stack.pop()
        append(cur)
        while avail:
            low = avail & -avail
            v = low.bit_length() - 1
            avail ^= low
            stack.append((cur | low, avail & ~nbr[v]))
    return _canonical(n, out)


def count_independent_sets(g: Graph) -> int:
    """Exact number of independent sets, without materialising them.

    Branches on a max-degree vertex of the remaining candidate set with
    memoisation; isolated candidates contribute a factor of 2 each.
    """
    nbr = g.neighbor_masks
    memo: dict[int, int] = {}

    def count(avail: int) -> int:
        if avail == 0:
            return 1
        key = avail
        hit = memo.get(key)
        if hit is not None:
            return hit
        factor = 1
        best, best_deg = -1, -1
        rest = avail
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            d = (nbr[v] & avail).bit_count()
            if d == 0:
                factor *= 2
                avail ^= low
            elif d > best_deg:
                best, best_deg = v, d
        if best < 0:
            result = factor
        else:
            without = avail & ~(1 << best)
            result = factor * (count(without) + count(without & ~nbr[best]))
        memo[key] = result
        return result

    return count((1 << g.n) - 1)


def median_adjacency(b: SolutionBasis) -> MedianAdjacency:
    """Single-vertex-difference pairs of the basis.

    Uses downward closure: every neighbour pair is some solution together
    with that solution minus one of its vertices, found by lookup.
    """
    masks = b.masks
    by_value = np.argsort(masks, kind="stable")
    sorted_masks = masks[by_value]
    alphas, betas, flips = [], [], []
    for j in range(b.n):
        bit = np.int64(1) << j
        hi = np.nonzero(masks & bit)[0]
        if hi.size == 0:
            continue
        lower = masks[hi] ^ bit
        pos = np.searchsorted(sorted_masks, lower)
        if np.any(pos >= sorted_masks.size) or np.any(sorted_masks[np.minimum(pos, sorted_masks.size - 1)] != lower):
            raise ValueError("basis is not downward closed")
        lo = by_value[pos]
        alphas.append(lo)
        betas.append(hi)
        flips.append(np.full(hi.size, j, dtype=np.int64))
    if not alphas:
        empty = np.zeros(0, dtype=np.int64)
        return MedianAdjacency(empty, empty.copy(), empty.copy())
    a = np.concatenate(alphas).astype(np.int64)
    bb = np.concatenate(betas).astype(np.int64)
    f = np.concatenate(flips)
    # canonical order puts the smaller set first, so a < bb always holds
    order = np.lexsort((bb, a))
    return MedianAdjacency(a[order], bb[order], f[order])


def trivial_indices(b: SolutionBasis) -> np.ndarray:
    """Indices of the empty set and the singletons (always ``0..n``)."""
    return np.nonzero(b.popcounts <= 1)[0]


def basis_csv(b: SolutionBasis) -> str:
    rows = ["index,bitmask,popcount"]
    rows += [f"{i},{int(s)},{int(k)}" for i, (s, k) in enumerate(zip(b.masks, b.popcounts))]
    return "\n".join(rows) + "\n"


def median_csv(adj: MedianAdjacency) -> str:
    rows = ["alpha,beta"]
    rows += [f"{a},{c}" for a, c in adj.pairs]
    return "\n".join(rows) + "\n"
