"""Problem instances: simple undirected graphs on vertices ``0..n-1``.

Vertex sets are plain Python ints used as bitmasks (bit ``j`` set means
vertex ``j`` is in the set, i.e. ``x_j = 1``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import GraphParseError

__all__ = [
    "Graph",
    "edge_index_to_pair",
    "floyd_sample",
    "generate_random_graph",
    "is_independent",
    "make_rng",
    "mask_from_vertices",
    "parse_graph",
    "read_graph",
    "serialize_graph",
    "vertices_of",
    "write_graph",
]


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph. Edges are stored canonically: ``u < v``, sorted."""

    n: int
    edges: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        canon = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        """Bitmask of the neighbourhood of each vertex."""
        nbr = [0] * self.n
        for u, v in self.edges:
            nbr[u] |= 1 << v
            nbr[v] |= 1 << u
        return tuple(nbr)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(x.bit_count() for x in self.neighbor_masks)

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def __str__(self):
        return f"Graph(n={self.n}, m={self.m})"


def mask_from_vertices(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << int(v)
    return mask


def vertices_of(mask: int) -> list[int]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def is_independent(g: Graph, s: int) -> bool:
    """True iff no edge of ``g`` has both endpoints in the vertex set ``s``."""
    nbr = g.neighbor_masks
    rest = s
    j = 0
    while rest:
        if rest & 1 and nbr[j] & s:
            return False
        rest >>= 1
        j += 1
    return True


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded from a non-negative 64-bit integer."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def floyd_sample(population: int, k: int, rng: np.random.Generator) -> list[int]:
    """Uniform random ``k``-subset of ``range(population)`` (Floyd's algorithm).

    Returned sorted. Uses exactly ``k`` draws and no rejection.
    """
    if not 0 <= k <= population:
        raise ValueError(f"cannot sample {k} items from {population}")
    chosen: set[int] = set()
    for j in range(population - k, population):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def edge_index_to_pair(index: int, n: int) -> tuple[int, int]:
    """Map ``0..n(n-1)/2-1`` to pairs ``u < v`` in row-major upper-triangular order."""
    total = n * (n - 1) // 2
    if not 0 <= index < total:
        raise ValueError(f"edge index {index} out of range for n={n}")
    u = 0
    row = n - 1
    while index >= row:
        index -= row
        u += 1
        row -= 1
    return u, u + 1 + index


def generate_random_graph(n: int, m: int, seed: int) -> Graph:
    """Uniformly random graph with ``n`` vertices and exactly ``m`` edges.

    Deterministic in ``(n, m, seed)``.
    """
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise ValueError(f"edge count m={m} outside [0, {total}] for n={n}")
    picks = floyd_sample(total, m, make_rng(seed))
    return Graph(n, tuple(edge_index_to_pair(i, n) for i in picks))


def serialize_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int, count: int) -> list[int]:
    parts = line.split()
    if len(parts) != count:
        raise GraphParseError(f"expected {count} integers, got {line!r}", lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise GraphParseError(f"non-integer token in {line!r}", lineno) from None


def parse_graph(text: str) -> Graph:
    """Parse the ``n m`` header + ``u v`` edge-list format.

    Blank lines and ``#`` comments are skipped. Edges may appear in any
    order or orientation; the result is canonical.
    """
    header = None
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            n, m = _ints(line, lineno, 2)
            if n < 1:
                raise GraphParseError(f"vertex count must be >= 1, got {n}", lineno)
            if not 0 <= m <= n * (n - 1) // 2:
                raise GraphParseError(f"edge count {m} impossible for n={n}", lineno)
            header = (n, m)
            continue
        u, v = _ints(line, lineno, 2)
        n = header[0]
        if u == v:
            raise GraphParseError(f"self-loop at vertex {u}", lineno)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"vertex index out of range [0, {n})", lineno)
        e = (min(u, v), max(u, v))
        if e in seen:
            raise GraphParseError(f"duplicate edge {e}", lineno)
        seen.add(e)
    if header is None:
        raise GraphParseError("missing 'n m' header")
    if len(seen) != header[1]:
        raise GraphParseError(f"header declares {header[1]} edges, found {len(seen)}")
    return Graph(header[0], tuple(seen))


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_graph(g))
