"""Classical baselines: the all-negated 2-SAT encoding and its solvers.

A literal is ``(var, negated)``. In the implication graph literal
``(v, False)`` is node ``2v`` and ``(v, True)`` is node ``2v + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import Graph, make_rng, mask_from_vertices

__all__ = [
    "ClauseSet",
    "find_nontrivial_classical",
    "graph_to_clauses",
    "parse_dimacs",
    "random_pair_baseline",
    "random_pick_baseline",
    "solve_2sat",
    "to_dimacs",
]

Literal = tuple[int, bool]


@dataclass(frozen=True)
class ClauseSet:
    n: int
    clauses: tuple[tuple[Literal, Literal], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if len(clause) != 2:
                raise ValueError(f"clause {clause} does not have exactly 2 literals")
            for var, _ in clause:
                if not 0 <= var < self.n:
                    raise ValueError(f"variable {var} out of range for n={self.n}")

    def satisfied_by(self, assignment) -> bool:
        return all(any(bool(assignment[v]) != neg for v, neg in c) for c in self.clauses)


def graph_to_clauses(g: Graph) -> ClauseSet:
    """One clause ``(not x_u or not x_v)`` per edge."""
    return ClauseSet(g.n, tuple(((u, True), (v, True)) for u, v in g.edges))


def _node(var: int, negated: bool) -> int:
    return 2 * var + int(negated)


def _tarjan(num_nodes: int, succ: list[list[int]]) -> list[int]:
    """Component id per node; ids are in reverse topological order of the condensation."""
    index = [-1] * num_nodes
    low = [0] * num_nodes
    comp = [-1] * num_nodes
    on_stack = [False] * num_nodes
    stack: list[int] = []
    counter = 0
    n_comp = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = n_comp
                    if w == v:
                        break
                n_comp += 1
    return comp


def solve_2sat(c: ClauseSet, forced: Mapping[int, bool] | None = None) -> list[bool] | None:
    """Satisfying assignment consistent with ``forced``, or None if unsatisfiable.

    Linear-time implication-graph method: each clause ``(a or b)`` adds
    ``not a -> b`` and ``not b -> a``; forcing literal ``l`` adds
    ``not l -> l``. Unsatisfiable iff some ``x`` and ``not x`` share a
    strongly connected component.
    """
    size = 2 * c.n
    succ: list[list[int]] = [[] for _ in range(size)]
    for (va, na), (vb, nb) in c.clauses:
        a, b = _node(va, na), _node(vb, nb)
        succ[a ^ 1].append(b)
        succ[b ^ 1].append(a)
    for var, value in (forced or {}).items():
        if not 0 <= var < c.n:
            raise ValueError(f"forced variable {var} out of range for n={c.n}")
        lit = _node(var, not value)
        succ[lit ^ 1].append(lit)
    comp = _tarjan(size, succ)
    assignment = []
    for v in range(c.n):
        pos, neg = comp[2 * v], comp[2 * v + 1]
        if pos == neg:
            return None
        # Tarjan numbers sinks first: pick the literal later in topological order
        assignment.append(pos < neg)
    return assignment


def find_nontrivial_classical(g: Graph, method: str = "scan") -> int | None:
    """Independent set with at least two vertices, or None iff ``g`` is complete.

    Candidate pairs are tried lowest-degree vertex first. ``method="scan"``
    looks for a non-edge directly (the all-negated fast path); ``"2sat"``
    forces each pair true and calls :func:`solve_2sat`.
    """
    if method not in ("scan", "2sat"):
        raise ValueError(f"unknown method {method!r}")
    order = sorted(range(g.n), key=lambda v: (g.degrees[v], v))
    nbr = g.neighbor_masks
    clauses = graph_to_clauses(g) if method == "2sat" else None
    for i, u in enumerate(order):
        for v in order[i + 1:]:
            if method == "scan":
                if not nbr[u] >> v & 1:
                    return mask_from_vertices((u, v))
                continue
            sol = solve_2sat(clauses, {u: True, v: True})
            if sol is not None:
                return mask_from_vertices(j for j, x in enumerate(sol) if x)
    return None


def random_pick_baseline(g: Graph, k: int, trials: int, seed: int) -> float:
    """Fraction of uniformly random ``k``-vertex picks that are not independent."""
    if not 2 <= k <= g.n:
        raise ValueError(f"pick size must lie in [2, n], got {k}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = make_rng(seed)
    adj = np.zeros((g.n, g.n), dtype=bool)
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = True
    picks = np.argsort(rng.random((trials, g.n)), axis=1)[:, :k]
    bad = np.zeros(trials, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            bad |= adj[picks[:, i], picks[:, j]]
    return float(bad.mean())


def random_pair_baseline(g: Graph, trials: int, seed: int) -> float:
    """Empirical failure rate of setting two random variables to 1.

    The exact rate is ``m / C(n, 2) = 2m / (n(n-1))``.
    """
    return random_pick_baseline(g, 2, trials, seed)


def to_dimacs(c: ClauseSet) -> str:
    lines = [f"p cnf {c.n} {len(c.clauses)}"]
    for clause in c.clauses:
        lits = [str(-(v + 1) if neg else v + 1) for v, neg in clause]
        lines.append(" ".join(lits) + " 0")
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> ClauseSet:
    n = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"line {lineno}: bad problem line {line!r}")
            n = int(parts[2])
            continue
        if n is None:
            raise ValueError(f"line {lineno}: clause before problem line")
        for tok in line.split():
            lit = int(tok)
            if lit != 0:
                pending.append(lit)
                continue
            if len(pending) != 2:
                raise ValueError(f"line {lineno}: clause has {len(pending)} literals, expected 2")
            clauses.append(tuple((abs(x) - 1, x < 0) for x in pending))
            pending = []
    if n is None:
        raise ValueError("missing problem line")
    if pending:
        raise ValueError("unterminated clause at end of input")
    return ClauseSet(n, tuple(clauses))
