import itertools

import numpy as np
import pytest

from adiabatic_mixing.graph import Graph

ACCEPTANCE_LINES: list[str] = []


def brute_force_independent_sets(g: Graph) -> list[int]:
    """Every subset of the vertices checked against every edge."""
    out = []
    for mask in range(1 << g.n):
        if all(not (mask >> u & 1 and mask >> v & 1) for u, v in g.edges):
            out.append(mask)
    return out


def brute_force_pairs(masks) -> set[tuple[int, int]]:
    """All single-element-difference pairs by scanning every pair."""
    pairs = set()
    for a, b in itertools.combinations(masks, 2):
        if bin(a ^ b).count("1") == 1:
            pairs.add((min(a, b), max(a, b)))
    return pairs


@pytest.fixture
def p3():
    return Graph(3, ((0, 1), (1, 2)))


@pytest.fixture
def k2():
    return Graph(2, ((0, 1),))


@pytest.fixture
def k3():
    return Graph(3, ((0, 1), (0, 2), (1, 2)))


@pytest.fixture
def acceptance_report():
    def report(number, name, passed, detail=""):
        status = "PASS" if passed else "FAIL"
        ACCEPTANCE_LINES.append(f"[criterion {number:>2}] {status}  {name}  {detail}")
    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_graph_np(rng: np.random.Generator, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph(n, tuple(edges))
