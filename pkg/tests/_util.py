"""Shared helpers for the test-suite."""

import random

from modmax.graph import Graph, erdos_renyi


def random_graph(seed, n_max=8, isolated=True):
    """Small ER graph with a seeded size and density; may contain isolated nodes."""
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    total = n * (n - 1) // 2
    m = rng.randint(1, total)
    g = erdos_renyi(n, m, rng.randrange(10**6))
    if not isolated and min(g.degrees) == 0:
        keep = [e for e in g.edges]
        return Graph.from_edges(n, keep + [(v, (v + 1) % n) for v in range(n) if g.degrees[v] == 0])
    return g


def two_triangles():
    return Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
