"""Clique-partitioning integer program for modularity.

Variables are node pairs ``i < j``; ``x_ij = 0`` means same community.  The
objective (scaled by ``4 m^2 q``) is ``sum_i b_ii + sum_{i<j} 2 b_ij (1 - x_ij)``.
Consistency rows have the form ``x_ik + x_jk >= x_ij``: FULL mode keeps every
``k``, REDUCED mode only ``k`` in a separating set ``K(i, j)``.

Internally the search works with ``y = 1 - x`` so a row reads
``y_ik + y_jk - y_ij <= 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..graph import GAMMA_ONE, GraphError, modularity_numerator, modularity_scale
from ..partition import canonicalize


class Mode(str, enum.Enum):
    FULL = "full"
    REDUCED = "reduced"


class FormulationError(RuntimeError):
    """An extracted partition scored below the model objective at a feasible point."""


class InfeasibleError(ValueError):
    pass


def pair_index(i, j, n):
    if i > j:
        i, j = j, i
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True, eq=False)
class IPModel:
    graph: object
    params: object
    mode: Mode
    pairs: tuple
    weights: tuple  # 2 * b_ij per pair, as Python ints
    constant: int  # sum_i b_ii
    scale: int
    separators: dict = field(default_factory=dict)
    isolated: tuple = ()

    @property
    def n(self):
        return self.graph.n

    @property
    def num_vars(self):
        return len(self.pairs)

    def var(self, i, j):
        return pair_index(i, j, self.graph.n)

    def constraint_count(self):
        n = self.graph.n
        if self.mode is Mode.FULL:
            return 3 * (n * (n - 1) * (n - 2) // 6)
        return sum(len(ks) for ks in self.separators.values())

    def constraints(self):
        """Yield ``(i, j, k)``: the row ``x_ik + x_jk >= x_ij`` with ``i < j``."""
        n = self.graph.n
        if self.mode is Mode.FULL:
            for i in range(n):
                for j in range(i + 1, n):
                    for k in range(n):
                        if k != i and k != j:
                            yield i, j, k
        else:
            for (i, j), ks in sorted(self.separators.items()):
                for k in ks:
                    yield i, j, k

    def row_arrays(self):
        """Constraint rows as index arrays ``(target, left, right)`` over y-variables."""
        n = self.graph.n
        rows = [(pair_index(i, j, n), pair_index(i, k, n), pair_index(j, k, n))
                for i, j, k in self.constraints()]
        if not rows:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, empty
        arr = np.asarray(rows, dtype=np.int64)
        return arr[:, 0], arr[:, 1], arr[:, 2]

    def objective(self, x):
        """Scaled objective numerator at a 0/1 vector ``x`` (indexed like ``pairs``)."""
        total = self.constant
        for w, xv in zip(self.weights, x):
            if not xv:
                total += w
        return total

    def x_of(self, membership):
        membership = getattr(membership, "membership", membership)
        return [0 if membership[i] == membership[j] else 1 for i, j in self.pairs]

    def is_feasible(self, x):
        n = self.graph.n
        for i, j, k in self.constraints():
            if x[pair_index(i, k, n)] + x[pair_index(j, k, n)] < x[pair_index(i, j, n)]:
                return False
        return True


def separator(g, i, j):
    """Smaller of the open neighbourhoods ``N(i) - {j}`` and ``N(j) - {i}``."""
    a = tuple(k for k in g.adj[i] if k != j)
    b = tuple(k for k in g.adj[j] if k != i)
    return a if len(a) <= len(b) else b


def build_model(g, params=GAMMA_ONE, mode=Mode.REDUCED):
    mode = Mode(mode)
    if g.m == 0:
        raise GraphError("cannot build a modularity model for a graph without edges")
    n = g.n
    twomq = 2 * g.m * params.q
    p = params.p
    deg = g.degrees
    pairs = []
    weights = []
    for i in range(n):
        for j in range(i + 1, n):
            a = 1 if g.has_edge(i, j) else 0
            pairs.append((i, j))
            weights.append(2 * (twomq * a - p * deg[i] * deg[j]))
    constant = -p * sum(d * d for d in deg)
    seps = {}
    if mode is Mode.REDUCED:
        for i, j in pairs:
            ks = separator(g, i, j)
            if ks:
                seps[(i, j)] = ks
    isolated = tuple(v for v in range(n) if deg[v] == 0)
    return IPModel(g, params, mode, tuple(pairs), tuple(weights), constant,
                   modularity_scale(g, params), seps, isolated)


class _DSU:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb


def components_of(model, x):
    """Communities from zero-valued pairs.

    FULL links every pair with ``x_ij = 0``.  REDUCED links only graph edges
    with ``x_ij = 0``: along such a path the separator rows force every pair to
    zero, which keeps the extracted modularity at or above the objective.
    """
    n = model.graph.n
    dsu = _DSU(n)
    if model.mode is Mode.FULL:
        for (i, j), xv in zip(model.pairs, x):
            if not xv:
                dsu.union(i, j)
    else:
        for i, j in model.graph.edges:
            if not x[pair_index(i, j, n)]:
                dsu.union(i, j)
    return canonicalize([dsu.find(v) for v in range(n)])


def extract_partition(model, x, check=True):
    """Partition encoded by a feasible 0/1 vector."""
    x = [int(round(v)) for v in x]
    if len(x) != model.num_vars:
        raise InfeasibleError(f"expected {model.num_vars} variables, got {len(x)}")
    if check and not model.is_feasible(x):
        raise InfeasibleError("vector violates the model's consistency rows")
    part = components_of(model, x)
    if check:
        q = modularity_numerator(model.graph, part.membership, model.params)
        if q < model.objective(x):
            raise FormulationError(
                f"extracted partition scores {q} below the objective {model.objective(x)}")
    return part
