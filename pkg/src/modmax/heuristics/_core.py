"""Shared machinery for the heuristics: exact-gain weighted graphs and node moves.

Every gain is an integer at the graph's modularity scale ``4 m^2 q``.  For a
node ``v`` with volume ``D_v`` leaving community ``A`` (``v`` removed) for
``B`` the change is ``2 [2mq (w_vB - w_vA) - p D_v (D_B - D_A)]``; aggregated
nodes carry integer edge weights and self-loop weights so the formula holds at
every level.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..graph import GAMMA_ONE, GraphError, ModularityValue, modularity_numerator, modularity_scale
from ..partition import Partition, canonicalize


@dataclass(frozen=True)
class HeuristicConfig:
    seed: int = 0
    max_passes: int = 1000
    cnm_tie_break: str = "smallest_pair"
    leiden_theta: float = 0.01
    paris_cut: str = "best_q"  # "best_q" or "k"
    paris_k: int | None = None
    trace: bool = False


@dataclass
class HeuristicResult:
    algorithm: str
    partition: Partition
    q: ModularityValue
    dendrogram: object = None
    trace: list = field(default_factory=list)

    @property
    def k(self):
        return self.partition.k


class WGraph:
    """Integer-weighted graph with self-loop weights and node volumes."""

    def __init__(self, nbrs, loops, vol, twomq, p):
        self.nbrs = nbrs  # list of {neighbour: weight}, no self entries
        self.loops = loops  # a_vv, i.e. twice the internal edge count
        self.vol = vol  # degree sum of the original nodes inside
        self.twomq = twomq
        self.p = p

    @property
    def size(self):
        return len(self.vol)

    @classmethod
    def from_graph(cls, g, params=GAMMA_ONE):
        nbrs = [{u: 1 for u in g.adj[v]} for v in range(g.n)]
        return cls(nbrs, [0] * g.n, list(g.degrees), 2 * g.m * params.q, params.p)

    def aggregate(self, comm):
        """Quotient graph by ``comm`` (labels ``0..K-1``)."""
        k = max(comm) + 1 if comm else 0
        nbrs = [dict() for _ in range(k)]
        loops = [0] * k
        vol = [0] * k
        for v in range(self.size):
            cv = comm[v]
            vol[cv] += self.vol[v]
            loops[cv] += self.loops[v]
            row = nbrs[cv]
            for u, w in self.nbrs[v].items():
                cu = comm[u]
                if cu == cv:
                    loops[cv] += w
                else:
                    row[cu] = row.get(cu, 0) + w
        return WGraph(nbrs, loops, vol, self.twomq, self.p)

    def numerator(self, comm):
        internal = {}
        volume = {}
        for v in range(self.size):
            c = comm[v]
            volume[c] = volume.get(c, 0) + self.vol[v]
            internal[c] = internal.get(c, 0) + self.loops[v]
            for u, w in self.nbrs[v].items():
                if comm[u] == c:
                    internal[c] += w
        return sum(self.twomq * internal[c] - self.p * volume[c] ** 2 for c in volume)

    def links(self, v, comm):
        """Edge weight from ``v`` into each neighbouring community."""
        out = {}
        for u, w in self.nbrs[v].items():
            c = comm[u]
            out[c] = out.get(c, 0) + w
        return out

    def move_gain(self, v, w_from, vol_from, w_to, vol_to):
        """Gain of moving ``v``; ``*_from`` describe its community without ``v``."""
        return 2 * (self.twomq * (w_to - w_from) - self.p * self.vol[v] * (vol_to - vol_from))


class Communities:
    """Membership plus per-community volume for a :class:`WGraph`."""

    def __init__(self, wg, comm):
        self.wg = wg
        self.comm = list(comm)
        self.cvol = {}
        self.count = {}
        for v, c in enumerate(self.comm):
            self.cvol[c] = self.cvol.get(c, 0) + wg.vol[v]
            self.count[c] = self.count.get(c, 0) + 1
        self._next = max(self.comm) + 1 if self.comm else 0

    def fresh(self):
        while self._next in self.count:
            self._next += 1
        return self._next

    def best_move(self, v):
        """Best strictly improving target for ``v`` or ``None``.

        Candidates are neighbouring communities and an empty one.  Ties go to
        the smallest label; the empty community loses ties.
        """
        wg = self.wg
        cur = self.comm[v]
        links = wg.links(v, self.comm)
        w_from = links.get(cur, 0)
        vol_from = self.cvol[cur] - wg.vol[v]
        best_gain = 0
        best_c = None
        for c in sorted(links):
            if c == cur:
                continue
            g = wg.move_gain(v, w_from, vol_from, links[c], self.cvol[c])
            if g > best_gain:
                best_gain, best_c = g, c
        if self.count[cur] > 1:
            g = wg.move_gain(v, w_from, vol_from, 0, 0)
            if g > best_gain:
                best_gain, best_c = g, "new"
        if best_c is None:
            return None
        if best_c == "new":
            best_c = self.fresh()
        return best_c, best_gain

    def move(self, v, c):
        cur = self.comm[v]
        vol = self.wg.vol[v]
        self.cvol[cur] -= vol
        self.count[cur] -= 1
        if self.count[cur] == 0:
            del self.count[cur]
            del self.cvol[cur]
        self.comm[v] = c
        self.cvol[c] = self.cvol.get(c, 0) + vol
        self.count[c] = self.count.get(c, 0) + 1

    def relabelled(self):
        return canonicalize(self.comm).membership


def move_until_stable(wg, comm, rng, trace=None, max_sweeps=10_000):
    """Louvain-style sweeps in one seeded order until a sweep moves nothing.

    Returns ``(membership, moved_any)``.
    """
    cs = Communities(wg, comm)
    order = list(range(wg.size))
    rng.shuffle(order)
    moved_any = False
    for _ in range(max_sweeps):
        moved = False
        for v in order:
            mv = cs.best_move(v)
            if mv is None:
                continue
            c, gain = mv
            if trace is not None:
                trace.append(f"move node={v} from={cs.comm[v]} to={c} gain={gain}")
            cs.move(v, c)
            moved = True
        if not moved:
            break
        moved_any = True
    return cs.comm, moved_any


def queue_move(wg, comm, rng, trace=None):
    """Queue-driven local moving: only neighbours of moved nodes are revisited."""
    from collections import deque

    cs = Communities(wg, comm)
    order = list(range(wg.size))
    rng.shuffle(order)
    queue = deque(order)
    queued = [True] * wg.size
    moved_any = False
    while queue:
        v = queue.popleft()
        queued[v] = False
        mv = cs.best_move(v)
        if mv is None:
            continue
        c, gain = mv
        if trace is not None:
            trace.append(f"move node={v} from={cs.comm[v]} to={c} gain={gain}")
        cs.move(v, c)
        moved_any = True
        for u in sorted(wg.nbrs[v]):
            if not queued[u] and cs.comm[u] != c:
                queued[u] = True
                queue.append(u)
    return cs.comm, moved_any


def is_node_optimal(g, membership, params=GAMMA_ONE):
    """True when no single node move (to a neighbour community or alone) raises Q."""
    wg = WGraph.from_graph(g, params)
    cs = Communities(wg, canonicalize(membership).membership)
    return all(cs.best_move(v) is None for v in range(g.n))


def split_disconnected(g, membership):
    """Split every community into its connected components; returns (membership, changed)."""
    memb = list(membership)
    labels = {}
    out = [None] * g.n
    changed = False
    seen_comm = {}
    for s in range(g.n):
        if out[s] is not None:
            continue
        c = memb[s]
        lab = len(labels)
        labels[lab] = c
        if c in seen_comm:
            changed = True
        seen_comm[c] = True
        out[s] = lab
        stack = [s]
        while stack:
            v = stack.pop()
            for u in g.adj[v]:
                if out[u] is None and memb[u] == c:
                    out[u] = lab
                    stack.append(u)
    return out, changed


def communities_connected(g, membership):
    _, changed = split_disconnected(g, membership)
    return not changed


def check_graph(g):
    if g.m == 0:
        raise GraphError("heuristics need a graph with at least one edge")


def make_result(name, g, params, membership, dendrogram=None, trace=None):
    part = canonicalize(membership)
    q = ModularityValue(modularity_numerator(g, part.membership, params), modularity_scale(g, params))
    return HeuristicResult(name, part, q, dendrogram, trace or [])


def rng_for(cfg):
    return random.Random(cfg.seed)
