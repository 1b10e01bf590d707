"""Paris: agglomerative clustering by nearest-neighbour chain.

The distance between clusters ``A`` and ``B`` is
``w(A) w(B) / (2m w(A, B))`` where ``w(A)`` is the volume of ``A`` and
``w(A, B)`` the number of edges between them.  Distances are compared as exact
fractions.  Separate components are joined at infinite height at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..graph import GAMMA_ONE
from ._core import HeuristicConfig, check_graph, make_result

INF = math.inf


@dataclass
class Dendrogram:
    """Binary merge tree over ``n`` leaves.

    ``merges`` lists ``(left, right, height, size)`` in execution order; new
    clusters take ids ``n, n+1, ...`` in that order (scipy linkage style).
    """

    n: int
    merges: list
    kind: str = "paris"
    chain_log: list = field(default_factory=list)

    def by_height(self):
        """Merges relabelled so they are applied in non-decreasing height."""
        order = sorted(range(len(self.merges)),
                       key=lambda i: (_hkey(self.merges[i][2]), i))
        new_id = {}
        out = []
        for pos, i in enumerate(order):
            a, b, h, s = self.merges[i]
            a = new_id.get(a, a)
            b = new_id.get(b, b)
            new_id[self.n + i] = self.n + pos
            out.append((a, b, h, s))
        return out

    def cut(self, num_merges, ordered=None):
        """Membership after applying the first ``num_merges`` merges by height."""
        ordered = ordered if ordered is not None else self.by_height()
        parent = list(range(self.n + len(ordered)))
        for pos, (a, b, _, _) in enumerate(ordered[:num_merges]):
            parent[a] = self.n + pos
            parent[b] = self.n + pos

        def root(x):
            while parent[x] != x:
                x = parent[x]
            return x

        return [root(v) for v in range(self.n)]

    def to_linkage(self):
        return [(a, b, float(h) if h is not INF else INF, s) for a, b, h, s in self.by_height()]


def _hkey(h):
    return (1, 0) if h is INF else (0, h)


def paris(g, params=GAMMA_ONE, cfg=None):
    cfg = cfg or HeuristicConfig()
    check_graph(g)
    twom = 2 * g.m
    n = g.n
    nbrs = {v: {u: 1 for u in g.adj[v]} for v in range(n)}
    vol = {v: g.degrees[v] for v in range(n)}
    size = {v: 1 for v in range(n)}
    merges = []
    chain_log = []
    next_id = n
    roots = []
    chain = []
    active = set(range(n))

    def dist(a, b):
        return Fraction(vol[a] * vol[b], twom * nbrs[a][b])

    while active:
        if not chain:
            start = min(active)
            if not nbrs[start]:
                active.discard(start)
                roots.append(start)
                continue
            chain = [start]
        a = chain[-1]
        prev = chain[-2] if len(chain) > 1 else None
        best = None
        for b in sorted(nbrs[a]):
            d = dist(a, b)
            if best is None or d < best[0]:
                best = (d, b)
        d, b = best
        if prev is not None and dist(a, prev) == d:
            b = prev
        if b == prev:
            chain.pop()
            chain.pop()
            chain_log.append((a, b, d))
            new = next_id
            next_id += 1
            merges.append((min(a, b), max(a, b), d, size[a] + size[b]))
            row = {}
            for x in (a, b):
                for c, w in nbrs.pop(x).items():
                    if c in (a, b):
                        continue
                    row[c] = row.get(c, 0) + w
                    del nbrs[c][x]
            for c, w in row.items():
                nbrs[c][new] = w
            nbrs[new] = row
            vol[new] = vol.pop(a) + vol.pop(b)
            size[new] = size.pop(a) + size.pop(b)
            active.discard(a)
            active.discard(b)
            active.add(new)
        else:
            chain.append(b)
    roots.sort()
    while len(roots) > 1:
        a, b = roots[0], roots[1]
        merges.append((a, b, INF, size[a] + size[b]))
        size[next_id] = size.pop(a) + size.pop(b)
        roots = [next_id] + roots[2:]
        next_id += 1
    dendro = Dendrogram(n, merges, kind="paris", chain_log=chain_log)
    membership = _flat_cut(g, params, dendro, cfg)
    return make_result("paris", g, params, membership, dendrogram=dendro)


def _flat_cut(g, params, dendro, cfg):
    ordered = dendro.by_height()
    if cfg.paris_cut == "k":
        k = cfg.paris_k or 1
        return dendro.cut(max(0, g.n - k), ordered)
    if cfg.paris_cut != "best_q":
        raise ValueError(f"unknown Paris cut policy {cfg.paris_cut!r}")
    twomq, p = 2 * g.m * params.q, params.p
    # replay merges in height order, tracking the exact modularity change
    cluster_vol = {v: g.degrees[v] for v in range(g.n)}
    adj_w = {v: {u: 1 for u in g.adj[v]} for v in range(g.n)}
    total = 0
    best_total, best_steps = 0, 0
    for pos, (a, b, _, _) in enumerate(ordered):
        e = adj_w[a].get(b, 0)
        total += 2 * (twomq * e - p * cluster_vol[a] * cluster_vol[b])
        new = g.n + pos
        row = {}
        for x in (a, b):
            for c, w in adj_w.pop(x).items():
                if c in (a, b):
                    continue
                row[c] = row.get(c, 0) + w
                del adj_w[c][x]
        for c, w in row.items():
            adj_w[c][new] = w
        adj_w[new] = row
        cluster_vol[new] = cluster_vol.pop(a) + cluster_vol.pop(b)
        if total > best_total:
            best_total, best_steps = total, pos + 1
    return dendro.cut(best_steps, ordered)


def reciprocal_merges_ok(g, dendro):
    """Replay execution-order merges and confirm each joined reciprocal nearest neighbours."""
    twom = 2 * g.m
    nbrs = {v: {u: 1 for u in g.adj[v]} for v in range(g.n)}
    vol = {v: g.degrees[v] for v in range(g.n)}
    next_id = g.n
    for a, b, h, _ in dendro.merges:
        if h is INF:
            if nbrs.get(a) or nbrs.get(b):
                return False
            next_id += 1
            continue
        if b not in nbrs.get(a, {}):
            return False
        d_ab = Fraction(vol[a] * vol[b], twom * nbrs[a][b])
        if d_ab != h:
            return False
        for x, y in ((a, b), (b, a)):
            for c, w in nbrs[x].items():
                if Fraction(vol[x] * vol[c], twom * w) < d_ab:
                    return False
        new = next_id
        next_id += 1
        row = {}
        for x in (a, b):
            for c, w in nbrs.pop(x).items():
                if c in (a, b):
                    continue
                row[c] = row.get(c, 0) + w
                del nbrs[c][x]
        for c, w in row.items():
            nbrs[c][new] = w
        nbrs[new] = row
        vol[new] = vol.pop(a) + vol.pop(b)
    return True
