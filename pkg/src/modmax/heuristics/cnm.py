"""Greedy agglomeration: merge the community pair with the largest modularity gain."""

from __future__ import annotations

from ..graph import GAMMA_ONE
from ._core import HeuristicConfig, check_graph, make_result
from .paris import Dendrogram


def merge_gain(twomq, p, e_ab, vol_a, vol_b):
    return 2 * (twomq * e_ab - p * vol_a * vol_b)


def cnm(g, params=GAMMA_ONE, cfg=None):
    """Start from singletons and merge while the best pair gain is positive.

    Community labels are the smallest original node id inside; ties between
    equal gains go to the lexicographically smallest label pair.
    """
    cfg = cfg or HeuristicConfig()
    check_graph(g)
    twomq, p = 2 * g.m * params.q, params.p
    links = {v: {u: 1 for u in g.adj[v]} for v in range(g.n)}
    vol = {v: g.degrees[v] for v in range(g.n)}
    owner = list(range(g.n))
    cluster_id = {v: v for v in range(g.n)}
    merges = []
    trace = [] if cfg.trace else None
    next_id = g.n
    while True:
        best = None
        for a in sorted(links):
            row = links[a]
            for b in sorted(row):
                if b <= a:
                    continue
                gain = merge_gain(twomq, p, row[b], vol[a], vol[b])
                if best is None or gain > best[0]:
                    best = (gain, a, b)
        if best is None or best[0] <= 0:
            break
        gain, a, b = best
        # b folds into a (a < b keeps labels minimal)
        for c, w in links.pop(b).items():
            if c == a:
                continue
            links[a][c] = links[a].get(c, 0) + w
            links[c][a] = links[c].get(a, 0) + w
            del links[c][b]
        links[a].pop(b, None)
        vol[a] += vol.pop(b)
        merges.append((cluster_id[a], cluster_id[b], gain, None))
        cluster_id[a] = next_id
        next_id += 1
        if trace is not None:
            trace.append(f"merge {a} {b} gain={gain}")
        for v in range(g.n):
            if owner[v] == b:
                owner[v] = a
    dendro = Dendrogram(g.n, merges, kind="cnm")
    return make_result("cnm", g, params, owner, dendrogram=dendro, trace=trace)


def has_positive_merge(g, membership, params=GAMMA_ONE):
    """True if merging some pair of communities raises modularity."""
    twomq, p = 2 * g.m * params.q, params.p
    vol = {}
    for v, c in enumerate(membership):
        vol[c] = vol.get(c, 0) + g.degrees[v]
    between = {}
    for i, j in g.edges:
        a, b = membership[i], membership[j]
        if a != b:
            key = (a, b) if a < b else (b, a)
            between[key] = between.get(key, 0) + 1
    return any(merge_gain(twomq, p, e, vol[a], vol[b]) > 0 for (a, b), e in between.items())
