"""Leiden: queue-based local moving, randomised refinement, aggregation.

Aggregation uses the refined partition while the unrefined one seeds the
quotient graph.  A final pass alternates node moves with splitting of
disconnected communities, so the output is node-optimal and every community
induces a connected subgraph.
"""

from __future__ import annotations

import math

from ..graph import GAMMA_ONE
from ..partition import canonical_membership
from ._core import (
    HeuristicConfig,
    WGraph,
    check_graph,
    make_result,
    move_until_stable,
    queue_move,
    rng_for,
    split_disconnected,
)


def _refine(wg, part, rng, theta, scale):
    """Merge singletons inside each community into well-connected subsets."""
    n = wg.size
    twomq, p = wg.twomq, wg.p
    members = {}
    for v, c in enumerate(part):
        members.setdefault(c, []).append(v)
    ref = list(range(n))
    rvol = list(wg.vol)
    # edge weight from a refined community to the rest of its parent community
    rext = [0] * n
    for v in range(n):
        c = part[v]
        rext[v] = sum(w for u, w in wg.nbrs[v].items() if part[u] == c)
    singleton = [True] * n
    for c in sorted(members):
        nodes = members[c]
        cvol = sum(wg.vol[v] for v in nodes)
        order = list(nodes)
        rng.shuffle(order)
        for v in order:
            if not singleton[v]:
                continue
            dv = wg.vol[v]
            # v itself must be well connected to its community
            if twomq * rext[v] < p * dv * (cvol - dv):
                continue
            links = {}
            for u, w in wg.nbrs[v].items():
                if part[u] == c:
                    r = ref[u]
                    links[r] = links.get(r, 0) + w
            options = [(0, ref[v])]
            for r in sorted(links):
                if r == ref[v]:
                    continue
                if twomq * rext[r] < p * rvol[r] * (cvol - rvol[r]):
                    continue
                gain = 2 * (twomq * links[r] - p * dv * rvol[r])
                if gain >= 0:
                    options.append((gain, r))
            if len(options) == 1:
                continue
            top = max(g for g, _ in options)
            weights = [math.exp((g - top) / scale / theta) for g, _ in options]
            pick = rng.random() * sum(weights)
            acc = 0.0
            target = options[-1][1]
            for wgt, (_, r) in zip(weights, options):
                acc += wgt
                if pick < acc:
                    target = r
                    break
            if target == ref[v]:
                continue
            old = ref[v]
            rext[target] = rext[target] + rext[old] - 2 * links[target]
            rvol[target] += dv
            rvol[old] = 0
            rext[old] = 0
            ref[v] = target
            singleton[v] = False
            singleton[target] = False
    return canonical_membership(ref)


def leiden(g, params=GAMMA_ONE, cfg=None):
    cfg = cfg or HeuristicConfig()
    check_graph(g)
    rng = rng_for(cfg)
    trace = [] if cfg.trace else None
    scale = 4 * g.m * g.m * params.q
    base = WGraph.from_graph(g, params)
    wg = base
    node_of = list(range(g.n))  # original node -> node of wg
    part = list(range(g.n))
    for _ in range(cfg.max_passes):
        part, _ = queue_move(wg, part, rng, trace)
        part = canonical_membership(part)
        if max(part) + 1 == wg.size:
            break
        ref = _refine(wg, part, rng, cfg.leiden_theta, scale)
        seed = [0] * (max(ref) + 1)
        for v, r in enumerate(ref):
            seed[r] = part[v]
        wg = wg.aggregate(ref)
        node_of = [ref[x] for x in node_of]
        part = seed
    membership = [part[x] for x in node_of]
    for _ in range(cfg.max_passes):
        membership, moved = move_until_stable(base, membership, rng, trace)
        membership, split = split_disconnected(g, membership)
        if not moved and not split:
            break
    return make_result("leiden", g, params, membership, trace=trace)
