"""Louvain: local node moves followed by aggregation, repeated until stable."""

from __future__ import annotations

from ..graph import GAMMA_ONE
from ..partition import canonical_membership
from ._core import HeuristicConfig, WGraph, check_graph, make_result, move_until_stable, rng_for


def _levels(base, membership, rng, trace):
    """Aggregate by ``membership`` and run move phases on quotient graphs.

    Returns the projected membership and whether any level moved a node.
    """
    membership = canonical_membership(membership)
    wg = base.aggregate(membership)
    moved_any = False
    while True:
        comm, moved = move_until_stable(wg, range(wg.size), rng, trace)
        if not moved:
            return membership, moved_any
        moved_any = True
        comm = canonical_membership(comm)
        membership = [comm[c] for c in membership]
        wg = wg.aggregate(comm)


def louvain(g, params=GAMMA_ONE, cfg=None):
    cfg = cfg or HeuristicConfig()
    check_graph(g)
    rng = rng_for(cfg)
    trace = [] if cfg.trace else None
    base = WGraph.from_graph(g, params)
    membership = list(range(g.n))
    for _ in range(cfg.max_passes):
        # node level first; the loop ends only when both phases are idle,
        # which leaves the output node-optimal on the original graph
        membership, moved = move_until_stable(base, membership, rng, trace)
        membership, lifted = _levels(base, membership, rng, trace)
        if not lifted:
            break
    return make_result("louvain", g, params, membership, trace=trace)
