"""Seedable modularity heuristics behind one calling convention.

``run_heuristic(name, graph, params, seed=...)`` returns a
:class:`HeuristicResult` with the canonical partition and its exact modularity.
``belief`` and ``edmot`` are registered for ingestion of externally produced
partition files only.
"""

from __future__ import annotations

from dataclasses import replace

from ..graph import GAMMA_ONE
from ._core import (
    HeuristicConfig,
    HeuristicResult,
    communities_connected,
    is_node_optimal,
    make_result,
)
from .cnm import cnm, has_positive_merge
from .combo import combo
from .leicht_newman import leicht_newman
from .leiden import leiden
from .louvain import louvain
from .paris import Dendrogram, paris, reciprocal_merges_ok

ALGORITHMS = {
    "cnm": cnm,
    "louvain": louvain,
    "leicht_newman": leicht_newman,
    "combo": combo,
    "leiden": leiden,
    "paris": paris,
}
ALIASES = {"ln": "leicht_newman", "clauset_newman_moore": "cnm"}
EXTERNAL = ("belief", "edmot")


class UnknownAlgorithm(KeyError):
    pass


def resolve(name):
    key = name.strip().lower().replace("-", "_")
    key = ALIASES.get(key, key)
    if key in ALGORITHMS or key in EXTERNAL:
        return key
    known = ", ".join(sorted(ALGORITHMS) + list(EXTERNAL))
    raise UnknownAlgorithm(f"unknown algorithm {name!r}; known: {known}")


def run_heuristic(name, g, params=GAMMA_ONE, seed=0, config=None, partition_file=None):
    key = resolve(name)
    cfg = config or HeuristicConfig()
    cfg = replace(cfg, seed=seed)
    if key in EXTERNAL:
        if partition_file is None:
            raise UnknownAlgorithm(
                f"{key} has no built-in implementation; supply an external partition file")
        from ..graph import read_partition

        return make_result(key, g, params, read_partition(g, partition_file))
    return ALGORITHMS[key](g, params, cfg)


__all__ = [
    "ALGORITHMS", "EXTERNAL", "Dendrogram", "HeuristicConfig", "HeuristicResult",
    "UnknownAlgorithm", "cnm", "combo", "communities_connected", "has_positive_merge",
    "is_node_optimal", "leicht_newman", "leiden", "louvain", "paris",
    "reciprocal_merges_ok", "resolve", "run_heuristic",
]
