"""Exact and heuristic modularity maximisation with optimality diagnostics."""

from .graph import (
    GAMMA_ONE,
    Graph,
    GraphError,
    ModularityParams,
    ModularityValue,
    ParseError,
    barabasi_albert,
    erdos_renyi,
    modularity,
    modularity_entry,
    parse_edge_list,
    read_edge_list,
)
from .partition import Partition, ami, canonicalize, enumerate_partitions, gop, max_ami_vs_optima

__version__ = "0.1.0"

__all__ = [
    "GAMMA_ONE", "Graph", "GraphError", "ModularityParams", "ModularityValue", "ParseError",
    "Partition", "ami", "barabasi_albert", "canonicalize", "enumerate_partitions",
    "erdos_renyi", "gop", "max_ami_vs_optima", "modularity", "modularity_entry",
    "parse_edge_list", "read_edge_list",
]
