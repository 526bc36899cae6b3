"""Guided generation of graphs with prescribed subgraph counts."""

from .counts import STATISTICS, SubgraphCounts, count_all
from .generator import GeneratorConfig, TargetSpec, generate, run
from .graph import Graph, load_edge_list, load_karate, save_edge_list

__all__ = [
    "STATISTICS",
    "SubgraphCounts",
    "count_all",
    "GeneratorConfig",
    "TargetSpec",
    "generate",
    "run",
    "Graph",
    "load_edge_list",
    "load_karate",
    "save_edge_list",
]
__version__ = "0.1.0"
