"""S* heuristic Steiner-tree search for multi-goal path finding."""

from .graph import Graph, Instance, parse_edge_list, parse_map, shortest_path_oracle
from .heuristic import HeuristicProvider, make_provider
from .pipeline import MgpfSolution, tree_to_walk, validate_solution
from .solvers import Criterion, solve_merged, solve_unmerged, steiner_tree

__all__ = [
    "Criterion",
    "Graph",
    "HeuristicProvider",
    "Instance",
    "MgpfSolution",
    "make_provider",
    "parse_edge_list",
    "parse_map",
    "shortest_path_oracle",
    "solve_merged",
    "solve_unmerged",
    "steiner_tree",
    "tree_to_walk",
    "validate_solution",
]
