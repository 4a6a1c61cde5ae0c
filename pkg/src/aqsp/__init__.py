"""Shortest s-t walks on digraphs with consecutive-arc interaction costs.

The compound cost of a walk is the sum of its linear arc costs plus an
interaction cost for every pair of consecutive arcs.  This package provides
two exact label-setting solvers (plain and target-guided), a line-graph
linearization baseline, a brute-force oracle, instance generators, and a
benchmarking CLI (``aqsp``).
"""

from .baseline import LinearizedGraph, brute_force, linearize, linearized_core, solve_lin
from .fileio import read_aqg, read_elevation_csv, register_functional_tag, write_aqg
from .generators import (
    ElevationGrid,
    gen_configuration,
    gen_erdos_renyi,
    gen_grid,
    grid_turn_model,
    random_elevation_grid,
    turn_penalty_gamma,
)
from .graph import (
    FunctionalQuadratic,
    QuadGraph,
    StoredQuadratic,
    build_graph,
    find_alpha_cycle,
    materialize_quadratic,
    quad_slot_values,
    scale_quadratic,
    simplify_walk,
    walk_cost,
    zero_quadratic,
)
from .solvers import (
    AlphaReport,
    ArcLabels,
    CostToGo,
    PathResult,
    SearchStats,
    aq_astar,
    aq_dijkstra,
    backward_cost_to_go,
    extract_walk,
    linear_path_upper_bound,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaReport",
    "ArcLabels",
    "CostToGo",
    "ElevationGrid",
    "FunctionalQuadratic",
    "LinearizedGraph",
    "PathResult",
    "QuadGraph",
    "SearchStats",
    "StoredQuadratic",
    "aq_astar",
    "aq_dijkstra",
    "backward_cost_to_go",
    "brute_force",
    "build_graph",
    "extract_walk",
    "find_alpha_cycle",
    "gen_configuration",
    "gen_erdos_renyi",
    "gen_grid",
    "grid_turn_model",
    "linear_path_upper_bound",
    "linearize",
    "linearized_core",
    "materialize_quadratic",
    "quad_slot_values",
    "random_elevation_grid",
    "read_aqg",
    "read_elevation_csv",
    "register_functional_tag",
    "scale_quadratic",
    "simplify_walk",
    "solve",
    "solve_lin",
    "turn_penalty_gamma",
    "walk_cost",
    "write_aqg",
    "zero_quadratic",
]
