"""Geometric inhomogeneous random graphs, greedy routing, and patching."""

from .geometry import GridIndex, InvalidInputError, TorusPoint, torus_distance
from .graphops import (
    UNREACHABLE,
    ComponentLabeling,
    bfs_distance,
    bfs_distances_from,
    connected_components,
    vertices_above_objective,
)
from .hyperbolic import (
    HyperbolicParams,
    HyperbolicPoint,
    hyperbolic_distance,
    phi_hyperbolic,
    sample_hyperbolic_graph,
)
from .io import (
    FileFormatError,
    read_girg_graph,
    read_hyperbolic_graph,
    write_girg_graph,
    write_hyperbolic_graph,
)
from .model import (
    Graph,
    ModelParams,
    Vertex,
    build_graph,
    edge_probability,
    sample_graph,
    sample_weight,
)
from .patching import (
    PatchOutcome,
    check_p1,
    check_p2,
    check_p3,
    patch_route,
    patch_route_history,
)
from .routing import (
    TOP,
    Objective,
    RouteOutcome,
    greedy_route,
    phi,
    phi_relaxed,
)
from .experiments import (
    ExperimentConfig,
    TrialRecord,
    read_records_csv,
    run_experiment,
    summarize,
    sweep_wmin,
    wilson_interval,
    write_records_csv,
    yardstick,
)

__all__ = [
    "ComponentLabeling",
    "ExperimentConfig",
    "FileFormatError",
    "Graph",
    "GridIndex",
    "HyperbolicParams",
    "HyperbolicPoint",
    "InvalidInputError",
    "ModelParams",
    "Objective",
    "PatchOutcome",
    "RouteOutcome",
    "TOP",
    "TorusPoint",
    "TrialRecord",
    "UNREACHABLE",
    "Vertex",
    "bfs_distance",
    "bfs_distances_from",
    "build_graph",
    "check_p1",
    "check_p2",
    "check_p3",
    "connected_components",
    "edge_probability",
    "greedy_route",
    "hyperbolic_distance",
    "patch_route",
    "patch_route_history",
    "phi",
    "phi_hyperbolic",
    "phi_relaxed",
    "read_girg_graph",
    "read_hyperbolic_graph",
    "read_records_csv",
    "run_experiment",
    "sample_graph",
    "sample_hyperbolic_graph",
    "sample_weight",
    "summarize",
    "sweep_wmin",
    "torus_distance",
    "vertices_above_objective",
    "wilson_interval",
    "write_girg_graph",
    "write_hyperbolic_graph",
    "write_records_csv",
    "yardstick",
]
