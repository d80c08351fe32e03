from .agglomerative import (
    AgglomerativeEngine,
    ClusterState,
    EngineCounters,
    Hierarchy,
    Merge,
    MergeCandidate,
    backward_pass,
    clusters_at_k,
    cut_at_k,
    delta_bound,
    fit,
)
from .dendrogram import (
    Dendrogram,
    DuplicateSlopeError,
    EmptyFrontError,
    FrontInterval,
    FrontLine,
    IncompleteHierarchyError,
    MergeLevel,
    ParetoFront,
    build_dendrogram,
    front_lines,
    map_partition_at_alpha,
    pareto_front,
    render_dendrogram,
)
from .prior import (
    ClusterCountError,
    InfeasiblePartition,
    InvalidAlphaError,
    KPrior,
    PosteriorValue,
    check_alpha,
    log_k_prior,
    log_obs_of,
    log_partition_prior,
    log_posterior,
)

__all__ = [
    "AgglomerativeEngine",
    "ClusterCountError",
    "ClusterState",
    "Dendrogram",
    "DuplicateSlopeError",
    "EmptyFrontError",
    "EngineCounters",
    "FrontInterval",
    "FrontLine",
    "Hierarchy",
    "IncompleteHierarchyError",
    "InfeasiblePartition",
    "InvalidAlphaError",
    "KPrior",
    "Merge",
    "MergeCandidate",
    "MergeLevel",
    "ParetoFront",
    "PosteriorValue",
    "backward_pass",
    "build_dendrogram",
    "check_alpha",
    "clusters_at_k",
    "cut_at_k",
    "delta_bound",
    "fit",
    "front_lines",
    "log_k_prior",
    "log_obs_of",
    "log_partition_prior",
    "log_posterior",
    "map_partition_at_alpha",
    "pareto_front",
    "render_dendrogram",
]
