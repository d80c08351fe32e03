from .multigraph import (
    Adjacency,
    ContiguityGraph,
    EdgeNotFoundError,
    InvalidPartitionError,
    MultiGraph,
    NodeIndexError,
    OverlappingSetsError,
    Partition,
    SelfLoopError,
    contract_edge,
    cutset_size,
    from_edge_list,
    grid_graph,
    induced_subgraph,
    is_connected,
    quotient_multigraph,
)
from .treecount import (
    DisconnectedClusterError,
    DisconnectedGraphError,
    EmptyCutsetError,
    FactorizationError,
    LdlFactor,
    downdate_factor,
    factorize_matrix,
    ldl_factorize,
    log_compatible_tree_count,
    log_tree_count,
    merge_factors,
    rank_one_update,
)

__all__ = [
    "Adjacency",
    "ContiguityGraph",
    "DisconnectedClusterError",
    "DisconnectedGraphError",
    "EdgeNotFoundError",
    "EmptyCutsetError",
    "FactorizationError",
    "InvalidPartitionError",
    "LdlFactor",
    "MultiGraph",
    "NodeIndexError",
    "OverlappingSetsError",
    "Partition",
    "SelfLoopError",
    "contract_edge",
    "cutset_size",
    "downdate_factor",
    "factorize_matrix",
    "from_edge_list",
    "grid_graph",
    "induced_subgraph",
    "is_connected",
    "ldl_factorize",
    "log_compatible_tree_count",
    "log_tree_count",
    "merge_factors",
    "quotient_multigraph",
    "rank_one_update",
]
