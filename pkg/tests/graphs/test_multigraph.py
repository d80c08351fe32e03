import pytest

from regionclust.errors import InvalidInputError
from regionclust.graphs import (
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


def test_from_edge_list_deduplicates_orientations() -> None:
    g = from_edge_list(2, [(0, 1), (1, 0)])
    assert g.edge_count == 1
    assert g.edges == frozenset({(0, 1)})


def test_from_edge_list_rejects_bad_pairs() -> None:
    with pytest.raises(SelfLoopError):
        from_edge_list(3, [(0, 0)])
    with pytest.raises(NodeIndexError):
        from_edge_list(3, [(0, 3)])


def test_neighbors(cycle4: ContiguityGraph) -> None:
    assert cycle4.neighbors[0] == (1, 3)
    assert cycle4.neighbors[2] == (1, 3)


def test_grid_graph_edge_counts() -> None:
    assert grid_graph(2, 2).edge_count == 4
    assert grid_graph(2, 2, "queen").edge_count == 6
    assert grid_graph(30, 30).edge_count == 1740


def test_grid_graph_row_major_numbering() -> None:
    g = grid_graph(2, 3)
    assert (0, 1) in g.edges
    assert (0, 3) in g.edges
    assert (2, 3) not in g.edges


def test_induced_subgraph(cycle4: ContiguityGraph) -> None:
    assert induced_subgraph(cycle4, {0, 1}).edges == frozenset({(0, 1)})
    opposite = induced_subgraph(cycle4, {0, 2})
    assert opposite.n == 2
    assert opposite.edge_count == 0
    assert induced_subgraph(cycle4, range(4)) == cycle4


def test_cutset_size(cycle4: ContiguityGraph, k4: ContiguityGraph) -> None:
    assert cutset_size(cycle4, {0, 1}, {2, 3}) == 2
    assert cutset_size(cycle4, {0}, {2}) == 0
    assert cutset_size(k4, {0, 1}, {2, 3}) == 4
    with pytest.raises(OverlappingSetsError):
        cutset_size(cycle4, {0, 1}, {1, 2})


def test_quotient_multigraph(cycle4: ContiguityGraph, k4: ContiguityGraph) -> None:
    halves = quotient_multigraph(cycle4, Partition.from_clusters([[0, 1], [2, 3]], 4))
    assert halves.n == 2
    assert halves.multiplicity(0, 1) == 2

    singletons = quotient_multigraph(cycle4, Partition.singletons(4))
    assert dict(singletons.edges) == dict.fromkeys(cycle4.edges, 1)

    triangle = quotient_multigraph(k4, Partition.from_clusters([[0], [1], [2, 3]], 4))
    assert dict(triangle.edges) == {(0, 1): 1, (0, 2): 2, (1, 2): 2}


def test_quotient_multigraph_size_mismatch(cycle4: ContiguityGraph) -> None:
    with pytest.raises(InvalidPartitionError):
        quotient_multigraph(cycle4, Partition.singletons(3))


def test_contract_edge() -> None:
    triangle = MultiGraph(3, {(0, 1): 1, (1, 2): 1, (0, 2): 1})
    contracted = contract_edge(triangle, 0, 1)
    assert contracted.n == 2
    assert dict(contracted.edges) == {(0, 1): 2}

    pair = MultiGraph(2, {(0, 1): 3})
    single = contract_edge(pair, 1, 0)
    assert single.n == 1
    assert not single.edges


def test_contract_edge_on_cycle(cycle4: ContiguityGraph) -> None:
    mg = quotient_multigraph(cycle4, Partition.singletons(4))
    contracted = contract_edge(mg, 0, 1)
    assert dict(contracted.edges) == {(0, 1): 1, (1, 2): 1, (0, 2): 1}


def test_contract_edge_requires_adjacency() -> None:
    with pytest.raises(EdgeNotFoundError):
        contract_edge(MultiGraph(3, {(0, 1): 1}), 0, 2)


def test_multigraph_normalizes_and_validates() -> None:
    mg = MultiGraph(3, {(1, 0): 2, (2, 1): 1})
    assert dict(mg.edges) == {(0, 1): 2, (1, 2): 1}
    assert mg.total_multiplicity == 3
    assert mg.without_edge(0, 1).multiplicity(0, 1) == 0
    with pytest.raises(SelfLoopError):
        MultiGraph(2, {(1, 1): 1})


def test_is_connected(cycle4: ContiguityGraph) -> None:
    assert is_connected(cycle4)
    assert not is_connected(from_edge_list(2, []))
    assert is_connected(from_edge_list(1, []))
    assert is_connected(from_edge_list(0, []))
    assert is_connected(grid_graph(30, 30))
    assert not is_connected(from_edge_list(5, [(0, 1), (1, 2), (3, 4)]))
    assert is_connected(MultiGraph(3, {(0, 1): 2, (1, 2): 1}))
    assert not is_connected(MultiGraph(3, {(0, 1): 4}))


def test_contiguity_graph_validates_its_edges() -> None:
    g = ContiguityGraph(3, frozenset({(1, 0), (0, 1), (2, 1)}))
    assert g.edges == frozenset({(0, 1), (1, 2)})
    assert g.neighbors[1] == (0, 2)
    with pytest.raises(SelfLoopError):
        ContiguityGraph(3, frozenset({(2, 2)}))
    with pytest.raises(NodeIndexError):
        ContiguityGraph(3, frozenset({(0, 3)}))
    with pytest.raises(NodeIndexError):
        ContiguityGraph(3, frozenset({(-1, 0)}))
    with pytest.raises(InvalidInputError):
        ContiguityGraph(-1, frozenset())


def test_partition_views() -> None:
    p = Partition.from_assignment([5, 5, 2, 2, 7])
    assert p.assignment == (0, 0, 1, 1, 2)
    assert p.k == 3
    assert p.canonical() == (frozenset({0, 1}), frozenset({2, 3}), frozenset({4}))
    with pytest.raises(InvalidPartitionError):
        Partition.from_clusters([[0, 1], [1, 2]], 3)
    with pytest.raises(InvalidPartitionError):
        Partition.from_clusters([[0]], 2)
