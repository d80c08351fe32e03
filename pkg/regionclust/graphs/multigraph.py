"""Contiguity graphs, quotient multigraphs and partitions.

All graph values are immutable; every operation returns a new value.
"""

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from types import MappingProxyType

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from regionclust.errors import InvalidInputError

Edge = tuple[int, int]


class SelfLoopError(InvalidInputError):
    def __init__(self, node: int) -> None:
        super().__init__(f"Self-loop on node {node} is not allowed")


class NodeIndexError(InvalidInputError):
    def __init__(self, node: int, n: int) -> None:
        super().__init__(f"Node index {node} out of range [0, {n})")


class EdgeNotFoundError(InvalidInputError):
    def __init__(self, g: int, h: int) -> None:
        super().__init__(f"Edge ({g}, {h}) is not present")


class OverlappingSetsError(InvalidInputError):
    def __init__(self, common: Iterable[int]) -> None:
        super().__init__(f"Node sets overlap on {sorted(common)}")


class InvalidPartitionError(InvalidInputError):
    def __init__(self, reason: str) -> None:
        super().__init__(f"Invalid partition: {reason}")


class Adjacency(str, Enum):
    ROOK = "rook"
    QUEEN = "queen"


def _normalize(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def _check_node(node: int, n: int) -> None:
    if not 0 <= node < n:
        raise NodeIndexError(node, n)


def _adjacency_from_counts(n: int, counts: Mapping[Edge, int]) -> sparse.csr_matrix:
    if not counts:
        return sparse.csr_matrix((n, n), dtype=np.float64)
    pairs = np.array(list(counts.keys()), dtype=np.int64)
    weights = np.array(list(counts.values()), dtype=np.float64)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    data = np.concatenate([weights, weights])
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


@dataclass(frozen=True)
class ContiguityGraph:
    """
    Simple undirected graph over ``n`` observations.

    Parameters:
        n (int): Node count.
        edges (frozenset[Edge]): Unordered pairs, stored as ``(u, v)`` with ``u < v`` whatever their given orientation.

    Raises:
        NodeIndexError: If an endpoint is outside ``[0, n)``.
        SelfLoopError: If a pair joins a node to itself.
    """

    n: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidInputError(f"Node count must be non-negative, got {self.n}")
        normalized: set[Edge] = set()
        for u, v in self.edges:
            _check_node(u, self.n)
            _check_node(v, self.n)
            if u == v:
                raise SelfLoopError(u)
            normalized.add(_normalize(int(u), int(v)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adjacency: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in sorted(self.edges):
            adjacency[u].append(v)
            adjacency[v].append(u)
        return tuple(tuple(nodes) for nodes in adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def multiplicities(self) -> Mapping[Edge, int]:
        return MappingProxyType(dict.fromkeys(self.edges, 1))

    def adjacency_matrix(self) -> sparse.csr_matrix:
        return _adjacency_from_counts(self.n, self.multiplicities)

    def laplacian(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(csgraph.laplacian(self.adjacency_matrix()))


@dataclass(frozen=True)
class MultiGraph:
    """
    Undirected multigraph with integer edge multiplicities and no self-loops.

    Parameters:
        n (int): Node count.
        edges (Mapping[Edge, int]): Multiplicity of each unordered pair ``(g, h)``, ``g < h``.
    """

    n: int
    edges: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        normalized: dict[Edge, int] = {}
        for (g, h), multiplicity in self.edges.items():
            _check_node(g, self.n)
            _check_node(h, self.n)
            if g == h:
                raise SelfLoopError(g)
            if multiplicity < 1:
                raise InvalidInputError(f"Multiplicity of ({g}, {h}) must be positive, got {multiplicity}")
            key = _normalize(g, h)
            normalized[key] = normalized.get(key, 0) + int(multiplicity)
        object.__setattr__(self, "edges", MappingProxyType(dict(sorted(normalized.items()))))

    @property
    def multiplicities(self) -> Mapping[Edge, int]:
        return self.edges

    @property
    def total_multiplicity(self) -> int:
        return sum(self.edges.values())

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adjacency: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return tuple(tuple(nodes) for nodes in adjacency)

    def multiplicity(self, g: int, h: int) -> int:
        return self.edges.get(_normalize(g, h), 0)

    def adjacency_matrix(self) -> sparse.csr_matrix:
        return _adjacency_from_counts(self.n, self.edges)

    def laplacian(self) -> sparse.csr_matrix:
        return sparse.csr_matrix(csgraph.laplacian(self.adjacency_matrix()))

    def without_edge(self, g: int, h: int) -> "MultiGraph":
        """Remove all parallel edges between ``g`` and ``h``."""
        key = _normalize(g, h)
        if key not in self.edges:
            raise EdgeNotFoundError(g, h)
        return MultiGraph(self.n, {pair: m for pair, m in self.edges.items() if pair != key})


@dataclass(frozen=True)
class Partition:
    """
    A partition of ``[0, n)`` into ``k`` nonempty clusters.

    Both views are kept: ``assignment[i]`` is the cluster of node ``i`` and
    ``clusters[c]`` the members of cluster ``c``.
    """

    assignment: tuple[int, ...]
    clusters: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        n = len(self.assignment)
        seen: set[int] = set()
        for index, cluster in enumerate(self.clusters):
            if not cluster:
                raise InvalidPartitionError(f"cluster {index} is empty")
            if seen & cluster:
                raise InvalidPartitionError(f"cluster {index} overlaps another cluster")
            seen |= cluster
            for node in cluster:
                if not 0 <= node < n or self.assignment[node] != index:
                    raise InvalidPartitionError(f"assignment disagrees with cluster {index} on node {node}")
        if len(seen) != n:
            raise InvalidPartitionError("clusters do not cover every node")

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return len(self.clusters)

    @classmethod
    def from_assignment(cls, labels: Sequence[int] | np.ndarray) -> "Partition":
        """Build a partition from arbitrary labels, numbering clusters by first appearance."""
        relabel: dict[int, int] = {}
        assignment = tuple(relabel.setdefault(int(label), len(relabel)) for label in labels)
        members: list[set[int]] = [set() for _ in relabel]
        for node, cluster in enumerate(assignment):
            members[cluster].add(node)
        return cls(assignment=assignment, clusters=tuple(frozenset(m) for m in members))

    @classmethod
    def from_clusters(cls, clusters: Sequence[Iterable[int]], n: int) -> "Partition":
        """Build a partition keeping the given cluster order."""
        assignment = [-1] * n
        frozen = tuple(frozenset(cluster) for cluster in clusters)
        for index, cluster in enumerate(frozen):
            for node in cluster:
                _check_node(node, n)
                if assignment[node] != -1:
                    raise InvalidPartitionError(f"node {node} appears in several clusters")
                assignment[node] = index
        if -1 in assignment:
            raise InvalidPartitionError(f"node {assignment.index(-1)} is not covered")
        return cls(assignment=tuple(assignment), clusters=frozen)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls.from_clusters([[i] for i in range(n)], n)

    def canonical(self) -> tuple[frozenset[int], ...]:
        """Order-free view: clusters sorted by smallest member."""
        return tuple(sorted(self.clusters, key=min))


def from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> ContiguityGraph:
    """
    Build a simple graph from possibly duplicated, possibly reversed pairs.

    Raises:
        NodeIndexError: If an endpoint is outside ``[0, n)``.
        SelfLoopError: If a pair joins a node to itself.
    """
    if n < 0:
        raise InvalidInputError(f"Node count must be non-negative, got {n}")
    edges: set[Edge] = set()
    for u_raw, v_raw in pairs:
        u, v = int(u_raw), int(v_raw)
        _check_node(u, n)
        _check_node(v, n)
        if u == v:
            raise SelfLoopError(u)
        edges.add(_normalize(u, v))
    return ContiguityGraph(n=n, edges=frozenset(edges))


def grid_graph(rows: int, cols: int, adjacency: Adjacency | str = Adjacency.ROOK) -> ContiguityGraph:
    """
    Regular lattice graph with row-major node numbering ``row * cols + col``.

    Rook adjacency links the 4-neighbourhood, queen adds the diagonals.
    """
    if rows < 1 or cols < 1:
        raise InvalidInputError(f"Grid dimensions must be positive, got {rows}x{cols}")
    adjacency = Adjacency(adjacency)
    offsets = [(0, 1), (1, 0)]
    if adjacency is Adjacency.QUEEN:
        offsets += [(1, 1), (1, -1)]
    pairs = [
        (r * cols + c, (r + dr) * cols + (c + dc))
        for r in range(rows)
        for c in range(cols)
        for dr, dc in offsets
        if 0 <= r + dr < rows and 0 <= c + dc < cols
    ]
    return from_edge_list(rows * cols, pairs)


def induced_subgraph(g: ContiguityGraph, nodes: Iterable[int]) -> ContiguityGraph:
    """Subgraph on ``nodes``, relabelled densely in increasing node order."""
    ordered = sorted(set(nodes))
    for node in ordered:
        _check_node(node, g.n)
    local = {node: index for index, node in enumerate(ordered)}
    edges = frozenset(_normalize(local[u], local[v]) for u, v in g.edges if u in local and v in local)
    return ContiguityGraph(n=len(ordered), edges=edges)


def cutset_size(g: ContiguityGraph, a: Iterable[int], b: Iterable[int]) -> int:
    """Number of edges with one endpoint in ``a`` and the other in ``b``."""
    set_a, set_b = set(a), set(b)
    common = set_a & set_b
    if common:
        raise OverlappingSetsError(common)
    smaller, larger = (set_a, set_b) if len(set_a) <= len(set_b) else (set_b, set_a)
    return sum(1 for u in smaller for v in g.neighbors[u] if v in larger)


def quotient_multigraph(g: ContiguityGraph, p: Partition) -> MultiGraph:
    """Graph over clusters whose multiplicities are the pairwise cutset sizes."""
    if p.n != g.n:
        raise InvalidPartitionError(f"partition covers {p.n} nodes, graph has {g.n}")
    counts = Counter(
        _normalize(p.assignment[u], p.assignment[v]) for u, v in g.edges if p.assignment[u] != p.assignment[v]
    )
    return MultiGraph(n=p.k, edges=dict(counts))


def contract_edge(mg: MultiGraph, g: int, h: int) -> MultiGraph:
    """
    Contract every parallel edge between ``g`` and ``h``.

    The merged node takes index ``min(g, h)``; nodes above ``max(g, h)`` shift
    down by one. Edges towards common neighbours accumulate and loops vanish.

    Raises:
        EdgeNotFoundError: If ``g`` and ``h`` are not adjacent.
    """
    if mg.multiplicity(g, h) == 0:
        raise EdgeNotFoundError(g, h)
    keep, drop = _normalize(g, h)

    def relabel(node: int) -> int:
        if node == drop:
            return keep
        return node - 1 if node > drop else node

    counts: Counter[Edge] = Counter()
    for (u, v), multiplicity in mg.edges.items():
        ru, rv = relabel(u), relabel(v)
        if ru != rv:
            counts[_normalize(ru, rv)] += multiplicity
    return MultiGraph(n=mg.n - 1, edges=dict(counts))


def is_connected(g: ContiguityGraph | MultiGraph) -> bool:
    """True when the graph has a single connected component (vacuous for n <= 1)."""
    if g.n <= 1:
        return True
    components, _ = csgraph.connected_components(g.adjacency_matrix(), directed=False)
    return components == 1
