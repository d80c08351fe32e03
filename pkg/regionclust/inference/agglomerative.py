"""
Greedy contiguity-constrained agglomeration.

The forward pass merges adjacent clusters in order of a score that depends
on the two clusters only. It replaces the quotient tree-count ratio of the
exact posterior gain by its ceiling ``1 / |cut|``, so it never falls below
the exact gain up to a term shared by every candidate. The backward pass then
walks the merge tree from one cluster back to singletons and computes the
exact log posterior of every level, updating a factor of the quotient
Laplacian by rank-1 updates and downdates.
"""

import heapq
import logging
import math
import time
from collections import Counter
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import sparse

from regionclust.config import config
from regionclust.errors import InvalidInputError
from regionclust.graphs import (
    ContiguityGraph,
    DisconnectedGraphError,
    EmptyCutsetError,
    LdlFactor,
    Partition,
    factorize_matrix,
    induced_subgraph,
    is_connected,
    ldl_factorize,
    log_tree_count,
    merge_factors,
    rank_one_update,
)
from regionclust.inference.prior import (
    ClusterCountError,
    PosteriorValue,
    log_binomial,
    log_factorial,
    log_k_prior,
)
from regionclust.models import (
    ModelSpec,
    SuffStats,
    as_matrix,
    combine,
    delta_lobs,
    log_marginal,
    suff_stats_matrix,
)
from regionclust.utilities.helpers.factor_cache import FactorCache

logger = logging.getLogger(__name__)

Edge = tuple[int, int]


@dataclass(frozen=True, order=True)
class MergeCandidate:
    """
    Heap entry; ordering puts the highest score first, then the smallest pair.

    A candidate is stale once either cluster's version differs from ``stamp``.
    """

    priority: float = field(repr=False)
    g: int
    h: int
    stamp: tuple[int, int]
    bound_score: float = field(compare=False)

    @classmethod
    def scored(cls, g: int, h: int, stamp: tuple[int, int], bound_score: float) -> "MergeCandidate":
        return cls(priority=-bound_score, g=g, h=h, stamp=stamp, bound_score=bound_score)


@dataclass(frozen=True)
class ClusterState:
    """
    A live cluster of the forward pass.

    ``members`` fixes the local numbering of ``factor``; its last member is the ground.
    """

    cluster_id: int
    members: tuple[int, ...]
    stats: SuffStats
    factor: LdlFactor
    log_intra_trees: float
    version: int

    @property
    def local_index(self) -> dict[int, int]:
        return {node: index for index, node in enumerate(self.members)}


@dataclass(frozen=True)
class Merge:
    """
    One accepted merge; cluster ``new_id`` replaces ``g`` and ``h``.

    Cluster ids follow the linkage convention: leaves are ``0..N-1`` and
    merge ``step`` creates id ``N + step``.
    """

    step: int
    g: int
    h: int
    new_id: int
    bound_score: float
    log_trees: float | None = None


@dataclass(frozen=True)
class Hierarchy:
    n: int
    merges: tuple[Merge, ...]
    per_k: dict[int, PosteriorValue] = field(default_factory=dict)
    map_k: int | None = None
    alpha: float = 1.0

    def posterior_table(self) -> list[tuple[int, PosteriorValue]]:
        return sorted(self.per_k.items())


@dataclass
class EngineCounters:
    scored: int = 0
    stale_pops: int = 0
    cache_hits: int = 0
    cache_misses: int = 0
    rescored_per_step: list[int] = field(default_factory=list)
    quotient_degree_per_step: list[int] = field(default_factory=list)


def singleton_factor() -> LdlFactor:
    return factorize_matrix(sparse.csr_matrix((1, 1)))


def delta_bound(
    a: ClusterState,
    b: ClusterState,
    cut_edges: Sequence[Edge],
    spec: ModelSpec,
) -> tuple[float, LdlFactor]:
    """
    Cluster-local score of merging ``a`` and ``b``; an upper bound on the exact posterior gain.

    Parameters:
        a (ClusterState): First cluster.
        b (ClusterState): Second cluster.
        cut_edges (Sequence[Edge]): Graph edges ``(node of a, node of b)``.
        spec (ModelSpec): Observation model.

    Returns:
        tuple[float, LdlFactor]: The score and the factor of the union, numbered ``a.members + b.members``.

    Raises:
        EmptyCutsetError: If the clusters are not adjacent.
    """
    if not cut_edges:
        raise EmptyCutsetError
    index_a, index_b = a.local_index, b.local_index
    union = merge_factors(a.factor, b.factor, [(index_a[u], index_b[v]) for u, v in cut_edges])
    score = (
        delta_lobs(a.stats, b.stats, spec)
        + union.log_det
        - math.log(len(cut_edges))
        - a.log_intra_trees
        - b.log_intra_trees
    )
    return score, union


class AgglomerativeEngine:
    """
    Forward pass over a connected contiguity graph.

    Attributes:
        active (dict[int, ClusterState]): Live clusters by id.
        counters (EngineCounters): Instrumentation of the heap and the factor cache.
    """

    def __init__(self, features: np.ndarray, g: ContiguityGraph, spec: ModelSpec) -> None:
        matrix = as_matrix(features)
        if matrix.shape[0] != g.n:
            raise InvalidInputError(f"{matrix.shape[0]} feature rows for a graph of {g.n} nodes")
        if g.n < 1:
            raise InvalidInputError("Cannot cluster an empty graph")
        if not is_connected(g):
            raise DisconnectedGraphError
        self.graph = g
        self.spec = spec
        self.n = g.n
        self.counters = EngineCounters()
        self.merges: list[Merge] = []
        self.owner = list(range(g.n))
        self.active: dict[int, ClusterState] = {}
        self._adjacency: dict[int, Counter[int]] = {i: Counter() for i in range(g.n)}
        self._heap: list[MergeCandidate] = []
        self._cache = FactorCache(config.FACTOR_CACHE_RATIO, g.edge_count)

        leaf = singleton_factor()
        for node, stats in enumerate(suff_stats_matrix(matrix, spec)):
            self.active[node] = ClusterState(node, (node,), stats, leaf, 0.0, 0)
        for u, v in sorted(g.edges):
            self._adjacency[u][v] += 1
            self._adjacency[v][u] += 1
        for u, v in sorted(g.edges):
            self._score(u, v)

    @property
    def candidate_count(self) -> int:
        return sum(len(neighbours) for neighbours in self._adjacency.values()) // 2

    @property
    def done(self) -> bool:
        return len(self.active) <= 1

    def cut_edges(self, g: int, h: int) -> list[Edge]:
        """Graph edges between clusters ``g`` and ``h``, oriented ``(node of g, node of h)``."""
        a, b = self.active[g], self.active[h]
        if len(a.members) <= len(b.members):
            return [(u, v) for u in a.members for v in self.graph.neighbors[u] if self.owner[v] == h]
        return [(u, v) for v in b.members for u in self.graph.neighbors[v] if self.owner[u] == g]

    def quotient_pairs(self) -> Iterator[tuple[int, int, int]]:
        """Adjacent live pairs ``(g, h, multiplicity)`` with ``g < h``."""
        for g, neighbours in sorted(self._adjacency.items()):
            for h, multiplicity in sorted(neighbours.items()):
                if g < h:
                    yield g, h, multiplicity

    def _stamp(self, g: int, h: int) -> tuple[int, int]:
        return self.active[g].version, self.active[h].version

    def _score(self, g: int, h: int) -> None:
        g, h = min(g, h), max(g, h)
        edges = self.cut_edges(g, h)
        score, union = delta_bound(self.active[g], self.active[h], edges, self.spec)
        stamp = self._stamp(g, h)
        self._cache.put((g, h), stamp, union)
        heapq.heappush(self._heap, MergeCandidate.scored(g, h, stamp, score))
        self.counters.scored += 1

    def _is_stale(self, candidate: MergeCandidate) -> bool:
        if candidate.g not in self.active or candidate.h not in self.active:
            return True
        return self._stamp(candidate.g, candidate.h) != candidate.stamp

    def _contract(self, g: int, h: int, new_id: int) -> Counter[int]:
        merged = self._adjacency.pop(g) + self._adjacency.pop(h)
        del merged[g], merged[h]
        for neighbour, multiplicity in merged.items():
            links = self._adjacency[neighbour]
            links.pop(g, None)
            links.pop(h, None)
            links[new_id] = multiplicity
        self._adjacency[new_id] = merged
        return merged

    def step(self) -> Merge:
        """
        Accept the best valid candidate and rescore the merged cluster's neighbours.

        Raises:
            DisconnectedGraphError: If no adjacent pair remains while several clusters are live.
        """
        while self._heap:
            candidate = heapq.heappop(self._heap)
            if self._is_stale(candidate):
                self.counters.stale_pops += 1
                continue
            break
        else:
            raise DisconnectedGraphError("quotient multigraph")

        g, h = candidate.g, candidate.h
        factor = self._cache.take((g, h), candidate.stamp)
        if factor is None:
            _, factor = delta_bound(self.active[g], self.active[h], self.cut_edges(g, h), self.spec)
        a, b = self.active.pop(g), self.active.pop(h)
        step = len(self.merges)
        new_id = self.n + step
        merged = ClusterState(
            cluster_id=new_id,
            members=a.members + b.members,
            stats=combine(a.stats, b.stats),
            factor=factor,
            log_intra_trees=factor.log_det,
            version=step + 1,
        )
        for node in merged.members:
            self.owner[node] = new_id
        self.active[new_id] = merged
        neighbours = self._contract(g, h, new_id)

        merge = Merge(step, g, h, new_id, candidate.bound_score, factor.log_det)
        self.merges.append(merge)
        logger.debug("Merge %d: %d + %d -> %d (bound %.6g)", step, g, h, new_id, candidate.bound_score)

        scored_before = self.counters.scored
        for neighbour in neighbours:
            self._score(neighbour, new_id)
        self.counters.rescored_per_step.append(self.counters.scored - scored_before)
        self.counters.quotient_degree_per_step.append(len(neighbours))
        self._cache.resize(self.candidate_count)
        self.counters.cache_hits = self._cache.hits
        self.counters.cache_misses = self._cache.misses
        return merge

    def run(self) -> Hierarchy:
        while not self.done:
            self.step()
        logger.debug(
            "Forward pass: %d scored, %d stale pops, cache %d hits / %d misses",
            self.counters.scored,
            self.counters.stale_pops,
            self.counters.cache_hits,
            self.counters.cache_misses,
        )
        return Hierarchy(n=self.n, merges=tuple(self.merges))


def _merge_trees(merges: Sequence[Merge], n: int) -> tuple[dict[int, tuple[int, ...]], dict[int, tuple[int, int]]]:
    members: dict[int, tuple[int, ...]] = {i: (i,) for i in range(n)}
    children: dict[int, tuple[int, int]] = {}
    for merge in merges:
        members[merge.new_id] = members[merge.g] + members[merge.h]
        children[merge.new_id] = (merge.g, merge.h)
    return members, children


def _check_hierarchy(h: Hierarchy) -> None:
    if len(h.merges) != h.n - 1:
        raise InvalidInputError(f"Hierarchy over {h.n} nodes needs {h.n - 1} merges, has {len(h.merges)}")


def clusters_at_k(h: Hierarchy, k: int) -> dict[int, tuple[int, ...]]:
    """Live cluster ids and members after replaying the first ``N - k`` merges."""
    if not 1 <= k <= h.n:
        raise ClusterCountError(k, h.n)
    replay = h.merges[: h.n - k]
    members, _ = _merge_trees(replay, h.n)
    consumed = {merge.g for merge in replay} | {merge.h for merge in replay}
    return {cluster: nodes for cluster, nodes in members.items() if cluster not in consumed}


def cut_at_k(h: Hierarchy, k: int) -> Partition:
    """
    Partition with ``k`` clusters obtained by replaying the first ``N - k`` merges.

    Raises:
        ClusterCountError: If ``k`` is outside ``[1, N]``.
    """
    labels = [0] * h.n
    for cluster, nodes in clusters_at_k(h, k).items():
        for node in nodes:
            labels[node] = cluster
    return Partition.from_assignment(labels)


def backward_pass(
    h: Hierarchy,
    g: ContiguityGraph,
    features: np.ndarray,
    spec: ModelSpec,
    alpha: float = 1.0,
) -> Hierarchy:
    """
    Exact log posterior of every level of the merge tree.

    The quotient Laplacian is kept over a fixed index space where each cluster
    is represented by its largest node; inactive representatives carry an
    identity row. Undoing a merge adds the edges of the split-off cluster
    before removing the edges it no longer shares with the kept cluster, so
    every intermediate matrix stays positive definite.

    Raises:
        InvalidInputError: If the hierarchy is incomplete or does not match the inputs.
        FactorizationError: If a factor update breaks down.
    """
    _check_hierarchy(h)
    matrix = as_matrix(features)
    if matrix.shape[0] != g.n or g.n != h.n:
        raise InvalidInputError(f"Hierarchy over {h.n} nodes, graph of {g.n}, {matrix.shape[0]} feature rows")
    n = h.n
    members, _ = _merge_trees(h.merges, n)
    stats: dict[int, SuffStats] = dict(enumerate(suff_stats_matrix(matrix, spec)))
    log_trees: dict[int, float] = dict.fromkeys(range(n), 0.0)
    for merge in h.merges:
        stats[merge.new_id] = combine(stats[merge.g], stats[merge.h])
        log_trees[merge.new_id] = (
            merge.log_trees
            if merge.log_trees is not None
            else log_tree_count(induced_subgraph(g, members[merge.new_id]))
        )
    rep = {cluster: max(nodes) for cluster, nodes in members.items()}
    log_obs = {cluster: log_marginal(t, spec) for cluster, t in stats.items()}

    log_graph_trees = ldl_factorize(g).log_det
    root = n + len(h.merges) - 1 if h.merges else 0
    rep_of_node = np.full(n, n - 1, dtype=np.int64)
    quotient = factorize_matrix(sparse.diags([1.0] * (n - 1) + [0.0], format="csr"))
    total_obs = log_obs[root]
    total_intra = log_trees[root]

    def posterior(k: int, quotient_log_det: float) -> PosteriorValue:
        prior = total_intra + quotient_log_det - log_graph_trees - log_binomial(n - 1, k - 1) - log_factorial(k)
        return PosteriorValue(log_obs=total_obs, log_partition_prior=prior, log_k_prior=log_k_prior(k, n, alpha))

    per_k = {1: posterior(1, quotient.log_det)}
    for merge in reversed(h.merges):
        k = n - merge.step
        kept, fresh = (merge.g, merge.h) if rep[merge.g] == rep[merge.new_id] else (merge.h, merge.g)
        rep_kept, rep_fresh = rep[kept], rep[fresh]
        rep_of_node[list(members[fresh])] = rep_fresh
        links = Counter(
            int(rep_of_node[v])
            for u in members[fresh]
            for v in g.neighbors[u]
            if rep_of_node[v] != rep_fresh
        )
        for other, multiplicity in sorted(links.items()):
            quotient = rank_one_update(quotient, _pair_vector(n, rep_fresh, other), multiplicity, inplace=True)
        quotient = rank_one_update(quotient, _unit_vector(n, rep_fresh), -1.0, inplace=True)
        for other, multiplicity in sorted(links.items()):
            if other != rep_kept:
                quotient = rank_one_update(quotient, _pair_vector(n, rep_kept, other), -multiplicity, inplace=True)

        total_obs += log_obs[kept] + log_obs[fresh] - log_obs[merge.new_id]
        total_intra += log_trees[kept] + log_trees[fresh] - log_trees[merge.new_id]
        per_k[k] = posterior(k, quotient.log_det)

    map_k = max(per_k, key=lambda k: (per_k[k].total, -k))
    return replace(h, per_k=dict(sorted(per_k.items())), map_k=map_k, alpha=alpha)


def _pair_vector(n: int, u: int, v: int) -> np.ndarray:
    vector = np.zeros(n)
    vector[u] = 1.0
    vector[v] = -1.0
    return vector


def _unit_vector(n: int, u: int) -> np.ndarray:
    vector = np.zeros(n)
    vector[u] = 1.0
    return vector


def fit(features: np.ndarray, g: ContiguityGraph, spec: ModelSpec, alpha: float = 1.0) -> Hierarchy:
    """
    Build the merge tree and the exact per-level posteriors.

    Parameters:
        features (np.ndarray): ``N x dims`` observations, row ``i`` for node ``i``.
        g (ContiguityGraph): Connected contiguity graph.
        spec (ModelSpec): Observation model with resolved hyperparameters.
        alpha (float): Cluster-count prior parameter in ``(0, 1]``.

    Returns:
        Hierarchy: Merges, per-K posteriors and the MAP cluster count.
    """
    started = time.perf_counter()
    engine = AgglomerativeEngine(features, g, spec)
    hierarchy = backward_pass(engine.run(), g, features, spec, alpha)
    logger.info(
        "Clustered %d nodes / %d edges in %.2fs, MAP K = %s",
        g.n,
        g.edge_count,
        time.perf_counter() - started,
        hierarchy.map_k,
    )
    return hierarchy
