"""
Brute-force references for small instances.

Everything here is exponential in the graph size and guarded by an
``EnumerationBudget``; these routines exist to cross-check the fast paths.
"""

import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, optimize
from scipy.cluster.hierarchy import DisjointSet

from regionclust.config import config
from regionclust.errors import InvalidInputError, NumericalError
from regionclust.graphs import (
    ContiguityGraph,
    MultiGraph,
    Partition,
    contract_edge,
    from_edge_list,
    induced_subgraph,
    is_connected,
)
from regionclust.inference.prior import InfeasiblePartition, PosteriorValue, check_alpha, log_posterior
from regionclust.models import GaussianSpec, ModelSpec

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
QUADRATURE_RTOL = 1e-6


class BudgetExceededError(InvalidInputError):
    def __init__(self, what: str, limit: int) -> None:
        super().__init__(f"Enumeration budget exceeded: {what} above {limit}")


class QuadratureError(NumericalError):
    def __init__(self, value: float, error: float) -> None:
        super().__init__(f"Quadrature did not converge: estimate {value:.6g}, error bound {error:.3g}")


@dataclass(frozen=True)
class EnumerationBudget:
    max_nodes: int = field(default_factory=lambda: config.ORACLE_MAX_NODES)
    max_trees: int = field(default_factory=lambda: config.ORACLE_MAX_TREES)
    max_partitions: int = field(default_factory=lambda: config.ORACLE_MAX_PARTITIONS)

    def check_nodes(self, n: int) -> None:
        if n > self.max_nodes:
            raise BudgetExceededError("node count", self.max_nodes)


def _as_multigraph(g: ContiguityGraph | MultiGraph) -> MultiGraph:
    if isinstance(g, MultiGraph):
        return g
    return MultiGraph(n=g.n, edges=dict.fromkeys(g.edges, 1))


@lru_cache(maxsize=65536)
def _deletion_contraction(n: int, edges: tuple[tuple[tuple[int, int], int], ...]) -> int:
    if n <= 1:
        return 1
    graph = MultiGraph(n=n, edges=dict(edges))
    if not is_connected(graph):
        return 0
    (g, h), multiplicity = edges[0]
    contracted = contract_edge(graph, g, h)
    deleted = graph.without_edge(g, h)
    return multiplicity * _deletion_contraction(contracted.n, tuple(contracted.edges.items())) + _deletion_contraction(
        deleted.n,
        tuple(deleted.edges.items()),
    )


def count_spanning_trees(g: ContiguityGraph | MultiGraph, budget: EnumerationBudget | None = None) -> int:
    """
    Exact spanning-tree count by deletion-contraction with memoization.

    Raises:
        BudgetExceededError: If ``g`` has more nodes than the budget allows.
    """
    budget = budget or EnumerationBudget()
    budget.check_nodes(g.n)
    mg = _as_multigraph(g)
    return _deletion_contraction(mg.n, tuple(mg.edges.items()))


def _distinct_edges(g: ContiguityGraph | MultiGraph) -> list[tuple[int, int]]:
    mg = _as_multigraph(g)
    return [pair for pair, multiplicity in mg.edges.items() for _ in range(multiplicity)]


def enumerate_spanning_trees(
    g: ContiguityGraph | MultiGraph,
    budget: EnumerationBudget | None = None,
) -> list[tuple[tuple[int, int], ...]]:
    """
    Every spanning tree as a tuple of edges; parallel copies give distinct trees.

    Candidate edge subsets of size ``n - 1`` are filtered with a disjoint-set forest.

    Raises:
        BudgetExceededError: If the node count or the number of subsets to test is too large.
    """
    budget = budget or EnumerationBudget()
    budget.check_nodes(g.n)
    if g.n <= 1:
        return [()]
    edges = _distinct_edges(g)
    if math.comb(len(edges), g.n - 1) > budget.max_trees:
        raise BudgetExceededError("edge subsets", budget.max_trees)
    trees: list[tuple[tuple[int, int], ...]] = []
    for subset in itertools.combinations(range(len(edges)), g.n - 1):
        forest = DisjointSet(range(g.n))
        if all(forest.merge(*edges[index]) for index in subset):
            trees.append(tuple(edges[index] for index in subset))
    return trees


def count_compatible_trees(
    g: ContiguityGraph,
    p: Partition,
    budget: EnumerationBudget | None = None,
) -> int:
    """Spanning trees in which every cluster keeps ``|cluster| - 1`` internal edges."""
    sizes = [len(cluster) for cluster in p.clusters]
    count = 0
    for tree in enumerate_spanning_trees(g, budget):
        inside = [0] * p.k
        for u, v in tree:
            if p.assignment[u] == p.assignment[v]:
                inside[p.assignment[u]] += 1
        count += all(inside[c] == sizes[c] - 1 for c in range(p.k))
    return count


def _restricted_growth(n: int, k: int) -> Iterator[list[int]]:
    # each node's label is at most one more than the largest label before it
    def extend(prefix: list[int], largest: int) -> Iterator[list[int]]:
        remaining = n - len(prefix)
        if remaining == 0:
            if largest + 1 == k:
                yield prefix
            return
        if largest + 1 + remaining < k:
            return
        for label in range(min(largest + 2, k)):
            yield from extend([*prefix, label], max(largest, label))

    if n == 0:
        return
    yield from extend([0], 0)


def enumerate_compatible_partitions(
    g: ContiguityGraph,
    k: int,
    budget: EnumerationBudget | None = None,
    *,
    ordered: bool = True,
) -> list[Partition]:
    """
    Partitions of ``g`` into ``k`` connected clusters.

    With ``ordered`` every permutation of the clusters is listed separately,
    matching the support of the partition prior.

    Raises:
        BudgetExceededError: If the node count or the partition count is too large.
    """
    budget = budget or EnumerationBudget()
    budget.check_nodes(g.n)
    if not 1 <= k <= g.n:
        return []
    found: list[Partition] = []
    for labels in _restricted_growth(g.n, k):
        clusters = [[node for node in range(g.n) if labels[node] == c] for c in range(k)]
        if not all(is_connected(induced_subgraph(g, cluster)) for cluster in clusters):
            continue
        orderings = itertools.permutations(clusters) if ordered else [clusters]
        for arrangement in orderings:
            found.append(Partition.from_clusters(list(arrangement), g.n))
            if len(found) > budget.max_partitions:
                raise BudgetExceededError("partition count", budget.max_partitions)
    return found


@dataclass(frozen=True)
class ExhaustiveResult:
    partition: Partition
    value: PosteriorValue


def exhaustive_map(
    features: np.ndarray,
    g: ContiguityGraph,
    spec: ModelSpec,
    alpha: float = 1.0,
    budget: EnumerationBudget | None = None,
) -> ExhaustiveResult:
    """
    Global MAP partition over every compatible partition and every K.

    Ties keep the smaller K, then the first partition found.
    """
    check_alpha(alpha)
    best: ExhaustiveResult | None = None
    for k in range(1, g.n + 1):
        for partition in enumerate_compatible_partitions(g, k, budget, ordered=False):
            value = log_posterior(features, g, partition, spec, alpha)
            if isinstance(value, InfeasiblePartition):
                continue
            if best is None or value.total > best.value.total:
                best = ExhaustiveResult(partition=partition, value=value)
    if best is None:
        raise InvalidInputError("No compatible partition exists")
    return best


def quadrature_marginal(points: Sequence[float], spec: GaussianSpec) -> float:
    """
    Log marginal likelihood of 1-d points under the Normal-Gamma prior by 2-d quadrature.

    The integral runs over ``s = log V`` and ``mu``, scaled by the joint density at its mode.

    Raises:
        InvalidInputError: If ``spec`` is not one-dimensional.
        QuadratureError: If the error estimate exceeds the relative tolerance.
    """
    if spec.dims != 1:
        raise InvalidInputError("Quadrature marginal is defined for one-dimensional models")
    x = np.asarray(points, dtype=np.float64)
    n = x.size
    if n == 0:
        return 0.0
    mu0, tau, kappa, beta = spec.mu0[0], spec.tau, spec.kappa, spec.beta[0]
    log_prior_norm = kappa * math.log(beta) - math.lgamma(kappa) + 0.5 * math.log(tau) - 0.5 * LOG_2PI

    def log_joint(mu: float, s: float) -> float:
        precision = math.exp(s)
        residual = float(np.dot(x - mu, x - mu))
        log_likelihood = -0.5 * n * LOG_2PI + 0.5 * n * s - 0.5 * precision * residual
        log_prior = log_prior_norm + 0.5 * s - 0.5 * tau * precision * (mu - mu0) ** 2 + kappa * s - beta * precision
        return log_likelihood + log_prior

    start = np.array([float(x.mean()), -math.log(float(x.var()) + beta / kappa)])
    mode = optimize.minimize(lambda v: -log_joint(v[0], v[1]), start, method="Nelder-Mead", options={"xatol": 1e-10})
    mu_mode, s_mode = float(mode.x[0]), float(mode.x[1])
    shift = log_joint(mu_mode, s_mode)
    centre = (tau * mu0 + float(x.sum())) / (tau + n)

    def mu_range(s: float) -> tuple[float, float]:
        width = 14.0 / math.sqrt((tau + n) * math.exp(s))
        return centre - width, centre + width

    value, error = integrate.nquad(
        lambda mu, s: math.exp(log_joint(mu, s) - shift),
        [mu_range, (s_mode - 60.0, s_mode + 8.0)],
        opts=[{"epsabs": 0.0, "epsrel": 1e-10}, {"epsabs": 0.0, "epsrel": 1e-8, "points": [s_mode], "limit": 200}],
    )
    if not value > 0 or error > QUADRATURE_RTOL * value:
        raise QuadratureError(value, error)
    return math.log(value) + shift


def random_connected_graph(n: int, extra_edge_probability: float, rng: np.random.Generator) -> ContiguityGraph:
    """Random labelled tree grown by attachment, plus each remaining pair with the given probability."""
    pairs = [(int(rng.integers(node)), node) for node in range(1, n)]
    present = {tuple(sorted(pair)) for pair in pairs}
    for u, v in itertools.combinations(range(n), 2):
        if (u, v) not in present and rng.random() < extra_edge_probability:
            pairs.append((u, v))
    return from_edge_list(n, pairs)


def random_multigraph(n: int, rng: np.random.Generator, max_multiplicity: int = 3) -> MultiGraph:
    """Connected multigraph with multiplicities drawn uniformly in ``[1, max_multiplicity]``."""
    base = random_connected_graph(n, 0.4, rng)
    return MultiGraph(n=n, edges={pair: int(rng.integers(1, max_multiplicity + 1)) for pair in sorted(base.edges)})
