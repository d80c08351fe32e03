"""Spanning-tree partition prior, cluster-count prior and the exact log posterior."""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from regionclust.errors import InvalidInputError
from regionclust.graphs import (
    ContiguityGraph,
    DisconnectedGraphError,
    InvalidPartitionError,
    Partition,
    induced_subgraph,
    is_connected,
    log_compatible_tree_count,
    log_tree_count,
)
from regionclust.models import ModelSpec, as_matrix, cluster_stats, log_marginal

ALPHA_ONE_TOLERANCE = 1e-12


class InvalidAlphaError(InvalidInputError):
    def __init__(self, alpha: float) -> None:
        super().__init__(f"alpha must lie in (0, 1], got {alpha}")


class ClusterCountError(InvalidInputError):
    def __init__(self, k: int, n: int) -> None:
        super().__init__(f"Cluster count {k} out of range [1, {n}]")


@dataclass(frozen=True)
class InfeasiblePartition:
    """A partition with zero prior mass: some cluster is not connected in the graph."""

    cluster: int
    reason: str

    @property
    def log_value(self) -> float:
        return -np.inf


@dataclass(frozen=True)
class PosteriorValue:
    """
    Un-normalized log posterior of one partition, split by term.

    Parameters:
        log_obs (float): Sum of the clusters' integrated log-likelihoods.
        log_partition_prior (float): Log prior of the partition given the graph and K.
        log_k_prior (float): Log prior of the cluster count.
    """

    log_obs: float
    log_partition_prior: float
    log_k_prior: float

    @property
    def total(self) -> float:
        return self.log_obs + self.log_partition_prior + self.log_k_prior

    @property
    def intercept(self) -> float:
        """The part that does not depend on alpha."""
        return self.log_obs + self.log_partition_prior


def check_alpha(alpha: float) -> float:
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlphaError(alpha)
    return float(alpha)


def log_binomial(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def log_factorial(k: int) -> float:
    return float(gammaln(k + 1))


def log_k_prior(k: int, n: int, alpha: float) -> float:
    """
    Truncated geometric log mass of ``k`` clusters among ``1..n``.

    ``alpha^(k-1) (1 - alpha) / (1 - alpha^n)``, uniform ``1 / n`` at ``alpha = 1``.

    Raises:
        ClusterCountError: If ``k`` is outside ``[1, n]``.
        InvalidAlphaError: If ``alpha`` is outside ``(0, 1]``.
    """
    if not 1 <= k <= n:
        raise ClusterCountError(k, n)
    alpha = check_alpha(alpha)
    if abs(1.0 - alpha) < ALPHA_ONE_TOLERANCE:
        return -float(np.log(n))
    log_alpha = np.log(alpha)
    return float((k - 1) * log_alpha + np.log1p(-alpha) - np.log(-np.expm1(n * log_alpha)))


@dataclass(frozen=True)
class KPrior:
    alpha: float
    n: int

    def __post_init__(self) -> None:
        check_alpha(self.alpha)
        if self.n < 1:
            raise ClusterCountError(1, self.n)

    def log_mass(self, k: int) -> float:
        return log_k_prior(k, self.n, self.alpha)

    def log_masses(self) -> np.ndarray:
        return np.array([self.log_mass(k) for k in range(1, self.n + 1)])


def log_partition_prior(g: ContiguityGraph, p: Partition) -> float | InfeasiblePartition:
    """
    Log prior of a partition under the uniform spanning-tree construction.

    Compatible spanning trees over all spanning trees, divided by the number
    of ways to cut ``K - 1`` tree edges and to order the clusters.

    Raises:
        DisconnectedGraphError: If ``g`` itself is disconnected.
    """
    if p.n != g.n:
        raise InvalidPartitionError(f"partition covers {p.n} nodes, graph has {g.n}")
    if not is_connected(g):
        raise DisconnectedGraphError
    for index, cluster in enumerate(p.clusters):
        if not is_connected(induced_subgraph(g, cluster)):
            return InfeasiblePartition(cluster=index, reason=f"cluster {index} does not induce a connected subgraph")
    return (
        log_compatible_tree_count(g, p)
        - log_tree_count(g)
        - log_binomial(g.n - 1, p.k - 1)
        - log_factorial(p.k)
    )


def log_obs_of(features: np.ndarray, p: Partition, spec: ModelSpec) -> float:
    return sum(log_marginal(cluster_stats(features, cluster, spec), spec) for cluster in p.clusters)


def log_posterior(
    features: np.ndarray,
    g: ContiguityGraph,
    p: Partition,
    spec: ModelSpec,
    alpha: float = 1.0,
) -> PosteriorValue | InfeasiblePartition:
    """
    Exact un-normalized log posterior of ``p``.

    Raises:
        InvalidInputError: If the feature rows do not match the graph nodes.
    """
    matrix = as_matrix(features)
    if matrix.shape[0] != g.n:
        raise InvalidInputError(f"{matrix.shape[0]} feature rows for a graph of {g.n} nodes")
    prior = log_partition_prior(g, p)
    if isinstance(prior, InfeasiblePartition):
        return prior
    return PosteriorValue(
        log_obs=log_obs_of(matrix, p, spec),
        log_partition_prior=prior,
        log_k_prior=log_k_prior(p.k, g.n, alpha),
    )
