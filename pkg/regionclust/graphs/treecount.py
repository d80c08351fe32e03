"""
Spanning-tree counting through the matrix-tree theorem.

A graph's Laplacian with its highest-numbered row and column removed (the
"ground") is factorized as ``U D U^T``; the log spanning-tree count is
``sum(log D)``. Factors are maintained under cluster merges and edge removals
with signed rank-1 updates instead of refactorizing.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np
from numba import njit
from scipy import sparse
from scipy.sparse.csgraph import reverse_cuthill_mckee

from regionclust.config import config
from regionclust.errors import InvalidInputError, NumericalError
from regionclust.graphs.multigraph import (
    ContiguityGraph,
    InvalidPartitionError,
    MultiGraph,
    Partition,
    induced_subgraph,
    is_connected,
    quotient_multigraph,
)

logger = logging.getLogger(__name__)


class DisconnectedGraphError(InvalidInputError):
    def __init__(self, what: str = "graph") -> None:
        super().__init__(f"The {what} is disconnected: it has no spanning tree")


class DisconnectedClusterError(DisconnectedGraphError):
    def __init__(self, cluster: int) -> None:
        self.cluster = cluster
        super().__init__(f"subgraph induced by cluster {cluster}")


class EmptyCutsetError(InvalidInputError):
    def __init__(self) -> None:
        super().__init__("Merging requires at least one cut edge")


class FactorizationError(NumericalError):
    def __init__(self, reason: str) -> None:
        super().__init__(f"Factorization failed: {reason}")


@dataclass(frozen=True)
class LdlFactor:
    """
    ``U D U^T`` factor of a grounded symmetric matrix.

    The full ``n x n`` matrix is kept as coordinate triplets with repeats
    summed; it is only assembled when a refactorization is due.

    Parameters:
        n (int): Size of the full matrix; the factor covers its leading ``n - 1`` rows and columns.
        rows (np.ndarray): Row of each matrix term.
        cols (np.ndarray): Column of each matrix term.
        values (np.ndarray): Value of each matrix term.
        order (np.ndarray): Node of each factor position (fill-reducing permutation).
        unit_lower (np.ndarray): Dense unit lower triangular ``U`` (Fortran order).
        diag (np.ndarray): Pivots ``D``.
        updates (int): Rank-1 updates applied since the last fresh factorization.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    order: np.ndarray
    unit_lower: np.ndarray
    diag: np.ndarray
    updates: int = 0

    @property
    def matrix(self) -> sparse.csr_matrix:
        return sparse.csr_matrix((self.values, (self.rows, self.cols)), shape=(self.n, self.n))

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    @property
    def ground(self) -> int:
        return self.n - 1

    @property
    def log_det(self) -> float:
        return float(np.sum(np.log(self.diag))) if self.dim else 0.0

    def positions(self) -> np.ndarray:
        """Inverse of ``order``; the ground maps to -1."""
        position = np.full(self.n, -1, dtype=np.int64)
        position[self.order] = np.arange(self.dim)
        return position

    def reconstruct(self) -> np.ndarray:
        """``U D U^T``, comparable to ``permuted_matrix()``."""
        return (self.unit_lower * self.diag) @ self.unit_lower.T

    def permuted_matrix(self) -> np.ndarray:
        reduced = self.matrix[:-1, :-1].toarray()
        return reduced[np.ix_(self.order, self.order)]


@njit(cache=True)
def _ldl_rank_one(unit_lower, diag, vector, weight, start, tolerance):  # noqa: ANN001, ANN202
    # Returns -1 on success, otherwise the position that lost positive definiteness.
    n = diag.shape[0]
    alpha = weight
    for j in range(start, n):
        p = vector[j]
        d_old = diag[j]
        if p == 0.0 or (d_old == 0.0 and abs(p) < tolerance):
            continue
        d_new = d_old + alpha * p * p
        if d_new <= tolerance * max(d_old, 1.0):
            return j
        beta = p * alpha / d_new
        alpha = d_old * alpha / d_new
        diag[j] = d_new
        for i in range(j + 1, n):
            vector[i] -= p * unit_lower[i, j]
            unit_lower[i, j] += beta * vector[i]
        if alpha == 0.0:
            break
    return -1


def _apply_rank_one(
    unit_lower: np.ndarray,
    diag: np.ndarray,
    position: np.ndarray,
    support: np.ndarray,
    entries: np.ndarray,
    weight: float,
) -> None:
    # support and entries are node-indexed; the ground has position -1.
    inside = position[support] >= 0
    if not inside.any():
        return
    slots = position[support[inside]]
    permuted = np.zeros(diag.shape[0])
    permuted[slots] = entries[inside]
    failed = _ldl_rank_one(unit_lower, diag, permuted, float(weight), int(slots.min()), config.PIVOT_TOLERANCE)
    if failed >= 0:
        raise FactorizationError(f"pivot {failed} lost positive definiteness")


def _outer_terms(support: np.ndarray, entries: np.ndarray, weight: float) -> tuple[np.ndarray, ...]:
    rows, cols = np.meshgrid(support, support, indexing="ij")
    return rows.ravel(), cols.ravel(), weight * np.outer(entries, entries).ravel()


def _empty_factor(n: int) -> LdlFactor:
    return LdlFactor(
        n=n,
        rows=np.zeros(0, dtype=np.int64),
        cols=np.zeros(0, dtype=np.int64),
        values=np.zeros(0),
        order=np.zeros(0, dtype=np.int64),
        unit_lower=np.zeros((0, 0), order="F"),
        diag=np.zeros(0),
    )


def factorize_matrix(matrix: sparse.spmatrix) -> LdlFactor:
    """
    Fresh factorization of ``matrix[:-1, :-1]`` under a reverse Cuthill-McKee ordering.

    Raises:
        FactorizationError: If the grounded matrix is not positive definite.
    """
    full = sparse.csr_matrix(matrix, dtype=np.float64)
    full.sum_duplicates()
    if full.shape[0] <= 1:
        return _empty_factor(full.shape[0])
    reduced = full[:-1, :-1].tocsr()
    order = np.asarray(reverse_cuthill_mckee(reduced, symmetric_mode=True), dtype=np.int64)
    dense = reduced[order][:, order].toarray()
    try:
        lower = np.linalg.cholesky(dense)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError("grounded matrix is not positive definite") from exc
    pivots = np.diag(lower).copy()
    terms = full.tocoo()
    return LdlFactor(
        n=full.shape[0],
        rows=terms.row.astype(np.int64),
        cols=terms.col.astype(np.int64),
        values=terms.data,
        order=order,
        unit_lower=np.asfortranarray(lower / pivots),
        diag=pivots**2,
    )


def _refresh_if_due(factor: LdlFactor) -> LdlFactor:
    if factor.updates < config.FACTOR_REFRESH_UPDATES:
        return factor
    logger.debug("Refactorizing %d x %d factor after %d updates", factor.dim, factor.dim, factor.updates)
    return factorize_matrix(factor.matrix)


def rank_one_update(factor: LdlFactor, vector: np.ndarray, weight: float, *, inplace: bool = False) -> LdlFactor:
    """
    Factor of ``matrix + weight * vector vector^T``.

    ``vector`` is indexed by node; its ground component is ignored in the
    factor but kept in ``matrix``. A negative weight is a downdate.

    Raises:
        FactorizationError: If the result is not positive definite.
    """
    vector = np.asarray(vector, dtype=np.float64)
    support = np.flatnonzero(vector)
    unit_lower = factor.unit_lower if inplace else factor.unit_lower.copy(order="F")
    diag = factor.diag if inplace else factor.diag.copy()
    if factor.dim:
        _apply_rank_one(unit_lower, diag, factor.positions(), support, vector[support], weight)
    rows, cols, values = _outer_terms(support, vector[support], weight)
    updated = replace(
        factor,
        rows=np.concatenate([factor.rows, rows]),
        cols=np.concatenate([factor.cols, cols]),
        values=np.concatenate([factor.values, values]),
        unit_lower=unit_lower,
        diag=diag,
        updates=factor.updates + 1,
    )
    return _refresh_if_due(updated)


def ldl_factorize(g: ContiguityGraph | MultiGraph) -> LdlFactor:
    """
    Factor of the grounded Laplacian of ``g``.

    Raises:
        DisconnectedGraphError: If ``g`` has no spanning tree.
    """
    if not is_connected(g):
        raise DisconnectedGraphError
    return factorize_matrix(g.laplacian())


def log_tree_count(g: ContiguityGraph | MultiGraph) -> float:
    """Natural log of the number of spanning trees, parallel edges counted distinctly."""
    if g.n <= 1:
        return 0.0
    return ldl_factorize(g).log_det


def _edge_vector(n: int, u: int, v: int) -> np.ndarray:
    vector = np.zeros(n)
    vector[u] += 1.0
    vector[v] -= 1.0
    return vector


def merge_factors(fa: LdlFactor, fb: LdlFactor, cut_edges: Sequence[tuple[int, int]]) -> LdlFactor:
    """
    Factor of the union of two connected graphs joined by ``cut_edges``.

    Nodes of ``fa`` keep their numbering, nodes of ``fb`` are shifted by
    ``fa.n``; each cut edge is ``(node in a, node in b)`` in the original
    local numberings. ``fa.matrix`` must be a Laplacian: its grounded node is
    reinstated with a zero pivot before the cut edges are added.

    Raises:
        EmptyCutsetError: If ``cut_edges`` is empty.
        FactorizationError: If the union is not connected.
    """
    if not cut_edges:
        raise EmptyCutsetError
    na, nb = fa.n, fb.n
    n = na + nb
    # Laplacian rows sum to zero, so the a-block ground row of U is -1^T U_a.
    unit_lower = np.zeros((n - 1, n - 1), order="F")
    unit_lower[: na - 1, : na - 1] = fa.unit_lower
    unit_lower[na - 1, : na - 1] = -fa.unit_lower.sum(axis=0)
    unit_lower[na - 1, na - 1] = 1.0
    unit_lower[na:, na:] = fb.unit_lower
    diag = np.concatenate([fa.diag, [0.0], fb.diag])
    order = np.concatenate([fa.order, [na - 1], fb.order + na]).astype(np.int64)
    position = np.full(n, -1, dtype=np.int64)
    position[order] = np.arange(n - 1)

    ends = np.asarray(cut_edges, dtype=np.int64).reshape(-1, 2) + np.array([0, na])
    signs = np.array([1.0, -1.0])
    for pair in ends:
        _apply_rank_one(unit_lower, diag, position, pair, signs, 1.0)
    if diag.min() <= 0.0:
        raise FactorizationError("merged subgraph is disconnected")

    # each cut edge (u, v) adds +1 at (u, u) and (v, v), -1 at (u, v) and (v, u)
    cut_rows = np.concatenate([ends[:, 0], ends[:, 1], ends[:, 0], ends[:, 1]])
    cut_cols = np.concatenate([ends[:, 0], ends[:, 1], ends[:, 1], ends[:, 0]])
    cut_values = np.repeat([1.0, 1.0, -1.0, -1.0], len(ends))
    merged = LdlFactor(
        n=n,
        rows=np.concatenate([fa.rows, fb.rows + na, cut_rows]),
        cols=np.concatenate([fa.cols, fb.cols + na, cut_cols]),
        values=np.concatenate([fa.values, fb.values, cut_values]),
        order=order,
        unit_lower=unit_lower,
        diag=diag,
        updates=fa.updates + fb.updates + len(ends),
    )
    return _refresh_if_due(merged)



def downdate_factor(f: LdlFactor, removed_edges: Sequence[tuple[int, int]]) -> LdlFactor:
    """
    Factor with the rank-1 terms of ``removed_edges`` subtracted.

    Each pair removes one parallel copy of the edge.

    Raises:
        DisconnectedGraphError: If the removal disconnects the graph.
    """
    factor = f
    for u, v in removed_edges:
        try:
            factor = rank_one_update(factor, _edge_vector(f.n, u, v), -1.0)
        except FactorizationError as exc:
            raise DisconnectedGraphError("graph after edge removal") from exc
    return factor


def log_compatible_tree_count(g: ContiguityGraph, p: Partition) -> float:
    """
    Log count of spanning trees in which every cluster induces a connected subtree.

    Intra-cluster tree counts multiply with the tree count of the quotient multigraph.

    Raises:
        DisconnectedClusterError: If a cluster does not induce a connected subgraph.
        DisconnectedGraphError: If the quotient multigraph is disconnected.
    """
    if p.n != g.n:
        raise InvalidPartitionError(f"partition covers {p.n} nodes, graph has {g.n}")
    total = 0.0
    for index, cluster in enumerate(p.clusters):
        subgraph = induced_subgraph(g, cluster)
        if not is_connected(subgraph):
            raise DisconnectedClusterError(index)
        total += log_tree_count(subgraph)
    quotient: MultiGraph = quotient_multigraph(g, p)
    if not is_connected(quotient):
        raise DisconnectedGraphError("quotient multigraph")
    return total + log_tree_count(quotient)
