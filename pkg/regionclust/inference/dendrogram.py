"""
Regularization path over the cluster-count prior and the resulting dendrogram.

With the truncated geometric prior, the posterior of the best partition with
``K`` clusters is a line in ``log alpha``: ``I_K + (K - 1) log alpha`` plus a
term shared by every ``K``. The upper envelope of these lines is the Pareto
front; its breakpoints are the merge heights ``-log alpha``.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure
from scipy.cluster.hierarchy import dendrogram as scipy_dendrogram

from regionclust.errors import InvalidInputError
from regionclust.graphs import Partition
from regionclust.inference.agglomerative import Hierarchy, Merge, clusters_at_k, cut_at_k
from regionclust.inference.prior import check_alpha

logger = logging.getLogger(__name__)

COINCIDENCE_TOLERANCE = 1e-12


class EmptyFrontError(InvalidInputError):
    def __init__(self) -> None:
        super().__init__("The Pareto front needs at least one line")


class DuplicateSlopeError(InvalidInputError):
    def __init__(self, k: int) -> None:
        super().__init__(f"Several lines given for K={k}")


class IncompleteHierarchyError(InvalidInputError):
    def __init__(self) -> None:
        super().__init__("The hierarchy has no per-K posteriors: run the backward pass first")


@dataclass(frozen=True)
class FrontLine:
    k: int
    intercept: float

    @property
    def slope(self) -> int:
        return self.k - 1

    def at(self, log_alpha: float) -> float:
        return self.intercept + self.slope * log_alpha


@dataclass(frozen=True)
class FrontInterval:
    """``K`` wins for every alpha in ``(exp(log_alpha_low), exp(log_alpha_high)]``."""

    k: int
    log_alpha_low: float
    log_alpha_high: float
    intercept: float

    @property
    def alpha_low(self) -> float:
        return math.exp(self.log_alpha_low)

    @property
    def alpha_high(self) -> float:
        return math.exp(self.log_alpha_high)

    def contains(self, log_alpha: float) -> bool:
        return self.log_alpha_low < log_alpha <= self.log_alpha_high


@dataclass(frozen=True)
class ParetoFront:
    """
    Surviving lines ordered from the winner at ``alpha = 1`` down to ``K = 1``.

    ``breakpoints[i]`` is the ``log alpha`` where ``intervals[i]`` hands over to ``intervals[i + 1]``.
    """

    intervals: tuple[FrontInterval, ...]

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(interval.k for interval in self.intervals)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(interval.log_alpha_low for interval in self.intervals[:-1])

    @property
    def head(self) -> FrontInterval:
        return self.intervals[0]

    def select(self, alpha: float) -> int:
        """Cluster count whose interval contains ``alpha``; breakpoints go to the smaller K."""
        log_alpha = math.log(check_alpha(alpha))
        for interval in self.intervals:
            if interval.contains(log_alpha):
                return interval.k
        return self.intervals[-1].k


def pareto_front(lines: Sequence[FrontLine]) -> ParetoFront:
    """
    Upper envelope of the lines over ``log alpha`` in ``(-inf, 0]``.

    Lines tying within the tolerance keep the smaller ``K``.

    Raises:
        EmptyFrontError: If ``lines`` is empty.
        DuplicateSlopeError: If two lines share a ``K``.
    """
    if not lines:
        raise EmptyFrontError
    seen: set[int] = set()
    for line in lines:
        if line.k in seen:
            raise DuplicateSlopeError(line.k)
        seen.add(line.k)

    ordered = sorted(lines, key=lambda line: line.k)
    slopes = np.array([line.slope for line in ordered], dtype=np.float64)
    intercepts = np.array([line.intercept for line in ordered])

    best = intercepts.max()
    current = int(np.flatnonzero(intercepts >= best - COINCIDENCE_TOLERANCE)[0])
    position = 0.0
    intervals: list[FrontInterval] = []
    while True:
        lower = np.flatnonzero(slopes < slopes[current])
        if lower.size == 0:
            intervals.append(FrontInterval(ordered[current].k, -math.inf, position, ordered[current].intercept))
            break
        crossings = (intercepts[lower] - intercepts[current]) / (slopes[current] - slopes[lower])
        crossings = np.minimum(crossings, position)
        latest = crossings.max()
        successor = int(lower[np.flatnonzero(crossings >= latest - COINCIDENCE_TOLERANCE)[0]])
        intervals.append(FrontInterval(ordered[current].k, float(latest), position, ordered[current].intercept))
        current, position = successor, float(latest)
    return ParetoFront(intervals=tuple(intervals))


def front_lines(h: Hierarchy) -> list[FrontLine]:
    """One line per cluster count, built from the exact per-K posteriors."""
    if not h.per_k:
        raise IncompleteHierarchyError
    return [FrontLine(k=k, intercept=value.intercept) for k, value in sorted(h.per_k.items())]


@dataclass(frozen=True)
class MergeLevel:
    height: float
    merges: tuple[Merge, ...]


@dataclass(frozen=True)
class Dendrogram:
    """
    Merge tree restricted to the Pareto front.

    Parameters:
        leaves (dict[int, tuple[int, ...]]): Clusters of the front's head K, by cluster id.
        leaf_order (tuple[int, ...]): Left-to-right order of the leaf cluster ids.
        levels (tuple[MergeLevel, ...]): Merges grouped by height, lowest first.
        base_merges (tuple[Merge, ...]): Merges below the head K, drawn at height 0.
        front (ParetoFront): The surviving intervals.
    """

    leaves: dict[int, tuple[int, ...]]
    leaf_order: tuple[int, ...]
    levels: tuple[MergeLevel, ...]
    base_merges: tuple[Merge, ...]
    front: ParetoFront

    @property
    def heights(self) -> tuple[float, ...]:
        return tuple(level.height for level in self.levels)

    def to_linkage(self) -> np.ndarray:
        """
        Linkage matrix over the leaf clusters, children ordered as in ``leaf_order``.

        Returns:
            np.ndarray: ``(leaves - 1) x 4`` rows ``[left, right, height, size]``.
        """
        index = {cluster: position for position, cluster in enumerate(self.leaf_order)}
        size = {cluster: len(members) for cluster, members in self.leaves.items()}
        first = {cluster: index[cluster] for cluster in self.leaf_order}
        rows: list[list[float]] = []
        for level in self.levels:
            for merge in level.merges:
                left, right = sorted((merge.g, merge.h), key=first.__getitem__)
                index[merge.new_id] = len(self.leaf_order) + len(rows)
                size[merge.new_id] = size[left] + size[right]
                first[merge.new_id] = first[left]
                rows.append([index[left], index[right], level.height, size[merge.new_id]])
        return np.array(rows, dtype=np.float64).reshape(-1, 4)


def _leaf_order(h: Hierarchy, leaves: dict[int, tuple[int, ...]]) -> tuple[int, ...]:
    children = {merge.new_id: (merge.g, merge.h) for merge in h.merges}
    smallest = {cluster: min(members) for cluster, members in leaves.items()}
    for merge in h.merges:
        if merge.new_id not in leaves and merge.g in smallest and merge.h in smallest:
            smallest[merge.new_id] = min(smallest[merge.g], smallest[merge.h])
    root = h.merges[-1].new_id if h.merges else 0
    order: list[int] = []
    stack = [root]
    while stack:
        cluster = stack.pop()
        if cluster in leaves:
            order.append(cluster)
            continue
        left, right = sorted(children[cluster], key=smallest.__getitem__)
        stack.extend([right, left])
    return tuple(order)


def build_dendrogram(h: Hierarchy, front: ParetoFront | None = None) -> Dendrogram:
    """
    Group the merges between consecutive surviving cluster counts at their tipping height.

    Parameters:
        h (Hierarchy): Hierarchy with per-K posteriors.
        front (ParetoFront | None): Front of ``h``; computed when omitted.

    Returns:
        Dendrogram: Levels at heights ``-log alpha*``, non-decreasing towards the root.
    """
    front = front or pareto_front(front_lines(h))
    ks = front.ks
    head = ks[0]
    leaves = clusters_at_k(h, head)
    base = h.merges[: h.n - head]
    levels = [
        MergeLevel(height=-breakpoint, merges=h.merges[h.n - upper : h.n - lower])
        for upper, lower, breakpoint in zip(ks, ks[1:], front.breakpoints, strict=True)
    ]
    logger.debug("Dendrogram: %d leaves, %d levels, %d base merges", len(leaves), len(levels), len(base))
    return Dendrogram(
        leaves=leaves,
        leaf_order=_leaf_order(h, leaves),
        levels=tuple(levels),
        base_merges=tuple(base),
        front=front,
    )


def map_partition_at_alpha(h: Hierarchy, front: ParetoFront, alpha: float) -> Partition:
    """
    MAP partition along the path for a given ``alpha``.

    Raises:
        InvalidAlphaError: If ``alpha`` is outside ``(0, 1]``.
    """
    return cut_at_k(h, front.select(alpha))


def render_dendrogram(tree: Dendrogram, path: Path | str, title: str | None = None) -> Path:
    """
    Draw the dendrogram with heights ``-log alpha`` on the vertical axis.

    The output format follows the file suffix (``.svg``, ``.pdf``, ``.png``).
    """
    path = Path(path)
    figure = Figure(figsize=(max(6.0, 0.3 * len(tree.leaf_order)), 4.5))
    axes = figure.add_subplot()
    labels = [f"{cluster} ({len(tree.leaves[cluster])})" for cluster in tree.leaf_order]
    if len(tree.leaf_order) > 1:
        scipy_dendrogram(tree.to_linkage(), ax=axes, labels=labels, color_threshold=0, above_threshold_color="k")
    else:
        axes.text(0.5, 0.0, labels[0], ha="center", va="bottom")
        axes.set_xticks([])
    axes.set_ylabel("-log(alpha)")
    if title:
        axes.set_title(title)
    figure.tight_layout()
    figure.savefig(path)
    logger.info("Dendrogram written to %s", path)
    return path
