"""
The result document written by ``regionclust cluster``.

The document is schema-versioned JSON. Replaying ``merges`` reproduces every
entry of ``assignments``; only the ``run`` record differs between two runs
with identical inputs.
"""

import math
from collections.abc import Iterable, Mapping
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, JsonValue

from regionclust.graphs import ContiguityGraph
from regionclust.inference import (
    Dendrogram,
    FrontInterval,
    Hierarchy,
    IncompleteHierarchyError,
    Merge,
    MergeLevel,
    ParetoFront,
    PosteriorValue,
    cut_at_k,
)
from regionclust.models import ModelSpec

FORMAT_VERSION = 1


def package_version() -> str:
    try:
        return version("regionclust")
    except PackageNotFoundError:
        return "unknown"


class _Record(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class MergeRecord(_Record):
    step: int
    g: int
    h: int
    new_id: int
    bound_score: float
    log_trees: float | None = None


class PosteriorRow(_Record):
    k: int
    log_obs: float
    log_prior: float
    log_k_prior: float
    total: float


class LeafRecord(_Record):
    cluster: int
    members: list[int]


class LevelRecord(_Record):
    height: float
    merges: list[tuple[int, int, int]] = Field(description="(g, h, new_id) of each merge at this height")


class IntervalRecord(_Record):
    """``log_alpha_low`` is null for the interval reaching down to ``alpha = 0``."""

    k: int
    log_alpha_low: float | None
    log_alpha_high: float
    alpha_low: float
    alpha_high: float
    log_posterior_intercept: float


class DendrogramRecord(_Record):
    leaves: list[LeafRecord]
    levels: list[LevelRecord]
    front: list[IntervalRecord]


class Metadata(_Record):
    n: int
    edges: int
    alpha: float
    model: ModelSpec
    options: dict[str, JsonValue] = Field(default_factory=dict)


class RunInfo(_Record):
    created_at: datetime
    runtime_seconds: float
    regionclust_version: str


class ResultDocument(_Record):
    format_version: Literal[1] = FORMAT_VERSION
    metadata: Metadata
    run: RunInfo
    merges: list[MergeRecord]
    per_k: list[PosteriorRow]
    map_k: int
    dendrogram: DendrogramRecord
    assignments: dict[int, list[int]]

    def deterministic_dump(self) -> str:
        """JSON text without the ``run`` record."""
        return self.model_dump_json(indent=2, exclude={"run"})


def _interval_record(interval: FrontInterval) -> IntervalRecord:
    low = None if math.isinf(interval.log_alpha_low) else interval.log_alpha_low
    return IntervalRecord(
        k=interval.k,
        log_alpha_low=low,
        log_alpha_high=interval.log_alpha_high,
        alpha_low=interval.alpha_low,
        alpha_high=interval.alpha_high,
        log_posterior_intercept=interval.intercept,
    )


def build_document(
    h: Hierarchy,
    g: ContiguityGraph,
    spec: ModelSpec,
    tree: Dendrogram,
    *,
    cut_at: Iterable[int] = (),
    options: Mapping[str, JsonValue] | None = None,
    runtime_seconds: float = 0.0,
) -> ResultDocument:
    """
    Collect a finished run into a document.

    Parameters:
        h (Hierarchy): Hierarchy with per-K posteriors.
        g (ContiguityGraph): The graph it was built on.
        spec (ModelSpec): Resolved observation model.
        tree (Dendrogram): Dendrogram of ``h``.
        cut_at (Iterable[int]): Cluster counts to emit assignments for, besides ``map_k``.
        options (Mapping[str, JsonValue] | None): Configuration echo.
        runtime_seconds (float): Wall-clock duration of the run.

    Raises:
        IncompleteHierarchyError: If ``h`` has no MAP cluster count.
        ClusterCountError: If a requested K is outside ``[1, N]``.
    """
    if h.map_k is None:
        raise IncompleteHierarchyError
    ks = sorted({h.map_k, *cut_at})
    return ResultDocument(
        metadata=Metadata(n=h.n, edges=g.edge_count, alpha=h.alpha, model=spec, options=dict(options or {})),
        run=RunInfo(
            created_at=datetime.now(timezone.utc),
            runtime_seconds=runtime_seconds,
            regionclust_version=package_version(),
        ),
        merges=[
            MergeRecord(step=m.step, g=m.g, h=m.h, new_id=m.new_id, bound_score=m.bound_score, log_trees=m.log_trees)
            for m in h.merges
        ],
        per_k=[
            PosteriorRow(
                k=k,
                log_obs=value.log_obs,
                log_prior=value.log_partition_prior,
                log_k_prior=value.log_k_prior,
                total=value.total,
            )
            for k, value in h.posterior_table()
        ],
        map_k=h.map_k,
        dendrogram=DendrogramRecord(
            leaves=[LeafRecord(cluster=c, members=list(tree.leaves[c])) for c in tree.leaf_order],
            levels=[
                LevelRecord(height=level.height, merges=[(m.g, m.h, m.new_id) for m in level.merges])
                for level in tree.levels
            ],
            front=[_interval_record(interval) for interval in tree.front.intervals],
        ),
        assignments={k: list(cut_at_k(h, k).assignment) for k in ks},
    )


def hierarchy_from_document(document: ResultDocument) -> Hierarchy:
    merges = tuple(
        Merge(step=m.step, g=m.g, h=m.h, new_id=m.new_id, bound_score=m.bound_score, log_trees=m.log_trees)
        for m in document.merges
    )
    per_k = {
        row.k: PosteriorValue(log_obs=row.log_obs, log_partition_prior=row.log_prior, log_k_prior=row.log_k_prior)
        for row in document.per_k
    }
    return Hierarchy(
        n=document.metadata.n,
        merges=merges,
        per_k=per_k,
        map_k=document.map_k,
        alpha=document.metadata.alpha,
    )


def dendrogram_from_document(document: ResultDocument) -> Dendrogram:
    h = hierarchy_from_document(document)
    by_id = {merge.new_id: merge for merge in h.merges}
    record = document.dendrogram
    front = ParetoFront(
        intervals=tuple(
            FrontInterval(
                k=interval.k,
                log_alpha_low=-math.inf if interval.log_alpha_low is None else interval.log_alpha_low,
                log_alpha_high=interval.log_alpha_high,
                intercept=interval.log_posterior_intercept,
            )
            for interval in record.front
        ),
    )
    return Dendrogram(
        leaves={leaf.cluster: tuple(leaf.members) for leaf in record.leaves},
        leaf_order=tuple(leaf.cluster for leaf in record.leaves),
        levels=tuple(
            MergeLevel(height=level.height, merges=tuple(by_id[new_id] for _, _, new_id in level.merges))
            for level in record.levels
        ),
        base_merges=h.merges[: h.n - front.head.k],
        front=front,
    )


def replayed_assignments(document: ResultDocument) -> dict[int, list[int]]:
    """Assignments obtained by replaying the stored merges, for every stored K."""
    h = hierarchy_from_document(document)
    return {k: list(cut_at_k(h, k).assignment) for k in document.assignments}
