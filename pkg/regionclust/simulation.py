"""
Synthetic block images and the recovery study run on them.

A ``rows x cols`` image is split into a 3 x 3 layout of equal blocks; each
pixel is drawn from a Gaussian centred on its block mean.
"""

import logging
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from regionclust.errors import InvalidInputError
from regionclust.graphs import Adjacency, ContiguityGraph, grid_graph
from regionclust.inference import cut_at_k, fit
from regionclust.models import ModelVariant, default_hyperparams
from regionclust.utilities.helpers import normalized_mutual_information

logger = logging.getLogger(__name__)

BLOCK_MEANS = np.array([[1.0, 5.0, 3.0], [2.0, 7.0, 4.0], [6.0, 9.0, 8.0]])
SIGMA_GRID = (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25)
TRUE_K = BLOCK_MEANS.size


@dataclass(frozen=True)
class SimulatedImage:
    rows: int
    cols: int
    sigma: float
    features: np.ndarray
    labels: np.ndarray
    graph: ContiguityGraph


@dataclass(frozen=True)
class ReplicateResult:
    sigma: float
    replicate: int
    map_k: int
    nmi_map: float
    nmi_true_k: float
    seconds: float


def block_labels(rows: int, cols: int) -> np.ndarray:
    """
    Row-major block index of every pixel, ``0..8`` left to right then top to bottom.

    Raises:
        InvalidInputError: If a dimension is not a positive multiple of 3.
    """
    layout = BLOCK_MEANS.shape[0]
    if rows < layout or cols < layout or rows % layout or cols % layout:
        raise InvalidInputError(f"Grid {rows}x{cols} cannot be split into {layout}x{layout} equal blocks")
    block_rows = np.arange(rows) // (rows // layout)
    block_cols = np.arange(cols) // (cols // layout)
    return (block_rows[:, None] * layout + block_cols[None, :]).ravel()


def simulate_blocks(
    rows: int = 30,
    cols: int = 30,
    sigma: float = 0.5,
    rng: np.random.Generator | int | None = None,
    adjacency: Adjacency | str = Adjacency.ROOK,
) -> SimulatedImage:
    """
    Draw one noisy block image.

    Parameters:
        rows (int): Image height, a multiple of 3.
        cols (int): Image width, a multiple of 3.
        sigma (float): Noise standard deviation; 0 gives the block means exactly.
        rng (np.random.Generator | int | None): Generator or seed.
        adjacency (Adjacency | str): Lattice neighbourhood of the returned graph.

    Returns:
        SimulatedImage: ``N x 1`` features, true block labels and the lattice graph.
    """
    if sigma < 0:
        raise InvalidInputError(f"Noise standard deviation must be non-negative, got {sigma}")
    labels = block_labels(rows, cols)
    generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    means = BLOCK_MEANS.ravel()[labels]
    values = means + sigma * generator.standard_normal(means.shape[0]) if sigma > 0 else means.copy()
    return SimulatedImage(
        rows=rows,
        cols=cols,
        sigma=sigma,
        features=values.reshape(-1, 1),
        labels=labels,
        graph=grid_graph(rows, cols, adjacency),
    )


def run_replicate(
    sigma: float,
    replicate: int,
    seed: np.random.SeedSequence,
    rows: int = 30,
    cols: int = 30,
    adjacency: Adjacency | str = Adjacency.ROOK,
) -> ReplicateResult:
    """Cluster one simulated image with default hyperparameters and ``alpha = 1``."""
    started = time.perf_counter()
    image = simulate_blocks(rows, cols, sigma, np.random.default_rng(seed), adjacency)
    spec = default_hyperparams(image.features, ModelVariant.GAUSSIAN)
    h = fit(image.features, image.graph, spec, alpha=1.0)
    map_k = h.map_k or 1
    nmi_map = normalized_mutual_information(image.labels, cut_at_k(h, map_k).assignment)
    nmi_true_k = normalized_mutual_information(image.labels, cut_at_k(h, TRUE_K).assignment)
    return ReplicateResult(
        sigma=sigma,
        replicate=replicate,
        map_k=map_k,
        nmi_map=nmi_map,
        nmi_true_k=nmi_true_k,
        seconds=time.perf_counter() - started,
    )


def _run_task(task: tuple[float, int, np.random.SeedSequence, int, int, str]) -> ReplicateResult:
    return run_replicate(*task)


def run_sweep(
    sigmas: Sequence[float] = SIGMA_GRID,
    replicates: int = 20,
    seed: int = 0,
    rows: int = 30,
    cols: int = 30,
    adjacency: Adjacency | str = Adjacency.ROOK,
    workers: int = 1,
) -> list[ReplicateResult]:
    """
    Run ``replicates`` images per noise level.

    Every replicate gets its own child of ``SeedSequence(seed)``, so results do
    not depend on ``workers``.
    """
    if replicates < 1:
        raise InvalidInputError(f"At least one replicate is needed, got {replicates}")
    block_labels(rows, cols)
    children = np.random.SeedSequence(seed).spawn(len(sigmas) * replicates)
    adjacency = Adjacency(adjacency).value
    tasks = [
        (float(sigma), replicate, children[index * replicates + replicate], rows, cols, adjacency)
        for index, sigma in enumerate(sigmas)
        for replicate in range(replicates)
    ]
    logger.info("Sweep: %d noise levels x %d replicates on %d worker(s)", len(sigmas), replicates, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(_run_task, tasks))
    return [_run_task(task) for task in tasks]


def summarize(results: Sequence[ReplicateResult]) -> pd.DataFrame:
    """
    One row per noise level.

    Columns: ``sigma``, ``replicates``, ``mean_nmi_map``, ``mean_nmi_true_k``,
    ``true_k_frequency``, ``mean_k`` and ``mean_seconds``.
    """
    frame = pd.DataFrame([asdict(result) for result in results])
    frame["found_true_k"] = frame["map_k"] == TRUE_K
    return (
        frame.groupby("sigma", sort=True)
        .agg(
            replicates=("replicate", "count"),
            mean_nmi_map=("nmi_map", "mean"),
            mean_nmi_true_k=("nmi_true_k", "mean"),
            true_k_frequency=("found_true_k", "mean"),
            mean_k=("map_k", "mean"),
            mean_seconds=("seconds", "mean"),
        )
        .reset_index()
    )
