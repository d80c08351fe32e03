import numpy as np
import pytest

from regionclust.errors import InvalidInputError
from regionclust.simulation import (
    BLOCK_MEANS,
    TRUE_K,
    ReplicateResult,
    block_labels,
    run_sweep,
    simulate_blocks,
    summarize,
)


def test_block_layout() -> None:
    labels = block_labels(30, 30)
    assert labels.shape == (900,)
    assert BLOCK_MEANS.ravel()[labels[0]] == 1.0
    assert BLOCK_MEANS.ravel()[labels[15 * 30 + 15]] == 7.0
    assert BLOCK_MEANS.ravel()[labels[-1]] == 8.0
    assert np.bincount(labels).tolist() == [100] * TRUE_K


def test_block_labels_need_multiples_of_three() -> None:
    with pytest.raises(InvalidInputError):
        block_labels(10, 9)
    with pytest.raises(InvalidInputError):
        block_labels(0, 3)


def test_noiseless_image_is_exact() -> None:
    image = simulate_blocks(9, 6, sigma=0.0)
    assert image.features.shape == (54, 1)
    np.testing.assert_array_equal(image.features[:, 0], BLOCK_MEANS.ravel()[image.labels])
    assert image.graph.n == 54
    with pytest.raises(InvalidInputError):
        simulate_blocks(9, 9, sigma=-1.0)


def test_simulation_is_seeded() -> None:
    first = simulate_blocks(6, 6, sigma=1.0, rng=3)
    second = simulate_blocks(6, 6, sigma=1.0, rng=np.random.default_rng(3))
    np.testing.assert_array_equal(first.features, second.features)


def test_small_sweep() -> None:
    results = run_sweep([0.1, 3.0], replicates=2, seed=11, rows=6, cols=6)
    assert [(r.sigma, r.replicate) for r in results] == [(0.1, 0), (0.1, 1), (3.0, 0), (3.0, 1)]
    again = run_sweep([0.1, 3.0], replicates=2, seed=11, rows=6, cols=6)
    assert [(r.map_k, r.nmi_map) for r in results] == [(r.map_k, r.nmi_map) for r in again]
    assert all(0.0 <= r.nmi_true_k <= 1.0 for r in results)
    with pytest.raises(InvalidInputError):
        run_sweep([0.5], replicates=0)


def test_summarize() -> None:
    results = [
        ReplicateResult(sigma=0.5, replicate=0, map_k=9, nmi_map=1.0, nmi_true_k=1.0, seconds=1.0),
        ReplicateResult(sigma=0.5, replicate=1, map_k=8, nmi_map=0.9, nmi_true_k=0.95, seconds=3.0),
        ReplicateResult(sigma=0.25, replicate=0, map_k=9, nmi_map=1.0, nmi_true_k=1.0, seconds=2.0),
    ]
    table = summarize(results)
    assert table["sigma"].tolist() == [0.25, 0.5]
    row = table.set_index("sigma").loc[0.5]
    assert row["replicates"] == 2
    assert row["mean_nmi_map"] == pytest.approx(0.95)
    assert row["true_k_frequency"] == pytest.approx(0.5)
    assert row["mean_k"] == pytest.approx(8.5)
    assert row["mean_seconds"] == pytest.approx(2.0)


@pytest.mark.slow
@pytest.mark.parametrize(("sigma", "min_nmi"), [(0.25, 0.98), (0.5, 0.95), (1.0, 0.90)])
def test_block_recovery(sigma: float, min_nmi: float) -> None:
    results = run_sweep([sigma], replicates=20, seed=2024)
    assert np.mean([r.nmi_map for r in results]) >= min_nmi
    assert max(r.seconds for r in results) < 10.0
    if sigma == 0.5:
        assert sum(r.map_k == TRUE_K for r in results) >= 18
