import math

import numpy as np
import pytest

from regionclust.config import config
from regionclust.errors import InvalidInputError
from regionclust.graphs import (
    ContiguityGraph,
    DisconnectedGraphError,
    EmptyCutsetError,
    from_edge_list,
    grid_graph,
    induced_subgraph,
    is_connected,
    ldl_factorize,
    treecount,
)
from regionclust.inference import (
    AgglomerativeEngine,
    ClusterCountError,
    ClusterState,
    MergeCandidate,
    PosteriorValue,
    cut_at_k,
    delta_bound,
    fit,
    log_posterior,
)
from regionclust.inference.agglomerative import singleton_factor
from regionclust.models import GaussianSpec, cluster_stats, default_hyperparams, delta_lobs, suff_stats
from regionclust.oracle import exhaustive_map, random_connected_graph

SPEC = GaussianSpec(mu0=(0.0,), tau=0.01, kappa=1.0, beta=(0.5,))


def _singleton(node: int, value: float) -> ClusterState:
    return ClusterState(node, (node,), suff_stats([value], SPEC), singleton_factor(), 0.0, 0)


def test_delta_bound_of_two_singletons() -> None:
    a, b = _singleton(0, 1.0), _singleton(1, 1.0)
    score, union = delta_bound(a, b, [(0, 1)], SPEC)
    assert score == pytest.approx(delta_lobs(a.stats, b.stats, SPEC))
    assert union.log_det == pytest.approx(0.0, abs=1e-12)


def test_delta_bound_of_two_paths() -> None:
    features = np.array([0.0, 0.2, 0.1, 0.3])
    edge = ldl_factorize(from_edge_list(2, [(0, 1)]))
    a = ClusterState(4, (0, 1), cluster_stats(features, [0, 1], SPEC), edge, 0.0, 0)
    b = ClusterState(5, (2, 3), cluster_stats(features, [2, 3], SPEC), edge, 0.0, 0)
    score, union = delta_bound(a, b, [(1, 2), (0, 3)], SPEC)
    assert union.log_det == pytest.approx(math.log(4))
    assert score == pytest.approx(delta_lobs(a.stats, b.stats, SPEC) + math.log(4 / 2))


def test_delta_bound_requires_adjacency() -> None:
    with pytest.raises(EmptyCutsetError):
        delta_bound(_singleton(0, 0.0), _singleton(1, 0.0), [], SPEC)


def test_candidate_ordering() -> None:
    best = MergeCandidate.scored(3, 7, (0, 0), 2.0)
    tie_small = MergeCandidate.scored(1, 9, (0, 0), 1.0)
    tie_large = MergeCandidate.scored(2, 4, (0, 0), 1.0)
    assert sorted([tie_large, tie_small, best]) == [best, tie_small, tie_large]


def test_two_nodes() -> None:
    g = from_edge_list(2, [(0, 1)])
    h = fit(np.array([0.0, 1.0]), g, SPEC)
    assert len(h.merges) == 1
    assert sorted(h.per_k) == [1, 2]
    assert h.merges[0].new_id == 2


def test_cycle_toy_recovers_the_pairs(cycle4: ContiguityGraph) -> None:
    features = np.array([0.0, 0.0, 10.0, 10.0])
    spec = default_hyperparams(features, "gaussian-diag")
    h = fit(features, cycle4, spec)
    assert h.map_k == 2
    assert cut_at_k(h, 2).canonical() == (frozenset({0, 1}), frozenset({2, 3}))
    oracle = exhaustive_map(features, cycle4, spec)
    assert oracle.partition.canonical() == cut_at_k(h, 2).canonical()
    assert h.per_k[2].total == pytest.approx(oracle.value.total)


def test_cut_at_k_extremes(grid3: ContiguityGraph, rng: np.random.Generator) -> None:
    features = rng.normal(size=9)
    h = fit(features, grid3, default_hyperparams(features, "gaussian-diag"))
    assert cut_at_k(h, 9).k == 9
    assert cut_at_k(h, 1).assignment == (0,) * 9
    with pytest.raises(ClusterCountError):
        cut_at_k(h, 10)


def test_every_level_is_contiguous(rng: np.random.Generator) -> None:
    g = grid_graph(5, 6, "queen")
    features = rng.normal(size=(30, 2))
    h = fit(features, g, default_hyperparams(features, "gaussian-diag"))
    assert len(h.merges) == g.n - 1
    for k in range(1, g.n + 1):
        partition = cut_at_k(h, k)
        assert partition.k == k
        assert all(is_connected(induced_subgraph(g, cluster)) for cluster in partition.clusters)


def test_backward_pass_matches_direct_posterior(rng: np.random.Generator) -> None:
    for alpha in (1.0, 0.3):
        g = random_connected_graph(40, 0.05, rng)
        features = rng.normal(size=(40, 2)) + np.repeat(rng.normal(scale=4.0, size=(4, 2)), 10, axis=0)
        spec = default_hyperparams(features, "gaussian-diag")
        h = fit(features, g, spec, alpha)
        for k, value in h.per_k.items():
            direct = log_posterior(features, g, cut_at_k(h, k), spec, alpha)
            assert isinstance(direct, PosteriorValue)
            assert value.log_obs == pytest.approx(direct.log_obs, abs=1e-8)
            assert value.log_partition_prior == pytest.approx(direct.log_partition_prior, abs=1e-7)
            assert value.total == pytest.approx(direct.total, abs=1e-7)


def test_first_level_has_no_partition_prior(grid3: ContiguityGraph, rng: np.random.Generator) -> None:
    features = rng.normal(size=9)
    spec = default_hyperparams(features, "gaussian-diag")
    h = fit(features, grid3, spec, alpha=0.5)
    assert h.per_k[1].log_partition_prior == pytest.approx(0.0, abs=1e-9)


def test_map_k_is_the_argmax(grid3: ContiguityGraph, rng: np.random.Generator) -> None:
    features = rng.normal(size=9)
    h = fit(features, grid3, default_hyperparams(features, "gaussian-diag"))
    assert h.map_k == max(h.per_k, key=lambda k: h.per_k[k].total)


def test_accepted_merge_has_the_best_bound(rng: np.random.Generator) -> None:
    g = grid_graph(4, 5)
    features = rng.normal(size=20)
    engine = AgglomerativeEngine(features, g, default_hyperparams(features, "gaussian-diag"))
    while not engine.done:
        best = max(
            delta_bound(engine.active[a], engine.active[b], engine.cut_edges(a, b), engine.spec)[0]
            for a, b, _ in engine.quotient_pairs()
        )
        merge = engine.step()
        assert merge.bound_score == pytest.approx(best, abs=1e-9)


def test_rescoring_is_local(rng: np.random.Generator) -> None:
    g = grid_graph(6, 6)
    features = rng.normal(size=36)
    engine = AgglomerativeEngine(features, g, default_hyperparams(features, "gaussian-diag"))
    assert engine.candidate_count == g.edge_count
    assert engine.counters.scored == g.edge_count
    engine.run()
    assert engine.counters.rescored_per_step == engine.counters.quotient_degree_per_step
    assert max(engine.counters.quotient_degree_per_step) < 36
    assert engine.counters.cache_hits + engine.counters.cache_misses == g.n - 1


def test_quotient_pairs_sum_multiplicities(cycle4: ContiguityGraph) -> None:
    features = np.array([0.0, 0.0, 10.0, 10.0])
    engine = AgglomerativeEngine(features, cycle4, default_hyperparams(features, "gaussian-diag"))
    engine.step()
    engine.step()
    assert list(engine.quotient_pairs()) == [(4, 5, 2)]
    assert len(engine.cut_edges(4, 5)) == 2


def test_forward_pass_is_deterministic(rng: np.random.Generator) -> None:
    g = grid_graph(5, 5)
    features = np.round(rng.normal(size=25), 1)
    spec = default_hyperparams(features, "gaussian-diag")
    assert fit(features, g, spec).merges == fit(features, g, spec).merges


def test_greedy_never_beats_the_optimum(rng: np.random.Generator) -> None:
    attained = 0
    for _ in range(20):
        g = random_connected_graph(7, 0.3, rng)
        features = rng.normal(size=7) + np.array([0, 0, 0, 6, 6, 6, 6])
        spec = default_hyperparams(features, "gaussian-diag")
        h = fit(features, g, spec)
        assert h.map_k is not None
        oracle = exhaustive_map(features, g, spec)
        greedy = h.per_k[h.map_k].total
        assert greedy <= oracle.value.total + 1e-9
        attained += greedy >= oracle.value.total - 1e-9
    assert attained >= 16


def test_engine_input_errors() -> None:
    with pytest.raises(DisconnectedGraphError):
        fit(np.zeros(3), from_edge_list(3, [(0, 1)]), SPEC)
    with pytest.raises(InvalidInputError, match="feature rows"):
        fit(np.zeros(2), from_edge_list(3, [(0, 1), (1, 2)]), SPEC)


@pytest.mark.slow
def test_backward_pass_on_many_instances(rng: np.random.Generator) -> None:
    for index in range(20):
        n = int(rng.integers(10, 51))
        g = random_connected_graph(n, 2.0 / n, rng)
        features = rng.normal(size=(n, 2)) + rng.normal(scale=4.0, size=(3, 2))[np.arange(n) * 3 // n]
        spec = default_hyperparams(features, "gaussian-diag")
        alpha = 1.0 if index % 2 else float(rng.uniform(0.05, 1.0))
        h = fit(features, g, spec, alpha)
        assert sorted(h.per_k) == list(range(1, n + 1))
        for k, value in h.per_k.items():
            direct = log_posterior(features, g, cut_at_k(h, k), spec, alpha)
            assert isinstance(direct, PosteriorValue)
            assert value.total == pytest.approx(direct.total, rel=1e-10, abs=1e-8)


@pytest.mark.parametrize("refresh", [1, 3, 10**6])
def test_refresh_interval_does_not_change_the_fit(monkeypatch: pytest.MonkeyPatch, refresh: int) -> None:
    rng = np.random.default_rng(99)
    g = grid_graph(6, 6)
    features = rng.normal(size=(36, 2)) + np.where(np.arange(36)[:, None] % 6 < 3, 0.0, 5.0)
    spec = default_hyperparams(features, "gaussian-diag")
    reference = fit(features, g, spec)
    monkeypatch.setattr(config, "FACTOR_REFRESH_UPDATES", refresh)
    h = fit(features, g, spec)
    assert [(m.g, m.h) for m in h.merges] == [(m.g, m.h) for m in reference.merges]
    assert h.map_k == reference.map_k
    for k, value in reference.per_k.items():
        assert h.per_k[k].total == pytest.approx(value.total, abs=1e-8)


def test_ordering_does_not_change_the_fit(monkeypatch: pytest.MonkeyPatch) -> None:
    rng = np.random.default_rng(5)
    g = grid_graph(5, 6)
    features = rng.normal(size=30) + np.where(np.arange(30) < 15, 0.0, 5.0)
    spec = default_hyperparams(features, "gaussian-diag")
    reference = fit(features, g, spec)
    shuffle = np.random.default_rng(6)
    monkeypatch.setattr(
        treecount,
        "reverse_cuthill_mckee",
        lambda matrix, symmetric_mode=True: shuffle.permutation(matrix.shape[0]),  # noqa: ARG005
    )
    monkeypatch.setattr(config, "FACTOR_REFRESH_UPDATES", 2)
    h = fit(features, g, spec)
    assert [(m.g, m.h) for m in h.merges] == [(m.g, m.h) for m in reference.merges]
    for k, value in reference.per_k.items():
        assert h.per_k[k].total == pytest.approx(value.total, abs=1e-8)
