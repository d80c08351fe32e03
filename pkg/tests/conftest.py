import numpy as np
import pytest

from regionclust.graphs import ContiguityGraph, from_edge_list, grid_graph


@pytest.fixture
def path4() -> ContiguityGraph:
    return from_edge_list(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def cycle4() -> ContiguityGraph:
    return from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def k4() -> ContiguityGraph:
    return from_edge_list(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])


@pytest.fixture
def grid3() -> ContiguityGraph:
    return grid_graph(3, 3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240613)
