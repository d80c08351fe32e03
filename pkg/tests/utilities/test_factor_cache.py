from regionclust.graphs import from_edge_list, ldl_factorize
from regionclust.utilities.helpers import FactorCache

FACTOR = ldl_factorize(from_edge_list(2, [(0, 1)]))


def test_take_checks_the_stamp() -> None:
    cache = FactorCache(ratio=2, candidates=2)
    cache.put((0, 1), (0, 0), FACTOR)
    cache.put((1, 2), (0, 0), FACTOR)
    assert cache.take((0, 1), (0, 0)) is FACTOR
    assert cache.take((1, 2), (1, 0)) is None
    assert cache.take((3, 4), (0, 0)) is None
    assert (cache.hits, cache.misses) == (1, 2)
    assert len(cache) == 0


def test_resize_evicts_the_oldest() -> None:
    cache = FactorCache(ratio=1, candidates=3)
    assert cache.capacity == 3
    for index in range(3):
        cache.put((index, index + 1), (0, 0), FACTOR)
    cache.resize(1)
    assert cache.capacity == 1
    assert len(cache) == 1
    assert cache.take((2, 3), (0, 0)) is FACTOR
    cache.put((5, 6), (0, 0), FACTOR)
    cache.discard((5, 6))
    assert len(cache) == 0
