import logging
from dataclasses import dataclass

from lru import LRU

from regionclust.graphs import LdlFactor

PairKey = tuple[int, int]


@dataclass(frozen=True)
class CachedUnion:
    stamp: tuple[int, int]
    factor: LdlFactor


class FactorCache:
    """
    A lru dictionary of union factors computed while scoring merge candidates.

    Attributes:
        ratio (int):
            Capacity is ``ratio`` times the number of live candidates.
        hits (int):
            Lookups that returned a factor with matching stamps.
        misses (int):
            Lookups that found nothing usable.
    """

    logger = logging.getLogger(__name__)

    def __init__(self, ratio: int, candidates: int = 1) -> None:
        self.ratio = ratio
        self.hits = 0
        self.misses = 0
        self._store: LRU = LRU(max(1, ratio * candidates))

    def __len__(self) -> int:
        return len(self._store)

    @property
    def capacity(self) -> int:
        return self._store.get_size()

    def resize(self, candidates: int) -> None:
        """Follow the candidate count; shrinking evicts the least recently used entries."""
        size = max(1, self.ratio * candidates)
        if size != self._store.get_size():
            self.logger.debug("Factor cache resized to %d entries", size)
            self._store.set_size(size)

    def put(self, key: PairKey, stamp: tuple[int, int], factor: LdlFactor) -> None:
        self._store[key] = CachedUnion(stamp=stamp, factor=factor)

    def take(self, key: PairKey, stamp: tuple[int, int]) -> LdlFactor | None:
        """
        Remove and return the factor for ``key`` if it was computed for ``stamp``.

        Parameters:
            key (PairKey): Cluster pair ``(min id, max id)``.
            stamp (tuple[int, int]): Versions of the pair at scoring time.

        Returns:
            LdlFactor | None: The cached factor, or None on a miss.
        """
        entry = self._store.get(key)
        if entry is not None:
            del self._store[key]
        if entry is None or entry.stamp != stamp:
            self.misses += 1
            return None
        self.hits += 1
        return entry.factor

    def discard(self, key: PairKey) -> None:
        if key in self._store:
            del self._store[key]
