import numpy as np
import pytest

from regionclust.errors import InvalidInputError
from regionclust.utilities.helpers import LabelLengthError, normalized_mutual_information


def test_identical_and_permuted_labels() -> None:
    labels = [0, 0, 1, 1, 2, 2]
    assert normalized_mutual_information(labels, labels) == pytest.approx(1.0)
    assert normalized_mutual_information(labels, [5, 5, 3, 3, 9, 9]) == pytest.approx(1.0)


def test_independent_labels_score_near_zero() -> None:
    rng = np.random.default_rng(1)
    a = rng.integers(0, 9, size=10_000)
    b = rng.integers(0, 9, size=10_000)
    assert normalized_mutual_information(a, b) < 0.02


def test_single_cluster_labelings() -> None:
    assert normalized_mutual_information([0, 0, 0], [4, 4, 4]) == 1.0
    assert normalized_mutual_information([0, 0, 0], [0, 1, 2]) == pytest.approx(0.0)


def test_length_mismatch() -> None:
    with pytest.raises(LabelLengthError):
        normalized_mutual_information([0, 1], [0, 1, 1])
    assert issubclass(LabelLengthError, InvalidInputError)


def test_invariant_to_relabeling() -> None:
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.integers(0, 5, size=200)
        b = rng.integers(0, 4, size=200)
        relabel = rng.permutation(5)
        expected = normalized_mutual_information(a, b)
        assert normalized_mutual_information(relabel[a], b) == pytest.approx(expected, abs=1e-12)
        assert normalized_mutual_information(b, a) == pytest.approx(expected, abs=1e-12)
