from collections.abc import Sequence

import numpy as np
from sklearn.metrics import normalized_mutual_info_score

from regionclust.errors import InvalidInputError


class LabelLengthError(InvalidInputError):
    def __init__(self, left: int, right: int) -> None:
        super().__init__(f"Labelings have different lengths: {left} and {right}")


def normalized_mutual_information(labels_a: Sequence[int] | np.ndarray, labels_b: Sequence[int] | np.ndarray) -> float:
    """
    NMI normalized by the arithmetic mean of the two entropies.

    Two single-cluster labelings score 1.0.

    Raises:
        LabelLengthError: If the labelings differ in length.
    """
    a, b = np.asarray(labels_a), np.asarray(labels_b)
    if a.shape[0] != b.shape[0]:
        raise LabelLengthError(a.shape[0], b.shape[0])
    if np.unique(a).size == 1 and np.unique(b).size == 1:
        return 1.0
    return float(normalized_mutual_info_score(a, b, average_method="arithmetic"))
