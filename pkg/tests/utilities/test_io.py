from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from regionclust.errors import InputFileError, InvalidInputError
from regionclust.graphs import Partition, grid_graph
from regionclust.utilities.helpers.io import (
    additive_log_ratio,
    read_edge_list,
    read_features,
    read_labels,
    write_assignments,
    write_edge_list,
    write_features,
)


def test_read_features(tmp_path: Path) -> None:
    path = tmp_path / "features.csv"
    path.write_text("a,b\n1.5,2\n-3,0.25\n")
    features, columns = read_features(path)
    assert columns == ["a", "b"]
    np.testing.assert_array_equal(features, [[1.5, 2.0], [-3.0, 0.25]])


def test_write_features_keeps_full_precision(tmp_path: Path) -> None:
    values = np.array([0.1, 1 / 3, np.pi])
    path = write_features(tmp_path / "x.csv", values, ["value"])
    features, columns = read_features(path)
    assert columns == ["value"]
    np.testing.assert_array_equal(features[:, 0], values)


def test_read_features_errors(tmp_path: Path) -> None:
    with pytest.raises(InputFileError):
        read_features(tmp_path / "missing.csv")
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InvalidInputError):
        read_features(empty)
    words = tmp_path / "words.csv"
    words.write_text("a,b\n1,x\n2,y\n")
    with pytest.raises(InvalidInputError, match="Non-numeric"):
        read_features(words)
    holes = tmp_path / "holes.csv"
    holes.write_text("a,b\n1,\n2,3\n")
    with pytest.raises(InvalidInputError, match="Missing"):
        read_features(holes)


def test_additive_log_ratio() -> None:
    frame = pd.DataFrame({"a": [0.2, 0.5], "b": [0.3, 0.0], "c": [0.5, 0.5]})
    ratios = additive_log_ratio(frame, "c", epsilon=1e-6)
    assert list(ratios.columns) == ["a", "b"]
    np.testing.assert_allclose(ratios["a"], np.log([0.4, 1.0]))
    assert ratios["b"].iloc[1] == pytest.approx(np.log(1e-6 / 0.5))
    with pytest.raises(InvalidInputError):
        additive_log_ratio(frame, "d")


def test_read_features_with_alr(tmp_path: Path) -> None:
    path = tmp_path / "shares.csv"
    path.write_text("a,b,c\n0.2,0.3,0.5\n")
    features, columns = read_features(path, alr_reference="c")
    assert columns == ["a", "b"]
    np.testing.assert_allclose(features, np.log([[0.4, 0.6]]))


def test_read_edge_list(tmp_path: Path) -> None:
    path = tmp_path / "edges.txt"
    path.write_text("# header\n0 1\n\n1\t2\n2 0\n1 0\n")
    g = read_edge_list(path)
    assert g.n == 3
    assert g.edges == frozenset({(0, 1), (1, 2), (0, 2)})
    assert read_edge_list(path, n=5).n == 5


def test_edge_list_round_trip(tmp_path: Path) -> None:
    g = grid_graph(3, 4, "queen")
    assert read_edge_list(write_edge_list(tmp_path / "grid.txt", g), g.n) == g


def test_read_edge_list_edge_cases(tmp_path: Path) -> None:
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing here\n")
    assert read_edge_list(empty, n=1).n == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    with pytest.raises(InputFileError):
        read_edge_list(bad)
    negative = tmp_path / "negative.txt"
    negative.write_text("0 -1\n")
    with pytest.raises(InputFileError):
        read_edge_list(negative)
    with pytest.raises(InputFileError):
        read_edge_list(tmp_path / "absent.txt")


def test_labels_and_assignments(tmp_path: Path) -> None:
    path = write_assignments(tmp_path / "out.csv", Partition.from_assignment([3, 3, 1]))
    assert path.read_text().splitlines() == ["node,cluster", "0,0", "1,0", "2,1"]
    np.testing.assert_array_equal(read_labels(path), [0, 0, 1])
    np.testing.assert_array_equal(read_labels(write_assignments(tmp_path / "raw.csv", [2, 1])), [2, 1])
