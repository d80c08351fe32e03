"""
Reading and writing the plain-text exchange formats.

Features are delimited text with a header row, one observation per line;
graphs are edge lists of 0-based node pairs; labels and assignments are
``node,cluster`` tables.
"""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from regionclust.errors import InputFileError, InvalidInputError
from regionclust.graphs import ContiguityGraph, Partition, from_edge_list

logger = logging.getLogger(__name__)

ALR_EPSILON = 1e-6


def _read_csv(path: Path, **kwargs: object) -> pd.DataFrame:
    try:
        return pd.read_csv(path, **kwargs)  # type: ignore[arg-type]
    except FileNotFoundError as exc:
        raise InputFileError(f"File not found: {path}") from exc
    except pd.errors.EmptyDataError:
        return pd.DataFrame()
    except (OSError, pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise InputFileError(f"Cannot parse {path}: {exc}") from exc


def additive_log_ratio(frame: pd.DataFrame, reference: str, epsilon: float = ALR_EPSILON) -> pd.DataFrame:
    """
    ``log(x_j / x_ref)`` for every column but the reference, shares floored at ``epsilon``.

    Raises:
        InvalidInputError: If ``reference`` is not a column.
    """
    if reference not in frame.columns:
        raise InvalidInputError(f"Reference column {reference!r} not found in {list(frame.columns)}")
    floored = frame.clip(lower=epsilon)
    ratios = np.log(floored.drop(columns=[reference]).div(floored[reference], axis=0))
    logger.debug("Additive log-ratio against %r: %d columns", reference, ratios.shape[1])
    return ratios


def read_features(
    path: Path,
    alr_reference: str | None = None,
    alr_epsilon: float = ALR_EPSILON,
) -> tuple[np.ndarray, list[str]]:
    """
    Read the feature table; row order defines node indices.

    Raises:
        InputFileError: If the file is missing or unreadable.
        InvalidInputError: If the table is empty or holds non-numeric columns.
    """
    frame = _read_csv(path)
    if frame.empty:
        raise InvalidInputError(f"No observations in {path}")
    non_numeric = [column for column in frame.columns if not pd.api.types.is_numeric_dtype(frame[column])]
    if non_numeric:
        raise InvalidInputError(f"Non-numeric feature column(s) in {path}: {non_numeric}")
    if frame.isna().to_numpy().any():
        raise InvalidInputError(f"Missing values in {path}")
    if alr_reference is not None:
        frame = additive_log_ratio(frame, alr_reference, alr_epsilon)
    return frame.to_numpy(dtype=np.float64), [str(column) for column in frame.columns]


def write_features(path: Path, features: np.ndarray, columns: Sequence[str] | None = None) -> Path:
    matrix = features.reshape(-1, 1) if features.ndim == 1 else features
    names = list(columns) if columns is not None else [f"x{index}" for index in range(matrix.shape[1])]
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(matrix, columns=names).to_csv(path, index=False, float_format="%.17g")
    return path


def read_edge_list(path: Path, n: int | None = None) -> ContiguityGraph:
    """
    Read whitespace-separated node pairs; ``#`` comments and blank lines are skipped.

    Parameters:
        path (Path): Edge-list file.
        n (int | None): Node count; defaults to the largest index plus one.

    Raises:
        InputFileError: If the file is missing or a line is not two non-negative integers.
    """
    frame = _read_csv(path, sep=r"\s+", comment="#", header=None, skip_blank_lines=True)
    if frame.empty:
        return from_edge_list(n or 0, [])
    if frame.shape[1] != 2 or frame.isna().to_numpy().any():  # noqa: PLR2004
        raise InputFileError(f"Every line of {path} must hold exactly two node indices")
    if not all(pd.api.types.is_integer_dtype(frame[column]) for column in frame.columns):
        raise InputFileError(f"Node indices in {path} must be integers")
    pairs = frame.to_numpy(dtype=np.int64)
    if (pairs < 0).any():
        raise InputFileError(f"Node indices in {path} must be non-negative")
    return from_edge_list(n if n is not None else int(pairs.max()) + 1, pairs.tolist())


def write_edge_list(path: Path, g: ContiguityGraph) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {g.n} nodes, {g.edge_count} edges"] + [f"{u} {v}" for u, v in sorted(g.edges)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_labels(path: Path) -> np.ndarray:
    """Labels from the last column of a table with a header row."""
    frame = _read_csv(path)
    if frame.empty:
        raise InvalidInputError(f"No labels in {path}")
    return frame.iloc[:, -1].to_numpy()


def write_assignments(path: Path, partition: Partition | Sequence[int]) -> Path:
    labels = partition.assignment if isinstance(partition, Partition) else tuple(partition)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"node": range(len(labels)), "cluster": labels}).to_csv(path, index=False)
    return path
