import json
from pathlib import Path

import numpy as np
import pytest

from regionclust.errors import InputFileError
from regionclust.graphs import grid_graph
from regionclust.inference import build_dendrogram, fit
from regionclust.models import default_hyperparams
from regionclust.results import (
    ResultDocument,
    build_document,
    dendrogram_from_document,
    hierarchy_from_document,
    replayed_assignments,
)
from regionclust.utilities.helpers import DocumentEncoder, DocumentValidationError


@pytest.fixture
def document(rng: np.random.Generator) -> ResultDocument:
    g = grid_graph(4, 4)
    features = np.where(np.arange(16) % 4 < 2, 0.0, 5.0) + rng.normal(scale=0.3, size=16)
    spec = default_hyperparams(features, "gaussian-diag")
    h = fit(features, g, spec, alpha=0.5)
    return build_document(h, g, spec, build_dendrogram(h), cut_at=[1, 3], options={"seed": 7})


def test_document_round_trip(tmp_path: Path, document: ResultDocument) -> None:
    path = DocumentEncoder.write(document, tmp_path / "nested" / "result.json")
    decoded = DocumentEncoder.read(path, ResultDocument)
    assert decoded == document
    assert decoded.per_k == document.per_k
    assert decoded.assignments == document.assignments
    assert sorted(decoded.assignments) == sorted({1, 3, document.map_k})


def test_deterministic_dump_ignores_run_info(document: ResultDocument) -> None:
    later = document.model_copy(update={"run": document.run.model_copy(update={"runtime_seconds": 99.0})})
    assert later.deterministic_dump() == document.deterministic_dump()
    assert later.model_dump_json() != document.model_dump_json()


def test_stored_merges_replay_to_the_assignments(document: ResultDocument) -> None:
    assert replayed_assignments(document) == document.assignments
    h = hierarchy_from_document(document)
    assert h.map_k == document.map_k
    assert len(h.merges) == document.metadata.n - 1


def test_dendrogram_survives_the_document(document: ResultDocument) -> None:
    tree = dendrogram_from_document(document)
    assert tree.front.intervals[-1].log_alpha_low == -np.inf
    assert document.dendrogram.front[-1].log_alpha_low is None
    assert tree.front.head.k == len(document.dendrogram.leaves)
    assert tree.heights == tuple(level.height for level in document.dendrogram.levels)
    assert tree.to_linkage().shape == (len(tree.leaves) - 1, 4)


def test_decode_rejects_bad_documents(document: ResultDocument) -> None:
    with pytest.raises(DocumentValidationError):
        DocumentEncoder.decode("{not json", ResultDocument)
    broken = document.model_dump(mode="json")
    broken["format_version"] = 2
    with pytest.raises(DocumentValidationError, match="Invalid document"):
        DocumentEncoder.decode(json.dumps(broken), ResultDocument)


def test_read_missing_file(tmp_path: Path) -> None:
    with pytest.raises(InputFileError):
        DocumentEncoder.read(tmp_path / "absent.json", ResultDocument)
