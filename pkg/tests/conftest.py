from __future__ import annotations

from pathlib import Path

import pytest

from adminscan.classify import LabeledSample, Label
from adminscan.features import read_matrix

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def golden_corpus_dir() -> Path:
    return DATA_DIR / "golden_corpus"


@pytest.fixture(scope="session")
def golden_samples() -> list[LabeledSample]:
    """The golden feature matrix joined with its labels."""
    rows, labels = read_matrix(DATA_DIR / "golden_matrix.csv")
    assert labels is not None
    return [
        LabeledSample(unit_id, vector, Label(labels[unit_id]))
        for unit_id, vector in rows
    ]
