from __future__ import annotations

from pathlib import Path

import pytest

from cflcheck.cli import read_labels
from cflcheck.http.validate import data_dir, load_http_profile

CORPUS = data_dir() / "corpus"


@pytest.fixture(scope="session")
def profile():
    return load_http_profile()


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def labels() -> list[tuple[str, str]]:
    return read_labels(str(CORPUS / "labels.csv"))


@pytest.fixture(scope="session")
def corpus_files() -> list[Path]:
    return sorted(CORPUS.glob("*.http"))
