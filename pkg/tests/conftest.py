from __future__ import annotations

from pathlib import Path

import pytest

from bibscout.datasource import SimulatedPortal
from bibscout.ingest import load_corpus, parse_rank_csv

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def ranking():
    return parse_rank_csv(FIXTURES_DIR / "ranking.csv")


@pytest.fixture(scope="session")
def corpus():
    return load_corpus(FIXTURES_DIR / "corpus.jsonl")


@pytest.fixture(scope="session")
def tm_cloud_docs():
    return load_corpus(FIXTURES_DIR / "tm_keywords.jsonl")


@pytest.fixture(scope="session")
def portal(corpus):
    return SimulatedPortal(corpus)
