"""Ranking-CSV and document-corpus ingestion.

Two inputs drive the pipeline: a journal ranking exported as CSV (rank,
title, impact factor) and a corpus of document records stored as
line-delimited JSON.  Parsing is all-or-nothing: every offending line is
collected and reported in one error, so a bad export fails loudly instead
of silently dropping rows.

Example:
    >>> ranking = parse_rank_csv("fixtures/ranking.csv")
    >>> corpus = load_corpus("fixtures/corpus.jsonl")
    >>> ranking[0].rank
    1
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "CORPUS_FIELDS",
    "CorpusSchemaError",
    "DocumentRecord",
    "JournalRecord",
    "RankCsvColumns",
    "RankCsvError",
    "dump_corpus",
    "load_corpus",
    "parse_rank_csv",
]

logger = logging.getLogger(__name__)

CORPUS_FIELDS = (
    "source_title",
    "year",
    "keywords",
    "subject_areas",
    "authors",
    "countries",
)
YEAR_MIN = 1900
YEAR_MAX = 2100


class RankCsvError(ValueError):
    """Ranking CSV rejected as a whole; message lists every bad line."""


class CorpusSchemaError(ValueError):
    """Corpus rejected as a whole; message lists every bad record."""


@dataclass(frozen=True)
class JournalRecord:
    """One ranking row: position, display title, journal impact factor."""

    rank: int
    title: str
    jif: float


@dataclass(frozen=True)
class DocumentRecord:
    """One indexed document.

    ``keywords`` is ``None`` when the source exposes no keyword data for
    the document at all, which is distinct from an empty keyword list;
    downstream keyword counts render the former as ``Null``.
    """

    source_title: str
    year: int
    keywords: tuple[str, ...] | None
    subject_areas: tuple[str, ...]
    authors: tuple[str, ...]
    countries: tuple[str, ...]


@dataclass(frozen=True)
class RankCsvColumns:
    """Column-name mapping for ranking CSVs from different exporters."""

    rank: str = "Rank"
    title: str = "Full Journal Title"
    jif: str = "Journal Impact Factor"


def _read_text_with_fallback(path: Path) -> str:
    data = path.read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        logger.warning("%s is not valid UTF-8; falling back to Latin-1", path)
        return data.decode("latin-1")


def parse_rank_csv(
    path: str | Path,
    columns: RankCsvColumns | None = None,
) -> list[JournalRecord]:
    """Parse a journal ranking CSV into :class:`JournalRecord` rows.

    Thousands separators in numeric cells are stripped before parsing.
    Ranks must be unique positive integers and JIF values non-negative;
    any violation rejects the whole file with a line-numbered report.
    A ranking whose JIF values are not non-increasing by rank is accepted
    with a warning, since real exports occasionally interleave ties.
    """
    cols = columns or RankCsvColumns()
    path = Path(path)
    text = _read_text_with_fallback(path)
    reader = csv.DictReader(text.splitlines())
    header = reader.fieldnames or []
    missing = [c for c in (cols.rank, cols.title, cols.jif) if c not in header]
    if missing:
        raise RankCsvError(
            f"{path}: missing required column(s): {', '.join(missing)}"
        )

    records: list[JournalRecord] = []
    problems: list[str] = []
    seen_ranks: dict[int, int] = {}
    for row in reader:
        line_num = reader.line_num
        raw_rank = (row.get(cols.rank) or "").strip()
        raw_title = (row.get(cols.title) or "").strip()
        raw_jif = (row.get(cols.jif) or "").strip()

        try:
            rank = int(raw_rank.replace(",", ""))
        except ValueError:
            problems.append(f"line {line_num}: unparseable rank {raw_rank!r}")
            continue
        if rank < 1:
            problems.append(f"line {line_num}: rank must be >= 1, got {rank}")
            continue
        if not raw_title:
            problems.append(f"line {line_num}: empty journal title")
            continue
        try:
            jif = float(raw_jif.replace(",", ""))
        except ValueError:
            problems.append(f"line {line_num}: unparseable JIF {raw_jif!r}")
            continue
        if jif < 0:
            problems.append(f"line {line_num}: JIF must be >= 0, got {jif}")
            continue
        if rank in seen_ranks:
            problems.append(
                f"line {line_num}: duplicate rank {rank}"
                f" (first seen on line {seen_ranks[rank]})"
            )
            continue
        seen_ranks[rank] = line_num
        records.append(JournalRecord(rank=rank, title=raw_title, jif=jif))

    if problems:
        raise RankCsvError(f"{path}: {len(problems)} bad row(s):\n" + "\n".join(problems))

    by_rank = sorted(records, key=lambda r: r.rank)
    for prev, cur in zip(by_rank, by_rank[1:]):
        if cur.jif > prev.jif:
            logger.warning(
                "%s: JIF not non-increasing by rank (rank %d has %.3f,"
                " rank %d has %.3f)",
                path, prev.rank, prev.jif, cur.rank, cur.jif,
            )
            break
    return records


def _dedupe_case_insensitive(values: Iterable[str]) -> tuple[str, ...]:
    seen: set[str] = set()
    kept: list[str] = []
    for value in values:
        key = value.casefold()
        if key not in seen:
            seen.add(key)
            kept.append(value)
    return tuple(kept)


def _string_list(value: object, field: str, index: int, problems: list[str]) -> tuple[str, ...] | None:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        problems.append(f"record {index}: {field} must be a list of strings")
        return None
    return tuple(value)


def _parse_record(obj: object, index: int, problems: list[str]) -> DocumentRecord | None:
    if not isinstance(obj, dict):
        problems.append(f"record {index}: not an object")
        return None
    keys = set(obj)
    expected = set(CORPUS_FIELDS)
    if keys != expected:
        missing = sorted(expected - keys)
        extra = sorted(keys - expected)
        detail = []
        if missing:
            detail.append(f"missing {', '.join(missing)}")
        if extra:
            detail.append(f"unexpected {', '.join(extra)}")
        problems.append(f"record {index}: bad field set ({'; '.join(detail)})")
        return None

    title = obj["source_title"]
    if not isinstance(title, str) or not title.strip():
        problems.append(f"record {index}: source_title must be a non-empty string")
        return None
    year = obj["year"]
    if isinstance(year, bool) or not isinstance(year, int):
        problems.append(f"record {index}: year must be an integer")
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        problems.append(
            f"record {index}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"
        )
        return None

    raw_keywords = obj["keywords"]
    if raw_keywords is None:
        keywords: tuple[str, ...] | None = None
    else:
        listed = _string_list(raw_keywords, "keywords", index, problems)
        if listed is None:
            return None
        keywords = _dedupe_case_insensitive(listed)

    areas = _string_list(obj["subject_areas"], "subject_areas", index, problems)
    if areas is None:
        return None
    areas = _dedupe_case_insensitive(areas)
    if not areas:
        problems.append(f"record {index}: subject_areas must be non-empty")
        return None

    authors = _string_list(obj["authors"], "authors", index, problems)
    if authors is None:
        return None
    countries = _string_list(obj["countries"], "countries", index, problems)
    if countries is None:
        return None

    return DocumentRecord(
        source_title=title,
        year=year,
        keywords=keywords,
        subject_areas=areas,
        authors=authors,
        countries=countries,
    )


def load_corpus(path: str | Path) -> list[DocumentRecord]:
    """Load a line-delimited JSON corpus.

    Each line must carry exactly the fields in :data:`CORPUS_FIELDS`.
    Keyword and subject-area lists are deduplicated case-insensitively
    (first spelling wins).  Records identical in every field are collapsed
    to one occurrence and the number removed is logged.  An empty corpus
    is valid but logged as a warning.
    """
    path = Path(path)
    text = _read_text_with_fallback(path)

    records: list[DocumentRecord] = []
    problems: list[str] = []
    seen: set[DocumentRecord] = set()
    duplicates = 0
    index = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        index += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            problems.append(f"record {index}: invalid JSON ({exc.msg})")
            continue
        record = _parse_record(obj, index, problems)
        if record is None:
            continue
        if record in seen:
            duplicates += 1
            continue
        seen.add(record)
        records.append(record)

    if problems:
        raise CorpusSchemaError(
            f"{path}: {len(problems)} bad record(s):\n" + "\n".join(problems)
        )
    if duplicates:
        logger.warning("%s: removed %d duplicate record(s)", path, duplicates)
    if not records:
        logger.warning("%s: corpus is empty", path)
    return records


def dump_corpus(records: Sequence[DocumentRecord], path: str | Path) -> None:
    """Write records back out in the same line-delimited JSON schema."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for record in records:
            obj = {
                "source_title": record.source_title,
                "year": record.year,
                "keywords": None if record.keywords is None else list(record.keywords),
                "subject_areas": list(record.subject_areas),
                "authors": list(record.authors),
                "countries": list(record.countries),
            }
            handle.write(json.dumps(obj, ensure_ascii=False) + "\n")
