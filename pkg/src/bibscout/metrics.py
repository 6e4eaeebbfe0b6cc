"""Post-filter journal metrics: subject-area share, cutoff, top-K table.

Candidates come out of the search run; documents come from the corpus.
A journal's documents are resolved by normalized-title match, through the
fuzzy-matched source title when the cascade recorded one.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import DocumentRecord, JournalRecord
from .names import UnnormalizableTitleError, normalize_title

__all__ = [
    "JournalMetrics",
    "compute_journal_metrics",
    "count_keyword_docs",
    "metrics_csv_columns",
    "one_percent_cutoff",
    "read_metrics_csv",
    "ss_relative_index",
    "top_k_by_jif",
    "write_metrics_csv",
]

logger = logging.getLogger(__name__)

DEFAULT_TARGET_AREA = "Social Sciences"


@dataclass(frozen=True)
class JournalMetrics:
    journal: JournalRecord
    total_docs: int
    ss_docs: int
    area_histogram: dict[str, int]
    ss_relative_index: float
    keyword_occurrences: int | None  # None renders as "Null": no keyword data


@lru_cache(maxsize=None)
def _title_tokens(title: str) -> tuple[str, ...]:
    return normalize_title(title).words


def _docs_for_title(corpus: Sequence[DocumentRecord], title: str) -> list[DocumentRecord]:
    wanted = _title_tokens(title)
    matched = []
    for doc in corpus:
        try:
            if _title_tokens(doc.source_title) == wanted:
                matched.append(doc)
        except UnnormalizableTitleError:
            continue
    return matched


def ss_relative_index(histogram: dict[str, int], area: str = DEFAULT_TARGET_AREA) -> float:
    """Share of the target area's count in the whole histogram; 0 if empty."""
    total = sum(histogram.values())
    if total == 0:
        return 0.0
    wanted = area.casefold()
    hits = sum(count for name, count in histogram.items() if name.casefold() == wanted)
    return hits / total


def one_percent_cutoff(
    candidates: Iterable[JournalMetrics],
    cutoff: float = 0.01,
) -> list[JournalMetrics]:
    """Keep journals whose target-area document share meets the cutoff.

    The bar is inclusive (exactly 1% survives).  Journals with zero
    documents cannot be assessed and are excluded with a warning.
    """
    retained = []
    for metrics in candidates:
        if metrics.total_docs == 0:
            logger.warning(
                "excluding %r: no documents to assess", metrics.journal.title
            )
            continue
        if metrics.ss_docs / metrics.total_docs >= cutoff:
            retained.append(metrics)
    return retained


def top_k_by_jif(retained: Sequence[JournalMetrics], k: int = 15) -> list[JournalMetrics]:
    """Top k by descending JIF; ties broken by ascending rank."""
    ordered = sorted(retained, key=lambda m: (-m.journal.jif, m.journal.rank))
    return ordered[: max(k, 0)]


def count_keyword_docs(
    corpus: Sequence[DocumentRecord],
    journal: JournalRecord | str,
    keyword: str,
    window: tuple[int, int],
) -> int:
    """Documents of a journal carrying the keyword inside an inclusive window.

    Keyword comparison is case-insensitive and whole-keyword exact:
    "climate change" matches "Climate Change" but not "Climate Changes".
    Documents without keyword data never match.
    """
    start, end = window
    if start > end:
        raise ValueError(f"window start {start} is after end {end}")
    title = journal if isinstance(journal, str) else journal.title
    wanted = keyword.casefold()
    count = 0
    for doc in _docs_for_title(corpus, title):
        if not start <= doc.year <= end:
            continue
        if doc.keywords is None:
            continue
        if any(k.casefold() == wanted for k in doc.keywords):
            count += 1
    return count


def compute_journal_metrics(
    corpus: Sequence[DocumentRecord],
    journal: JournalRecord,
    *,
    lookup_title: str | None = None,
    year_floor: int = 2005,
    keyword: str = "Climate Change",
    keyword_window: tuple[int, int] = (2006, 2018),
    target_area: str = DEFAULT_TARGET_AREA,
) -> JournalMetrics:
    """Assemble the metrics row for one journal.

    Document and area counts cover everything after ``year_floor``; the
    keyword count is restricted to ``keyword_window`` (inclusive).  When no
    in-window document carries keyword data at all, the count is ``None``.
    """
    docs = [
        d
        for d in _docs_for_title(corpus, lookup_title or journal.title)
        if d.year > year_floor
    ]
    histogram: dict[str, int] = {}
    display: dict[str, str] = {}
    ss_docs = 0
    wanted_area = target_area.casefold()
    for doc in docs:
        in_area = False
        for area in doc.subject_areas:
            key = area.casefold()
            display.setdefault(key, area)
            histogram[display[key]] = histogram.get(display[key], 0) + 1
            if key == wanted_area:
                in_area = True
        if in_area:
            ss_docs += 1

    start, end = keyword_window
    window_docs = [d for d in docs if start <= d.year <= end]
    with_keyword_data = [d for d in window_docs if d.keywords is not None]
    if not with_keyword_data:
        occurrences: int | None = None
    else:
        wanted = keyword.casefold()
        occurrences = sum(
            1
            for d in with_keyword_data
            if any(k.casefold() == wanted for k in d.keywords)
        )

    return JournalMetrics(
        journal=journal,
        total_docs=len(docs),
        ss_docs=ss_docs,
        area_histogram=histogram,
        ss_relative_index=ss_relative_index(histogram, target_area),
        keyword_occurrences=occurrences,
    )


def metrics_csv_columns(keyword: str) -> list[str]:
    return [
        "Rank",
        "Journal Title",
        "JIF",
        "Papers Number",
        "SS Papers Number",
        "SS Relative Index",
        f'Occurrence of "{keyword}"',
    ]


def write_metrics_csv(
    rows: Sequence[JournalMetrics],
    path: str | Path,
    keyword: str = "Climate Change",
) -> None:
    """Write the journal table; absent keyword counts render as ``Null``."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(metrics_csv_columns(keyword))
        for metrics in rows:
            occurrences = (
                "Null"
                if metrics.keyword_occurrences is None
                else metrics.keyword_occurrences
            )
            writer.writerow(
                [
                    metrics.journal.rank,
                    metrics.journal.title,
                    metrics.journal.jif,
                    metrics.total_docs,
                    metrics.ss_docs,
                    f"{metrics.ss_relative_index * 100:.1f}%",
                    occurrences,
                ]
            )


def read_metrics_csv(path: str | Path, keyword: str = "Climate Change") -> list[dict]:
    """Read the table back as dicts with typed values (inverse of the writer)."""
    path = Path(path)
    rows: list[dict] = []
    occurrence_col = f'Occurrence of "{keyword}"'
    with path.open("r", encoding="utf-8", newline="") as handle:
        for row in csv.DictReader(handle):
            raw_occ = row[occurrence_col]
            rows.append(
                {
                    "rank": int(row["Rank"]),
                    "title": row["Journal Title"],
                    "jif": float(row["JIF"]),
                    "total_docs": int(row["Papers Number"]),
                    "ss_docs": int(row["SS Papers Number"]),
                    "ss_relative_index": float(row["SS Relative Index"].rstrip("%")) / 100,
                    "keyword_occurrences": None if raw_occ == "Null" else int(raw_occ),
                }
            )
    return rows
