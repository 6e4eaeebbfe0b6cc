"""Aggregate reports over the final document set.

The final set is the intersection of four filters: document belongs to one
of the selected journals, falls inside the report window, carries the
target keyword, and is indexed in the target subject area.  All report
orderings are deterministic: counts descend, ties resolve alphabetically.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .ingest import DocumentRecord, JournalRecord
from .names import UnnormalizableTitleError, normalize_title

__all__ = [
    "ReportBundle",
    "area_overlap",
    "build_reports",
    "select_final_set",
    "write_report_files",
]

REPORT_FILES = (
    "report_per_year.csv",
    "report_per_country.csv",
    "report_per_author.csv",
    "report_top_keywords.csv",
    "report_area_overlap.csv",
    "report_bundle.jsonl",
)


@dataclass(frozen=True)
class ReportBundle:
    per_year: dict[int, int]
    per_country: list[tuple[str, int]]
    per_author: list[tuple[str, int]]
    top_keywords: list[tuple[str, int]]
    area_overlap: dict[str, int]


def select_final_set(
    corpus: Sequence[DocumentRecord],
    journals: Iterable[JournalRecord | str],
    keyword: str,
    subject_area: str,
    window: tuple[int, int],
) -> list[DocumentRecord]:
    """Filter the corpus down to the final document set.

    ``journals`` may mix ranking records and raw source-title strings;
    membership is decided on normalized titles.  The window is inclusive
    on both ends.
    """
    start, end = window
    if start > end:
        raise ValueError(f"window start {start} is after end {end}")
    wanted_titles = set()
    for journal in journals:
        title = journal if isinstance(journal, str) else journal.title
        wanted_titles.add(normalize_title(title).words)
    wanted_keyword = keyword.casefold()
    wanted_area = subject_area.casefold()

    selected = []
    for doc in corpus:
        try:
            tokens = normalize_title(doc.source_title).words
        except UnnormalizableTitleError:
            continue
        if tokens not in wanted_titles:
            continue
        if not start <= doc.year <= end:
            continue
        if doc.keywords is None or not any(
            k.casefold() == wanted_keyword for k in doc.keywords
        ):
            continue
        if not any(a.casefold() == wanted_area for a in doc.subject_areas):
            continue
        selected.append(doc)
    return selected


def _ranked(counts: dict[str, int]) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def build_reports(docs: Sequence[DocumentRecord]) -> ReportBundle:
    """Aggregate the final set into the report bundle.

    A document with several countries (or authors) counts once for each
    listed value.  Every document contributes to exactly one subject-area
    combination: the full sorted set of its areas.
    """
    per_year: dict[int, int] = {}
    countries: dict[str, int] = {}
    authors: dict[str, int] = {}
    keywords: dict[str, int] = {}
    combinations: dict[str, int] = {}
    for doc in docs:
        per_year[doc.year] = per_year.get(doc.year, 0) + 1
        for country in doc.countries:
            countries[country] = countries.get(country, 0) + 1
        for author in doc.authors:
            authors[author] = authors.get(author, 0) + 1
        if doc.keywords is not None:
            for keyword in doc.keywords:
                keywords[keyword] = keywords.get(keyword, 0) + 1
        combo = " + ".join(sorted(doc.subject_areas))
        combinations[combo] = combinations.get(combo, 0) + 1

    return ReportBundle(
        per_year=dict(sorted(per_year.items())),
        per_country=_ranked(countries),
        per_author=_ranked(authors),
        top_keywords=_ranked(keywords),
        area_overlap=dict(
            sorted(combinations.items(), key=lambda kv: (-kv[1], kv[0]))
        ),
    )


def area_overlap(
    docs: Sequence[DocumentRecord],
    area_a: str,
    area_b: str,
) -> tuple[int, int, int]:
    """Partition documents carrying either area into (both, only_a, only_b)."""
    wanted_a = area_a.casefold()
    wanted_b = area_b.casefold()
    both = only_a = only_b = 0
    for doc in docs:
        areas = {a.casefold() for a in doc.subject_areas}
        has_a = wanted_a in areas
        has_b = wanted_b in areas
        if has_a and has_b:
            both += 1
        elif has_a:
            only_a += 1
        elif has_b:
            only_b += 1
    return both, only_a, only_b


def _write_csv(path: Path, header: list[str], rows: Iterable[Iterable]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(list(row))


def write_report_files(bundle: ReportBundle, output_dir: str | Path) -> list[Path]:
    """Write the five CSV reports plus the line-delimited bundle file."""
    output_dir = Path(output_dir)
    paths = [output_dir / name for name in REPORT_FILES]
    per_year_p, country_p, author_p, keywords_p, overlap_p, bundle_p = paths

    _write_csv(per_year_p, ["year", "count"], bundle.per_year.items())
    _write_csv(country_p, ["country", "count"], bundle.per_country)
    _write_csv(author_p, ["author", "count"], bundle.per_author)
    _write_csv(keywords_p, ["keyword", "count"], bundle.top_keywords)
    _write_csv(overlap_p, ["combination", "count"], bundle.area_overlap.items())

    with bundle_p.open("w", encoding="utf-8") as handle:
        for year, count in bundle.per_year.items():
            handle.write(json.dumps({"section": "per_year", "year": year, "count": count}) + "\n")
        for country, count in bundle.per_country:
            handle.write(json.dumps({"section": "per_country", "country": country, "count": count}) + "\n")
        for author, count in bundle.per_author:
            handle.write(json.dumps({"section": "per_author", "author": author, "count": count}) + "\n")
        for keyword, count in bundle.top_keywords:
            handle.write(json.dumps({"section": "top_keywords", "keyword": keyword, "count": count}) + "\n")
        for combo, count in bundle.area_overlap.items():
            handle.write(json.dumps({"section": "area_overlap", "combination": combo, "count": count}) + "\n")
    return paths
