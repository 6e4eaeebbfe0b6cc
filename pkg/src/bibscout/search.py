"""Tagged search cascade over a ranked journal list.

Each journal gets at most three queries: an exact title search, a relaxed
(any-shared-word) search, and, when the relaxed results fuzzy-match a
single source title, a verbatim search restricted to that title.  Every
journal ends in exactly one tag; ``Dismissed`` journals are counted but
never appear in the output list, and the run stops once the output list
reaches the configured size.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from enum import Enum
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Sequence

from .datasource import (
    FACET_LIST_ID,
    AuthWallError,
    PortalError,
    QueryClient,
    TransportError,
)
from .ingest import JournalRecord
from .names import (
    NormalizedName,
    UnnormalizableTitleError,
    normalize_title,
    render_title_case,
    word_overlap_match,
)

__all__ = [
    "OUTCOME_CSV_COLUMNS",
    "RunAborted",
    "RunConfig",
    "RunError",
    "RunResult",
    "SearchOutcome",
    "Tag",
    "build_cluster_search_url",
    "build_exact_search_url",
    "build_relaxed_search_url",
    "classify_journal",
    "parse_subject_facet",
    "read_outcomes_csv",
    "run_filter",
    "write_outcomes_csv",
]

logger = logging.getLogger(__name__)

OUTCOME_CSV_COLUMNS = (
    "journal_name",
    "jcr_rank",
    "jif",
    "tag",
    "matched_source_title",
)


class Tag(str, Enum):
    """Terminal states of the cascade."""

    FOUND = "Found"
    DISMISSED = "Dismissed"
    NOT_FOUND = "NotFound"
    PROBABLY_OK = "ProbablyOK"
    PROBABLY_FALSE = "ProbablyFalse"
    UNSURE = "Unsure"


OUTPUT_TAGS = (
    Tag.FOUND,
    Tag.NOT_FOUND,
    Tag.PROBABLY_OK,
    Tag.PROBABLY_FALSE,
    Tag.UNSURE,
)


@dataclass(frozen=True)
class SearchOutcome:
    journal: JournalRecord
    tag: Tag
    matched_source_title: str | None
    queries_issued: int


@dataclass(frozen=True)
class RunConfig:
    stop_count: int = 50
    year_floor: int = 2005
    target_subject_area: str = "Social Sciences"

    def __post_init__(self) -> None:
        if self.stop_count < 1:
            raise ValueError("stop_count must be >= 1")


@dataclass(frozen=True)
class RunError:
    journal: JournalRecord
    message: str


@dataclass
class RunResult:
    outcomes: list[SearchOutcome]
    searched_count: int
    dismissed_count: int
    errors: list[RunError] = field(default_factory=list)


class RunAborted(PortalError):
    """Unrecoverable client failure; carries the partial run for salvage."""

    def __init__(self, partial: RunResult, cause: Exception):
        super().__init__(f"run aborted: {cause}")
        self.partial = partial
        self.cause = cause


class _FacetParser(HTMLParser):
    # Tolerant by construction: anything outside the target <ul> is ignored,
    # badges apply to the most recent un-badged name, and unparseable badge
    # text falls back to the implicit count of 1.

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.entries: list[list] = []  # [name, count | None]
        self._ul_depth = 0
        self._span_role: str | None = None
        self._buffer: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        attr_map = {k: (v or "") for k, v in attrs}
        if tag == "ul":
            if self._ul_depth > 0:
                self._ul_depth += 1
            elif attr_map.get("id") == FACET_LIST_ID:
                self._ul_depth = 1
            return
        if tag == "span" and self._ul_depth > 0:
            classes = attr_map.get("class", "").split()
            if "btnText" in classes:
                self._span_role = "name"
                self._buffer = []
            elif "btnBadge" in classes:
                self._span_role = "badge"
                self._buffer = []

    def handle_endtag(self, tag: str) -> None:
        if tag == "ul" and self._ul_depth > 0:
            self._ul_depth -= 1
            return
        if tag == "span" and self._span_role is not None:
            text = "".join(self._buffer).strip()
            if self._span_role == "name":
                if text:
                    self.entries.append([text, None])
            else:
                try:
                    count = int(text.replace(",", ""))
                except ValueError:
                    count = None
                if count is not None and self.entries and self.entries[-1][1] is None:
                    self.entries[-1][1] = count
            self._span_role = None
            self._buffer = []

    def handle_data(self, data: str) -> None:
        if self._span_role is not None:
            self._buffer.append(data)


def parse_subject_facet(facet_html: str) -> dict[str, int]:
    """Extract the subject-area histogram from a facet HTML fragment.

    Missing list, malformed markup, or an empty fragment all produce an
    empty histogram rather than an error.  An entry without a count badge
    counts as 1.
    """
    parser = _FacetParser()
    parser.feed(facet_html)
    parser.close()
    histogram: dict[str, int] = {}
    for name, count in parser.entries:
        histogram[name] = histogram.get(name, 0) + (count if count is not None else 1)
    return histogram


def _plus_join(words: Iterable[str]) -> str:
    return "+".join(words)


def build_exact_search_url(name: NormalizedName, year_floor: int) -> str:
    """Exact-source-title query URL, cluster-restricted to the title-cased form."""
    lowered = _plus_join(name.words)
    titled = _plus_join(render_title_case(name).split(" "))
    return (
        "results/results.uri?src=s&sot=a"
        f"&s=EXACTSRCTITLE({lowered})+AND+PUBYEAR+>+{year_floor}"
        f'&cluster=scoexactsrctitle,"{titled}",t'
    )


def build_relaxed_search_url(name: NormalizedName, year_floor: int) -> str:
    """Relaxed query URL: same grammar, SRCTITLE match, no cluster term."""
    lowered = _plus_join(name.words)
    return (
        "results/results.uri?src=s&sot=a"
        f"&s=SRCTITLE({lowered})+AND+PUBYEAR+>+{year_floor}"
    )


def build_cluster_search_url(verbatim_source_title: str, year_floor: int) -> str:
    """Exact query URL for a source title kept verbatim in the cluster term."""
    lowered = _plus_join(verbatim_source_title.casefold().split())
    verbatim = _plus_join(verbatim_source_title.split())
    return (
        "results/results.uri?src=s&sot=a"
        f"&s=EXACTSRCTITLE({lowered})+AND+PUBYEAR+>+{year_floor}"
        f'&cluster=scoexactsrctitle,"{verbatim}",t'
    )


def _facet_has_area(facet_html: str, area: str) -> bool:
    wanted = area.casefold()
    histogram = parse_subject_facet(facet_html)
    return any(name.casefold() == wanted and count > 0 for name, count in histogram.items())


def classify_journal(
    journal: JournalRecord,
    client: QueryClient,
    config: RunConfig,
) -> SearchOutcome:
    """Run the three-step cascade for one journal and return its tag.

    Steps, in order: exact title query (Found/Dismissed), relaxed query
    (NotFound/Dismissed/Found-if-single-title), then a verbatim cluster
    query on the first fuzzy-matched source title (ProbablyOK versus
    ProbablyFalse); with no fuzzy match the journal is Unsure.  Transport
    errors propagate to the run driver.
    """
    name = normalize_title(journal.title)
    target = config.target_subject_area

    exact = client.exact_title_query(name, config.year_floor)
    if exact.found:
        tag = Tag.FOUND if _facet_has_area(exact.facet_html, target) else Tag.DISMISSED
        return SearchOutcome(journal, tag, None, queries_issued=1)

    relaxed = client.relaxed_title_query(name, config.year_floor)
    if not relaxed.found:
        return SearchOutcome(journal, Tag.NOT_FOUND, None, queries_issued=2)
    if not _facet_has_area(relaxed.facet_html, target):
        return SearchOutcome(journal, Tag.DISMISSED, None, queries_issued=2)
    if len(relaxed.source_titles) == 1:
        return SearchOutcome(journal, Tag.FOUND, None, queries_issued=2)

    for candidate in relaxed.source_titles:
        try:
            candidate_name = normalize_title(candidate)
        except UnnormalizableTitleError:
            continue
        if not word_overlap_match(name, candidate_name):
            continue
        cluster = client.cluster_exact_query(candidate, config.year_floor)
        ok = cluster.found and _facet_has_area(cluster.facet_html, target)
        tag = Tag.PROBABLY_OK if ok else Tag.PROBABLY_FALSE
        return SearchOutcome(journal, tag, candidate, queries_issued=3)

    return SearchOutcome(journal, Tag.UNSURE, None, queries_issued=2)


def _classify_with_retry(
    journal: JournalRecord,
    client: QueryClient,
    config: RunConfig,
    errors: list[RunError],
) -> SearchOutcome | None:
    try:
        return classify_journal(journal, client, config)
    except TransportError as exc:
        logger.warning("transport error on %r, retrying once: %s", journal.title, exc)
        try:
            return classify_journal(journal, client, config)
        except TransportError as again:
            errors.append(RunError(journal, str(again)))
            logger.error("giving up on %r after retry: %s", journal.title, again)
            return None


def run_filter(
    ranking: Sequence[JournalRecord],
    client: QueryClient,
    config: RunConfig | None = None,
) -> RunResult:
    """Walk the ranking in order until the output list is full.

    Dismissed journals are counted as searched but never emitted.  A
    transport error fails a journal only after one retry, and is then
    recorded as a run error distinct from ``NotFound``.  Any other client
    failure aborts the run, carrying the partial result.
    """
    config = config or RunConfig()
    outcomes: list[SearchOutcome] = []
    errors: list[RunError] = []
    searched = 0
    dismissed = 0
    for journal in sorted(ranking, key=lambda j: j.rank):
        searched += 1
        try:
            outcome = _classify_with_retry(journal, client, config, errors)
        except PortalError as exc:
            partial = RunResult(outcomes, searched, dismissed, errors)
            raise RunAborted(partial, exc) from exc
        if outcome is None:
            continue
        if outcome.tag is Tag.DISMISSED:
            dismissed += 1
            continue
        outcomes.append(outcome)
        if len(outcomes) >= config.stop_count:
            break

    _check_result_invariants(outcomes)
    return RunResult(outcomes, searched, dismissed, errors)


def _check_result_invariants(outcomes: Sequence[SearchOutcome]) -> None:
    seen: set[tuple[int, str]] = set()
    for outcome in outcomes:
        if outcome.tag not in OUTPUT_TAGS:
            raise RuntimeError(f"{outcome.tag} must never reach the output list")
        if outcome.queries_issued not in (1, 2, 3):
            raise RuntimeError(
                f"impossible query count {outcome.queries_issued}"
                f" for {outcome.journal.title!r}"
            )
        key = (outcome.journal.rank, outcome.journal.title)
        if key in seen:
            raise RuntimeError(f"journal {outcome.journal.title!r} emitted twice")
        seen.add(key)


def write_outcomes_csv(result: RunResult, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(OUTCOME_CSV_COLUMNS)
        for outcome in result.outcomes:
            writer.writerow(
                [
                    outcome.journal.title,
                    outcome.journal.rank,
                    outcome.journal.jif,
                    outcome.tag.value,
                    outcome.matched_source_title or "",
                ]
            )


def read_outcomes_csv(path: str | Path) -> list[SearchOutcome]:
    path = Path(path)
    outcomes: list[SearchOutcome] = []
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            journal = JournalRecord(
                rank=int(row["jcr_rank"]),
                title=row["journal_name"],
                jif=float(row["jif"]),
            )
            outcomes.append(
                SearchOutcome(
                    journal=journal,
                    tag=Tag(row["tag"]),
                    matched_source_title=row["matched_source_title"] or None,
                    queries_issued=0,
                )
            )
    return outcomes
