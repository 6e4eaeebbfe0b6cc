"""Query clients: a deterministic simulated portal and a live HTTP adapter.

The search cascade runs against anything satisfying :class:`QueryClient`.
:class:`SimulatedPortal` answers from an in-memory corpus and renders the
same subject-area facet HTML a browser would scrape, including the
case-sensitive display-title registry that makes naively re-typed titles
(acronyms rendered as "Jama") miss on an exact query.  The live adapter
speaks HTTP with rate limiting and bounded retries but cannot enumerate
result documents; it exists so the cascade's transport error handling has
a real contract to hold on to.
"""

from __future__ import annotations

import html
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence, runtime_checkable

import requests

from .ingest import DocumentRecord
from .names import NormalizedName, normalize_title, render_title_case

__all__ = [
    "AuthWallError",
    "LiveAdapterConfig",
    "LivePortalAdapter",
    "LiveQueryClient",
    "PortalError",
    "PortalStatusError",
    "QueryClient",
    "RateLimitError",
    "RateLimiter",
    "SearchResponse",
    "SimulatedPortal",
    "TransportError",
    "render_facet_html",
]

logger = logging.getLogger(__name__)

FACET_LIST_ID = "cluster_SUBJAREA"


class PortalError(Exception):
    """Base class for query-client failures."""


class TransportError(PortalError):
    """Network-level failure; the run driver may retry the journal once."""


class PortalStatusError(TransportError):
    """Non-success HTTP status from the portal."""


class RateLimitError(TransportError):
    """Portal kept answering 429 after the configured retry budget."""


class AuthWallError(PortalError):
    """Response looks like a login page; the run cannot continue."""


@dataclass(frozen=True)
class SearchResponse:
    """Outcome of one portal query.

    ``found`` false implies empty ``source_titles`` and ``documents``.
    ``documents`` stays empty for adapters that cannot enumerate results.
    """

    found: bool
    facet_html: str
    source_titles: tuple[str, ...] = ()
    documents: tuple[DocumentRecord, ...] = ()

    def __post_init__(self) -> None:
        if not self.found and (self.source_titles or self.documents):
            raise ValueError("found=false response must carry no results")


@runtime_checkable
class QueryClient(Protocol):
    """What the search cascade needs from a portal."""

    min_delay_ms: int

    def exact_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        ...

    def relaxed_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        ...

    def cluster_exact_query(self, verbatim_source_title: str, year_floor: int) -> SearchResponse:
        ...


def render_facet_html(documents: Sequence[DocumentRecord]) -> str:
    """Render the subject-area facet fragment for a result set.

    Counts are per-document indexations: a document indexed in two areas
    contributes one to each.  Spellings are grouped case-insensitively and
    displayed with the first spelling seen.
    """
    counts: dict[str, int] = {}
    display: dict[str, str] = {}
    for doc in documents:
        for area in doc.subject_areas:
            key = area.casefold()
            display.setdefault(key, area)
            counts[key] = counts.get(key, 0) + 1
    items = sorted(counts.items(), key=lambda kv: (-kv[1], display[kv[0]]))
    parts = [f'<ul id="{FACET_LIST_ID}">']
    for key, count in items:
        name = html.escape(display[key])
        parts.append(
            f'<li><span class="btnText">{name}</span>'
            f'<span class="btnBadge">{count}</span></li>'
        )
    parts.append("</ul>")
    return "".join(parts)


class SimulatedPortal:
    """Deterministic corpus-backed portal.

    Each distinct source title in the corpus is registered as the display
    title for its normalized token sequence (first spelling wins).  An
    exact query only succeeds when the title-cased rendering of the query
    equals that registered display title, mirroring portals whose exact
    search is case-sensitive.
    """

    min_delay_ms = 0

    def __init__(self, corpus: Iterable[DocumentRecord]):
        self._docs_by_tokens: dict[tuple[str, ...], list[DocumentRecord]] = {}
        self._docs_by_title: dict[str, list[DocumentRecord]] = {}
        self._registered: dict[tuple[str, ...], str] = {}
        self._titles_by_token: dict[str, list[str]] = {}
        self._title_order: dict[str, int] = {}
        for doc in corpus:
            title = doc.source_title
            if title not in self._docs_by_title:
                self._docs_by_title[title] = []
                self._title_order[title] = len(self._title_order)
                tokens = normalize_title(title).words
                self._registered.setdefault(tokens, title)
                for token in dict.fromkeys(tokens):
                    self._titles_by_token.setdefault(token, []).append(title)
            self._docs_by_title[title].append(doc)
            tokens = normalize_title(title).words
            self._docs_by_tokens.setdefault(tokens, []).append(doc)

    @staticmethod
    def _not_found() -> SearchResponse:
        return SearchResponse(found=False, facet_html="")

    def _response(self, documents: list[DocumentRecord]) -> SearchResponse:
        if not documents:
            return self._not_found()
        titles = tuple(dict.fromkeys(doc.source_title for doc in documents))
        return SearchResponse(
            found=True,
            facet_html=render_facet_html(documents),
            source_titles=titles,
            documents=tuple(documents),
        )

    def exact_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        registered = self._registered.get(name.words)
        if registered is None or render_title_case(name) != registered:
            return self._not_found()
        docs = [d for d in self._docs_by_tokens[name.words] if d.year > year_floor]
        return self._response(docs)

    def relaxed_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        hit_titles: set[str] = set()
        for token in dict.fromkeys(name.words):
            hit_titles.update(self._titles_by_token.get(token, ()))
        docs: list[DocumentRecord] = []
        for title in sorted(hit_titles, key=self._title_order.__getitem__):
            docs.extend(d for d in self._docs_by_title[title] if d.year > year_floor)
        return self._response(docs)

    def cluster_exact_query(self, verbatim_source_title: str, year_floor: int) -> SearchResponse:
        docs = [
            d
            for d in self._docs_by_title.get(verbatim_source_title, [])
            if d.year > year_floor
        ]
        return self._response(docs)


class RateLimiter:
    """Enforces a minimum delay between consecutive requests."""

    def __init__(self, min_delay_ms: int):
        self.min_delay_ms = min_delay_ms
        self._last: float | None = None

    def wait(self) -> None:
        if self._last is not None:
            remaining = self._last + self.min_delay_ms / 1000.0 - time.monotonic()
            if remaining > 0:
                time.sleep(remaining)
        self._last = time.monotonic()


@dataclass
class LiveAdapterConfig:
    """Markers and retry budget for the live HTTP adapter.

    The zero-results and auth-wall markers are matched as substrings of the
    response body; portals differ, so both are configurable.
    """

    zero_results_marker: str = "did not match any documents"
    auth_wall_marker: str = "You do not have access"
    max_retries: int = 3
    backoff_base_s: float = 0.5
    timeout_s: float = 30.0


class LivePortalAdapter:
    """Fetches result pages over HTTP and maps failures to error kinds.

    HTTP 429 is retried with linear backoff up to ``max_retries`` times and
    then surfaces as :class:`RateLimitError`; other non-success statuses
    raise :class:`PortalStatusError` immediately; network failures raise
    :class:`TransportError`; an auth-wall body raises
    :class:`AuthWallError`, which the run driver treats as fatal.
    """

    def __init__(
        self,
        config: LiveAdapterConfig | None = None,
        session: requests.Session | None = None,
        min_delay_ms: int = 1000,
    ):
        self.config = config or LiveAdapterConfig()
        self._session = session if session is not None else requests.Session()
        self._limiter = RateLimiter(min_delay_ms)

    @property
    def min_delay_ms(self) -> int:
        return self._limiter.min_delay_ms

    def request(self, url: str) -> SearchResponse:
        cfg = self.config
        attempts = 0
        while True:
            self._limiter.wait()
            try:
                response = self._session.get(url, timeout=cfg.timeout_s)
            except requests.RequestException as exc:
                raise TransportError(f"network failure for {url}: {exc}") from exc
            if response.status_code == 429:
                attempts += 1
                if attempts > cfg.max_retries:
                    raise RateLimitError(
                        f"portal rate limit persisted after {cfg.max_retries} retries"
                    )
                time.sleep(cfg.backoff_base_s * attempts)
                continue
            if response.status_code != 200:
                raise PortalStatusError(
                    f"portal answered HTTP {response.status_code} for {url}"
                )
            body = response.text
            if cfg.auth_wall_marker and cfg.auth_wall_marker in body:
                raise AuthWallError(f"auth wall detected for {url}")
            if cfg.zero_results_marker and cfg.zero_results_marker in body:
                return SearchResponse(found=False, facet_html="")
            return SearchResponse(found=True, facet_html=body)


class LiveQueryClient:
    """Adapts :class:`LivePortalAdapter` to the :class:`QueryClient` shape.

    URL construction is injected so the query grammar stays owned by the
    search layer.  Responses carry the raw page as ``facet_html`` and no
    enumerated documents or source titles, which limits the cascade to its
    exact/relaxed/dismissed decisions.
    """

    def __init__(
        self,
        adapter: LivePortalAdapter,
        base_url: str,
        build_exact_url: Callable[[NormalizedName, int], str],
        build_relaxed_url: Callable[[NormalizedName, int], str],
        build_cluster_url: Callable[[str, int], str],
    ):
        self._adapter = adapter
        self._base = base_url.rstrip("/") + "/"
        self._build_exact = build_exact_url
        self._build_relaxed = build_relaxed_url
        self._build_cluster = build_cluster_url

    @property
    def min_delay_ms(self) -> int:
        return self._adapter.min_delay_ms

    def exact_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        return self._adapter.request(self._base + self._build_exact(name, year_floor))

    def relaxed_title_query(self, name: NormalizedName, year_floor: int) -> SearchResponse:
        return self._adapter.request(self._base + self._build_relaxed(name, year_floor))

    def cluster_exact_query(self, verbatim_source_title: str, year_floor: int) -> SearchResponse:
        return self._adapter.request(
            self._base + self._build_cluster(verbatim_source_title, year_floor)
        )
