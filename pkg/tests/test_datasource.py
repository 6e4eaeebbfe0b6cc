from __future__ import annotations

import time

import pytest
import requests

from bibscout.datasource import (
    AuthWallError,
    LiveAdapterConfig,
    LivePortalAdapter,
    LiveQueryClient,
    PortalStatusError,
    QueryClient,
    RateLimitError,
    RateLimiter,
    SearchResponse,
    SimulatedPortal,
    TransportError,
    render_facet_html,
)
from bibscout.ingest import DocumentRecord
from bibscout.names import normalize_title


def doc(title, year=2010, areas=("Social Sciences",), keywords=()):
    return DocumentRecord(
        source_title=title,
        year=year,
        keywords=tuple(keywords),
        subject_areas=tuple(areas),
        authors=("Doe, J.",),
        countries=("Norway",),
    )


def test_search_response_rejects_payload_when_not_found():
    with pytest.raises(ValueError):
        SearchResponse(found=False, facet_html="", source_titles=("Nature",))


def test_render_facet_html_counts_and_orders():
    docs = [
        doc("A", areas=("Medicine", "Social Sciences")),
        doc("A", year=2011, areas=("medicine",)),
        doc("A", year=2012, areas=("Arts",)),
    ]
    html = render_facet_html(docs)
    assert html.startswith('<ul id="cluster_SUBJAREA">')
    # Medicine (2) first, then count-1 areas alphabetically; first spelling wins.
    assert html.index(">Medicine<") < html.index(">Arts<")
    assert html.index(">Arts<") < html.index(">Social Sciences<")
    assert '<span class="btnBadge">2</span>' in html


def test_render_facet_html_escapes_markup():
    html = render_facet_html([doc("A", areas=("R&D <Systems>",))])
    assert "R&amp;D &lt;Systems&gt;" in html
    assert "<Systems>" not in html


def test_simulated_portal_satisfies_client_protocol(portal):
    assert isinstance(portal, QueryClient)


def test_exact_query_requires_rendered_spelling_to_match():
    portal = SimulatedPortal([doc("JAMA")])
    name = normalize_title("jama")
    # The registered display title is the all-caps original, the rendered
    # query string is "Jama"; a case-sensitive portal cannot match them.
    assert portal.exact_title_query(name, 2005).found is False
    relaxed = portal.relaxed_title_query(name, 2005)
    assert relaxed.found is True
    assert relaxed.source_titles == ("JAMA",)


def test_exact_query_hits_title_cased_registration():
    portal = SimulatedPortal([doc("Nature Climate Change")])
    response = portal.exact_title_query(normalize_title("Nature Climate Change"), 2005)
    assert response.found is True
    assert response.source_titles == ("Nature Climate Change",)


def test_exact_query_applies_year_floor_strictly():
    portal = SimulatedPortal(
        [doc("Nature", year=2005), doc("Nature", year=2006)]
    )
    response = portal.exact_title_query(normalize_title("Nature"), 2005)
    assert response.found is True
    assert [d.year for d in response.documents] == [2006]
    assert portal.exact_title_query(normalize_title("Nature"), 2006).found is False


def test_relaxed_query_unions_token_hits_in_first_seen_order():
    portal = SimulatedPortal(
        [doc("Social Forces"), doc("Social Text"), doc("Forces Quarterly")]
    )
    response = portal.relaxed_title_query(normalize_title("social forces"), 2005)
    assert response.source_titles == (
        "Social Forces", "Social Text", "Forces Quarterly",
    )


def test_cluster_query_is_verbatim_and_case_sensitive():
    portal = SimulatedPortal([doc("NATURE MATERIALS")])
    assert portal.cluster_exact_query("NATURE MATERIALS", 2005).found is True
    assert portal.cluster_exact_query("Nature Materials", 2005).found is False


def test_rate_limiter_spaces_consecutive_calls():
    limiter = RateLimiter(min_delay_ms=30)
    limiter.wait()
    start = time.monotonic()
    limiter.wait()
    assert time.monotonic() - start >= 0.025


def test_rate_limiter_zero_delay_does_not_sleep():
    limiter = RateLimiter(min_delay_ms=0)
    start = time.monotonic()
    for _ in range(50):
        limiter.wait()
    assert time.monotonic() - start < 0.5


class StubResponse:
    def __init__(self, status_code=200, text="<ul></ul>"):
        self.status_code = status_code
        self.text = text


class StubSession:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls: list[str] = []

    def get(self, url, timeout):
        self.calls.append(url)
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def make_adapter(outcomes, **config_overrides):
    config = LiveAdapterConfig(backoff_base_s=0.0, **config_overrides)
    session = StubSession(outcomes)
    adapter = LivePortalAdapter(config=config, session=session, min_delay_ms=0)
    return adapter, session


def test_adapter_maps_success_to_found():
    adapter, _ = make_adapter([StubResponse(text="<ul>facets</ul>")])
    response = adapter.request("http://portal/q")
    assert response.found is True
    assert response.facet_html == "<ul>facets</ul>"


def test_adapter_maps_zero_results_marker_to_not_found():
    adapter, _ = make_adapter(
        [StubResponse(text="Sorry, your query did not match any documents.")]
    )
    response = adapter.request("http://portal/q")
    assert response.found is False
    assert response.source_titles == ()


def test_adapter_retries_429_then_succeeds():
    adapter, session = make_adapter(
        [StubResponse(429), StubResponse(429), StubResponse(text="ok")]
    )
    assert adapter.request("http://portal/q").found is True
    assert len(session.calls) == 3


def test_adapter_gives_up_after_retry_budget():
    adapter, session = make_adapter([StubResponse(429)] * 10, max_retries=3)
    with pytest.raises(RateLimitError):
        adapter.request("http://portal/q")
    # Initial attempt plus three retries.
    assert len(session.calls) == 4


def test_adapter_raises_on_other_http_statuses():
    adapter, _ = make_adapter([StubResponse(503)])
    with pytest.raises(PortalStatusError, match="503"):
        adapter.request("http://portal/q")


def test_adapter_wraps_network_failures():
    adapter, _ = make_adapter([requests.ConnectionError("boom")])
    with pytest.raises(TransportError):
        adapter.request("http://portal/q")


def test_adapter_detects_auth_wall():
    adapter, _ = make_adapter(
        [StubResponse(text="You do not have access to this page")]
    )
    with pytest.raises(AuthWallError):
        adapter.request("http://portal/q")


def test_live_client_builds_urls_through_injected_builders():
    adapter, session = make_adapter([StubResponse(text="a"), StubResponse(text="b")])
    client = LiveQueryClient(
        adapter,
        base_url="http://portal",
        build_exact_url=lambda name, floor: f"exact/{'+'.join(name.words)}/{floor}",
        build_relaxed_url=lambda name, floor: f"relaxed/{'+'.join(name.words)}/{floor}",
        build_cluster_url=lambda title, floor: f"cluster/{title}/{floor}",
    )
    client.exact_title_query(normalize_title("Social Forces"), 2005)
    client.cluster_exact_query("Social Forces", 2005)
    assert session.calls == [
        "http://portal/exact/social+forces/2005",
        "http://portal/cluster/Social Forces/2005",
    ]
    assert isinstance(client, QueryClient)
