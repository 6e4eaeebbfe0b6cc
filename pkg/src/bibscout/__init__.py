"""Rank-driven journal discovery and keyword co-occurrence analysis."""

from .cooccur import CoOccurrenceGraph, build_graph, cluster_graph, link_count
from .datasource import QueryClient, SearchResponse, SimulatedPortal
from .ingest import DocumentRecord, JournalRecord, load_corpus, parse_rank_csv
from .metrics import (
    JournalMetrics,
    count_keyword_docs,
    one_percent_cutoff,
    ss_relative_index,
    top_k_by_jif,
)
from .names import NormalizedName, normalize_title, render_title_case, word_overlap_match
from .reports import ReportBundle, area_overlap, build_reports, select_final_set
from .search import RunConfig, SearchOutcome, Tag, classify_journal, run_filter

__version__ = "0.1.0"

__all__ = [
    "CoOccurrenceGraph",
    "DocumentRecord",
    "JournalMetrics",
    "JournalRecord",
    "NormalizedName",
    "QueryClient",
    "ReportBundle",
    "RunConfig",
    "SearchOutcome",
    "SearchResponse",
    "SimulatedPortal",
    "Tag",
    "area_overlap",
    "build_graph",
    "build_reports",
    "classify_journal",
    "cluster_graph",
    "count_keyword_docs",
    "link_count",
    "load_corpus",
    "normalize_title",
    "one_percent_cutoff",
    "parse_rank_csv",
    "render_title_case",
    "run_filter",
    "select_final_set",
    "ss_relative_index",
    "top_k_by_jif",
    "word_overlap_match",
]
