"""End-to-end gates pinning the toolkit to its frozen reference numbers.

Each test covers one externally agreed behavior: the cascade tally on the
bundled ranking, the overlap-matching arithmetic, the query URL grammar,
facet parsing, the ranked metrics table, graph construction against a
brute-force enumerator, the word-cloud anchors, the report aggregates,
the invariant sweeps, and byte-level determinism of full runs.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter

import pytest

from bibscout.cli import main
from bibscout.cooccur import build_graph, link_count
from bibscout.datasource import SimulatedPortal
from bibscout.ingest import DocumentRecord, JournalRecord
from bibscout.metrics import (
    JournalMetrics,
    compute_journal_metrics,
    one_percent_cutoff,
    ss_relative_index,
    top_k_by_jif,
)
from bibscout.names import normalize_title, word_overlap_match
from bibscout.reports import area_overlap, build_reports, select_final_set
from bibscout.search import (
    RunConfig,
    Tag,
    build_exact_search_url,
    build_relaxed_search_url,
    parse_subject_facet,
    run_filter,
)
from oracles import degree_by_rescan, keyword_stats_by_rescan

# Frozen reference table: rank, title, JIF, total docs, target-area docs,
# keyword occurrences (None renders as Null), printed percentage.
EXPECTED_TABLE = [
    (78, "Nature Climate Change", 19.181, 2192, 2192, 676, 50.0),
    (116, "Behavioral And Brain Sciences", 15.071, 2688, 952, 0, 9.5),
    (167, "MMWR-Morbidity And Mortality Weekly Report", 12.888, 434, 318, 0, 22.9),
    (232, "Dialogues In Human Geography", 10.214, 360, 360, 4, 100.0),
    (339, "Review Of Educational Research", 8.241, 300, 300, 0, 100.0),
    (411, "Land Degradation & Development", 7.270, 1331, 1317, 108, 33.1),
    (454, "Progress In Human Geography", 6.885, 730, 730, 20, 100.0),
    (460, "Journal Of Service Research", 6.842, 358, 356, 0, 33.3),
    (467, "Annual Review Of Sociology", 6.773, 305, 305, 0, 100.0),
    (525, "Economic Geography", 6.438, 242, 242, 3, 50.0),
    (535, "Global Environmental Change-Human And Policy Dimensions", 6.371,
     1425, 1307, 632, 47.8),
    (570, "Social Issues And Policy Review", 6.143, 95, 95, None, 50.0),
    (609, "ISPRS Journal Of Photogrammetry And Remote Sensing", 5.994,
     1588, 275, 41, 4.2),
    (622, "Tourism Management", 5.921, 1998, 1998, 29, 50.0),
    (628, "Administrative Science Quarterly", 5.878, 285, 283, 0, 49.9),
]


@pytest.fixture(scope="module")
def cascade(ranking, portal):
    return run_filter(ranking, portal, RunConfig())


def test_c01_cascade_tally_on_bundled_ranking(ranking, corpus):
    started = time.perf_counter()
    result = run_filter(ranking, SimulatedPortal(corpus), RunConfig())
    elapsed = time.perf_counter() - started

    tally = Counter(outcome.tag for outcome in result.outcomes)
    assert result.searched_count == 804
    assert len(result.outcomes) == 50
    assert tally == {Tag.FOUND: 31, Tag.NOT_FOUND: 17, Tag.UNSURE: 2}
    assert result.dismissed_count == 754
    assert result.errors == []
    assert elapsed < 10.0
    print(f"cascade: 804 searched, 50 tagged (31 found / 17 not found / "
          f"2 unsure) in {elapsed:.2f}s")


def test_c02_overlap_matching_anchors():
    assert word_overlap_match(
        normalize_title("nature materials"), normalize_title("nature")
    ) is False

    rng = random.Random(41)
    vocab = [f"w{i}" for i in range(12)]
    for _ in range(10_000):
        a = normalize_title(" ".join(rng.choices(vocab, k=rng.randint(1, 6))))
        b = normalize_title(" ".join(rng.choices(vocab, k=rng.randint(1, 6))))
        assert word_overlap_match(a, a)
        assert word_overlap_match(a, b) == word_overlap_match(b, a)
    print("overlap matching: anchor pair plus 10000 reflexive/symmetric pairs")


def test_c03_query_urls_are_byte_exact():
    name = normalize_title("Energy & Environmental Science")
    assert build_exact_search_url(name, 2005) == (
        "results/results.uri?src=s&sot=a"
        "&s=EXACTSRCTITLE(energy+and+environmental+science)+AND+PUBYEAR+>+2005"
        '&cluster=scoexactsrctitle,"Energy+And+Environmental+Science",t'
    )
    assert build_relaxed_search_url(name, 2005) == (
        "results/results.uri?src=s&sot=a"
        "&s=SRCTITLE(energy+and+environmental+science)+AND+PUBYEAR+>+2005"
    )
    print("query URLs: exact and relaxed grammar byte-identical")


def test_c04_facet_parse_and_relative_index(portal):
    response = portal.exact_title_query(normalize_title("Nature Climate Change"), 2005)
    histogram = parse_subject_facet(response.facet_html)
    assert histogram == {"Social Sciences": 2192, "Environmental Science": 2192}
    assert ss_relative_index(histogram) == 0.5

    other = portal.exact_title_query(normalize_title("Progress In Human Geography"), 2005)
    assert ss_relative_index(parse_subject_facet(other.facet_html)) == 1.0
    print("facet parsing: 2192/2192 histogram, indexes 0.500 and 1.000")


def test_c05_metrics_table_matches_reference(cascade, corpus):
    started = time.perf_counter()
    candidates = [
        compute_journal_metrics(corpus, outcome.journal,
                                lookup_title=outcome.matched_source_title)
        for outcome in cascade.outcomes
    ]
    top = top_k_by_jif(one_percent_cutoff(candidates), k=15)
    elapsed = time.perf_counter() - started

    assert len(top) == 15
    for row, (rank, title, jif, total, ss, occurrences, pct) in zip(top, EXPECTED_TABLE):
        assert (row.journal.rank, row.journal.title) == (rank, title)
        assert row.journal.jif == pytest.approx(jif)
        assert (row.total_docs, row.ss_docs) == (total, ss)
        assert row.keyword_occurrences == occurrences
        assert abs(row.ss_relative_index * 100 - pct) <= 0.05
    assert elapsed < 5.0
    print(f"metrics table: all 15 rows match in {elapsed:.2f}s")


def test_c06_graph_agrees_with_pairwise_enumeration():
    rng = random.Random(20260816)
    pool = [f"kw{i}" for i in range(30)]
    for _ in range(200):
        docs = []
        for _ in range(rng.randint(0, 50)):
            if rng.random() < 0.1:
                keywords = None
            else:
                keywords = tuple(rng.choices(pool, k=rng.randint(0, 6)))
            docs.append(DocumentRecord(
                source_title="Journal Of Randomized Checks",
                year=rng.randint(2000, 2022),
                keywords=keywords,
                subject_areas=("Social Sciences",),
                authors=(),
                countries=(),
            ))
        bar = rng.randint(1, 4)
        window = None if rng.random() < 0.5 else (2006, 2018)

        graph = build_graph(docs, min_occurrence=bar, window=window)
        expected_nodes, expected_edges = keyword_stats_by_rescan(docs, bar, window)

        assert set(graph.nodes) == set(expected_nodes)
        for keyword, node in graph.nodes.items():
            occurrences, mean_year = expected_nodes[keyword]
            assert node.occurrences == occurrences
            assert node.mean_year == pytest.approx(mean_year)
            assert link_count(graph, keyword) == degree_by_rescan(expected_edges, keyword)
        assert graph.edges == expected_edges
    print("graph builder: 200 randomized corpora equal brute-force recount")


def test_c07_wordcloud_anchors(corpus, tm_cloud_docs):
    ncc_docs = [d for d in corpus if d.source_title == "Nature Climate Change"]
    graph = build_graph(ncc_docs, min_occurrence=5, window=(2006, 2018))
    assert graph.nodes["Climate Change"].occurrences == 676
    assert link_count(graph, "Climate Change") == 491

    tm_graph = build_graph(tm_cloud_docs, min_occurrence=5, window=(2006, 2018))
    assert tm_graph.nodes["Climate Change"].occurrences == 31
    assert link_count(tm_graph, "Climate Change") == 71
    print("word clouds: 676/491 and 31/71 keyword anchors hold")


def test_c08_reports_match_reference(corpus):
    journals = [title for _, title, *_ in EXPECTED_TABLE]
    started = time.perf_counter()
    final = select_final_set(
        corpus,
        journals,
        keyword="Climate Change",
        subject_area="Social Sciences",
        window=(2007, 2018),
    )
    bundle = build_reports(final)
    both, only_ss, only_env = area_overlap(final, "Social Sciences", "Environmental Science")
    elapsed = time.perf_counter() - started

    assert len(final) == 1452
    peak_year = max(bundle.per_year, key=bundle.per_year.__getitem__)
    assert (peak_year, bundle.per_year[peak_year]) == (2016, 192)
    assert bundle.per_country[:6] == [
        ("United States", 617),
        ("United Kingdom", 432),
        ("Australia", 221),
        ("Germany", 160),
        ("Netherlands", 135),
        ("Canada", 117),
    ]
    assert bundle.per_country[20] == ("Brazil", 22)
    assert bundle.top_keywords[0] == ("Climate Change", 1452)
    assert [count for _, count in bundle.top_keywords[1:10]] == [
        219, 194, 181, 171, 170, 149, 141, 123, 112,
    ]
    assert both > only_ss
    assert only_env == 0
    assert elapsed < 5.0
    print(f"reports: 1452 documents, peak (2016, 192), country and keyword "
          f"heads match in {elapsed:.2f}s")


def test_c09_invariant_sweeps():
    rng = random.Random(99)
    areas = ("Social Sciences", "Medicine", "Engineering")
    vocab = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")

    for _ in range(1000):
        journals = []
        docs = []
        for rank in range(1, rng.randint(2, 6) + 1):
            title = " ".join(rng.sample(vocab, rng.randint(1, 3)))
            spelled = title.upper() if rng.random() < 0.3 else title.title()
            journals.append(JournalRecord(rank=rank, title=spelled,
                                          jif=round(9.0 - 0.5 * rank, 3)))
            for _ in range(rng.randint(0, 2)):
                docs.append(DocumentRecord(
                    source_title=title.title(),
                    year=rng.randint(2000, 2020),
                    keywords=("Climate Change",) if rng.random() < 0.5 else None,
                    subject_areas=(rng.choice(areas),),
                    authors=("A. Author",),
                    countries=("Norway",),
                ))
        config = RunConfig(stop_count=rng.randint(1, 5))
        result = run_filter(journals, SimulatedPortal(docs), config)
        assert len(result.outcomes) <= config.stop_count
        for outcome in result.outcomes:
            assert 1 <= outcome.queries_issued <= 3
            assert outcome.tag is not Tag.DISMISSED

    pool = [f"kw{i}" for i in range(15)]
    for _ in range(20):
        docs = [
            DocumentRecord(
                source_title="Journal Of Randomized Checks",
                year=rng.randint(2006, 2018),
                keywords=tuple(rng.choices(pool, k=rng.randint(0, 5))),
                subject_areas=("Social Sciences",),
                authors=(),
                countries=(),
            )
            for _ in range(rng.randint(0, 40))
        ]
        previous_nodes = None
        previous_edges = None
        for bar in range(1, 11):
            graph = build_graph(docs, min_occurrence=bar, window=None)
            nodes, edges = set(graph.nodes), set(graph.edges)
            if previous_nodes is not None:
                assert nodes <= previous_nodes
                assert edges <= previous_edges
            previous_nodes, previous_edges = nodes, edges

    def candidate(rank, ss_docs):
        return JournalMetrics(
            journal=JournalRecord(rank=rank, title=f"Journal {rank}", jif=5.0),
            total_docs=400,
            ss_docs=ss_docs,
            area_histogram={},
            ss_relative_index=ss_docs / 400,
            keyword_occurrences=None,
        )

    below = candidate(1, 3)   # 0.75 percent of 400
    at_bar = candidate(2, 4)  # exactly 1.00 percent
    assert one_percent_cutoff([below, at_bar]) == [at_bar]
    print("invariants: 1000 cascade runs stay within 3 queries, thresholds "
          "are monotone, the 1 percent bar is inclusive")


def test_c10_same_seed_runs_are_byte_identical(fixtures_dir, tmp_path):
    output_dirs = []
    for label in ("first", "second"):
        out_dir = tmp_path / label
        code = main([
            "all",
            "--rank-csv-path", str(fixtures_dir / "ranking.csv"),
            "--corpus-path", str(fixtures_dir / "corpus.jsonl"),
            "--output-dir", str(out_dir),
            "--seed", "7",
        ])
        assert code == 0
        output_dirs.append(out_dir)

    first, second = output_dirs
    names = sorted(p.relative_to(first).as_posix()
                   for p in first.rglob("*") if p.is_file())
    assert names == sorted(p.relative_to(second).as_posix()
                           for p in second.rglob("*") if p.is_file())
    assert names, "runs produced no files"
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name

    manifest = json.loads((first / "manifest.json").read_text(encoding="utf-8"))
    twin = json.loads((second / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["outputs"] == twin["outputs"]
    print(f"determinism: {len(names)} files byte-identical across same-seed runs")
