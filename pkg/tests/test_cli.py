from __future__ import annotations

import csv
import json

import pytest

from bibscout.cli import (
    EXIT_DATA,
    EXIT_OK,
    EXIT_USAGE,
    LOCK_FILE,
    MANIFEST_FILE,
    METRICS_FILE,
    OUTCOMES_FILE,
    OUTPUT_DIR_ENV,
    SUMMARY_FILE,
    PipelineConfig,
    load_config_file,
    main,
)
from bibscout.cooccur import load_wordcloud
from bibscout.ingest import DocumentRecord, dump_corpus
from bibscout.metrics import read_metrics_csv


def doc(title, year, keywords, areas, author):
    return DocumentRecord(
        source_title=title,
        year=year,
        keywords=keywords,
        subject_areas=tuple(areas),
        authors=(author,),
        countries=("Norway",),
    )


@pytest.fixture
def mini_world(tmp_path):
    """A four-journal ranking over a tiny corpus, plus an output dir."""
    docs = []
    for i in range(15):
        docs.append(
            doc("Keep One", 2007 + i % 12, ("Climate Change", f"P{i % 3}"),
                ("Social Sciences",), f"A{i}")
        )
    for i in range(12):
        keywords = ("Climate Change",) if i < 2 else ("Urban",)
        docs.append(
            doc("Keep Two", 2007 + i % 12, keywords, ("Social Sciences",), f"B{i}")
        )
    for i in range(3):
        docs.append(doc("Medico Journal", 2010 + i, (), ("Medicine",), f"C{i}"))

    corpus_path = tmp_path / "corpus.jsonl"
    dump_corpus(docs, corpus_path)

    ranking_path = tmp_path / "ranking.csv"
    with ranking_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["Rank", "Full Journal Title", "Journal Impact Factor"])
        writer.writerow([1, "Keep One", "9.000"])
        writer.writerow([2, "Medico Journal", "8.000"])
        writer.writerow([3, "Keep Two", "7.000"])
        writer.writerow([4, "Ghostly", "6.000"])

    out_dir = tmp_path / "out"
    return ranking_path, corpus_path, out_dir


def base_args(mini_world, command):
    ranking_path, corpus_path, out_dir = mini_world
    return [
        command,
        "--rank-csv-path", str(ranking_path),
        "--corpus-path", str(corpus_path),
        "--output-dir", str(out_dir),
        "--stop-count", "3",
    ]


def run_filter(mini_world):
    code = main(base_args(mini_world, "filter"))
    assert code == EXIT_OK


def test_filter_writes_outcomes_summary_and_manifest(mini_world, capsys):
    run_filter(mini_world)
    _, _, out_dir = mini_world

    printed = capsys.readouterr().out
    assert "searched=4, output=3 (found=2, not_found=1)" in printed

    with (out_dir / OUTCOMES_FILE).open(encoding="utf-8", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert [(r["journal_name"], r["tag"]) for r in rows] == [
        ("Keep One", "Found"), ("Keep Two", "Found"), ("Ghostly", "NotFound"),
    ]

    summary = json.loads((out_dir / SUMMARY_FILE).read_text(encoding="utf-8"))
    assert summary["searched"] == 4
    assert summary["dismissed"] == 1
    assert summary["tags"]["Found"] == 2
    assert summary["errors"] == []

    manifest = json.loads((out_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["command"] == "filter"
    assert "output_dir" not in manifest["config"]
    assert manifest["config"]["stop_count"] == 3
    assert len(manifest["inputs"]) == 2
    assert set(manifest["outputs"]) == {OUTCOMES_FILE, SUMMARY_FILE}
    assert not (out_dir / LOCK_FILE).exists()


def test_metrics_builds_the_table(mini_world):
    run_filter(mini_world)
    assert main(base_args(mini_world, "metrics")) == EXIT_OK

    _, _, out_dir = mini_world
    table = read_metrics_csv(out_dir / METRICS_FILE)
    assert [(row["title"], row["total_docs"], row["keyword_occurrences"]) for row in table] == [
        ("Keep One", 15, 15),
        ("Keep Two", 12, 2),
    ]
    assert table[0]["ss_relative_index"] == pytest.approx(1.0)


def test_metrics_without_filter_output_is_a_data_error(mini_world, capsys):
    assert main(base_args(mini_world, "metrics")) == EXIT_DATA
    assert "run the filter stage first" in capsys.readouterr().err


def test_cooccur_exports_qualifying_journal(mini_world):
    run_filter(mini_world)
    main(base_args(mini_world, "metrics"))
    assert main(base_args(mini_world, "cooccur") + ["--journal", "Keep One"]) == EXIT_OK

    _, _, out_dir = mini_world
    graph = load_wordcloud(out_dir / "cooccur_keep_one.txt")
    assert graph.nodes["Climate Change"].occurrences == 15
    assert set(graph.nodes) == {"Climate Change", "P0", "P1", "P2"}
    assert graph.edges[("Climate Change", "P0")] == 5
    assert all(node.cluster_id is not None for node in graph.nodes.values())


def test_cooccur_refuses_journals_below_the_keyword_bar(mini_world, capsys):
    run_filter(mini_world)
    main(base_args(mini_world, "metrics"))
    code = main(base_args(mini_world, "cooccur") + ["--journal", "Keep Two"])
    assert code == EXIT_DATA
    err = capsys.readouterr().err
    assert "2 Social Sciences document(s)" in err
    assert "more than 10 are required" in err


def test_cooccur_rejects_journals_outside_the_table(mini_world, capsys):
    run_filter(mini_world)
    main(base_args(mini_world, "metrics"))
    code = main(base_args(mini_world, "cooccur") + ["--journal", "Ghostly"])
    assert code == EXIT_DATA
    assert "not in the metrics table" in capsys.readouterr().err


def test_report_aggregates_final_set(mini_world, capsys):
    run_filter(mini_world)
    main(base_args(mini_world, "metrics"))
    assert main(base_args(mini_world, "report")) == EXIT_OK
    assert "reports cover 17 document(s)" in capsys.readouterr().out

    _, _, out_dir = mini_world
    per_year = (out_dir / "report_per_year.csv").read_text(encoding="utf-8")
    totals = [int(line.split(",")[1]) for line in per_year.splitlines()[1:]]
    assert sum(totals) == 17


def test_all_runs_every_stage_and_skips_non_qualifying_graphs(mini_world, capsys):
    assert main(base_args(mini_world, "all")) == EXIT_OK
    _, _, out_dir = mini_world
    assert (out_dir / OUTCOMES_FILE).exists()
    assert (out_dir / METRICS_FILE).exists()
    assert (out_dir / "cooccur_keep_one.txt").exists()
    # Keep Two has only 2 qualifying documents, below the bar of 10.
    assert not (out_dir / "cooccur_keep_two.txt").exists()
    assert (out_dir / "report_bundle.jsonl").exists()
    assert "exported 1 co-occurrence graph(s)" in capsys.readouterr().out

    manifest = json.loads((out_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["command"] == "all"
    assert "cooccur_keep_one.txt" in manifest["outputs"]
    assert MANIFEST_FILE not in manifest["outputs"]


def test_locked_output_dir_is_a_data_error(mini_world, capsys):
    _, _, out_dir = mini_world
    out_dir.mkdir()
    (out_dir / LOCK_FILE).write_text("12345", encoding="ascii")
    assert main(base_args(mini_world, "filter")) == EXIT_DATA
    assert "locked by another run" in capsys.readouterr().err
    # A failed run must not remove someone else's lock.
    assert (out_dir / LOCK_FILE).exists()


def test_missing_inputs_are_usage_errors(mini_world, capsys, tmp_path):
    _, corpus_path, out_dir = mini_world
    code = main(["filter", "--corpus-path", str(corpus_path),
                 "--output-dir", str(out_dir)])
    assert code == EXIT_USAGE
    assert "--rank-csv-path" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(mini_world, capsys):
    assert main(base_args(mini_world, "filter") + ["--bogus"]) == EXIT_USAGE


def test_invalid_window_is_a_usage_error(mini_world):
    args = base_args(mini_world, "filter") + ["--analysis-window", "2018"]
    assert main(args) == EXIT_USAGE


def test_inverted_window_is_a_usage_error(mini_world, capsys):
    args = base_args(mini_world, "filter") + ["--analysis-window", "2018-2006"]
    assert main(args) == EXIT_USAGE
    assert "start 2018 is after end 2006" in capsys.readouterr().err


def test_cutoff_out_of_range_is_a_usage_error(mini_world):
    assert main(base_args(mini_world, "filter") + ["--cutoff", "0"]) == EXIT_USAGE


def test_env_var_sets_output_dir_and_flag_overrides_it(mini_world, tmp_path, monkeypatch):
    ranking_path, corpus_path, _ = mini_world
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(env_dir))
    code = main([
        "filter",
        "--rank-csv-path", str(ranking_path),
        "--corpus-path", str(corpus_path),
        "--stop-count", "3",
    ])
    assert code == EXIT_OK
    assert (env_dir / OUTCOMES_FILE).exists()

    flag_dir = tmp_path / "flag_out"
    code = main([
        "filter",
        "--rank-csv-path", str(ranking_path),
        "--corpus-path", str(corpus_path),
        "--output-dir", str(flag_dir),
        "--stop-count", "3",
    ])
    assert code == EXIT_OK
    assert (flag_dir / OUTCOMES_FILE).exists()


def test_config_file_feeds_defaults_and_cli_wins(mini_world, tmp_path, capsys):
    ranking_path, corpus_path, out_dir = mini_world
    config_path = tmp_path / "run.cfg"
    config_path.write_text(
        "\n".join([
            "# pipeline settings",
            f"rank-csv-path = {ranking_path}",
            f"corpus-path = {corpus_path}",
            "stop-count = 2",
            f"output_dir = {out_dir}",
        ]) + "\n",
        encoding="utf-8",
    )
    code = main(["filter", "--config", str(config_path), "--stop-count", "3"])
    assert code == EXIT_OK
    # The command line stop-count of 3 beats the file's 2.
    summary = json.loads((out_dir / SUMMARY_FILE).read_text(encoding="utf-8"))
    assert summary["output"] == 3


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    config_path = tmp_path / "run.cfg"
    config_path.write_text("stop-count = 5\nmystery = 1\n", encoding="utf-8")
    with pytest.raises(Exception) as excinfo:
        load_config_file(config_path)
    assert "unknown key 'mystery'" in str(excinfo.value)
    assert main(["filter", "--config", str(config_path)]) == EXIT_USAGE


def test_pipeline_config_validate_rejects_bad_mode():
    config = PipelineConfig(mode="telepathy")
    with pytest.raises(Exception, match="mode must be"):
        config.validate()
