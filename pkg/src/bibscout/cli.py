"""Command-line pipeline: filter, metrics, cooccur, report, all.

Configuration merges four layers, strongest last: built-in defaults, a
flat key=value config file, the BIBSCOUT_OUTPUT_DIR environment variable
(output directory only), and command-line flags.  Every command locks its
output directory for the duration of the run and finishes by writing a
manifest with the effective configuration and SHA-256 digests of its
inputs and outputs, so a run can be replayed and compared byte for byte.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 transport error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from . import cooccur, datasource, metrics, reports, search
from .ingest import (
    CorpusSchemaError,
    DocumentRecord,
    JournalRecord,
    RankCsvError,
    load_corpus,
    parse_rank_csv,
)
from .names import UnnormalizableTitleError, normalize_title

__all__ = [
    "PipelineConfig",
    "cmd_all",
    "cmd_cooccur",
    "cmd_filter",
    "cmd_metrics",
    "cmd_report",
    "load_config_file",
    "main",
]

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "BIBSCOUT_OUTPUT_DIR"
PORTAL_URL_ENV = "BIBSCOUT_PORTAL_URL"
LOCK_FILE = ".bibscout.lock"
OUTCOMES_FILE = "search_outcomes.csv"
SUMMARY_FILE = "filter_summary.json"
METRICS_FILE = "metrics_table.csv"
MANIFEST_FILE = "manifest.json"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRANSPORT = 3


class CliUsageError(Exception):
    """Bad invocation or configuration; exits with code 1."""


class CliDataError(Exception):
    """Unusable input data or output location; exits with code 2."""


@dataclass
class PipelineConfig:
    """Everything a run needs; field names double as config-file keys."""

    rank_csv_path: str | None = None
    corpus_path: str | None = None
    mode: str = "simulated"
    stop_count: int = 50
    year_floor: int = 2005
    analysis_window: tuple[int, int] = (2006, 2018)
    final_window: tuple[int, int] = (2007, 2018)
    min_occurrence: int = 5
    cutoff: float = 0.01
    top_k: int = 15
    target_area: str = "Social Sciences"
    keyword: str = "Climate Change"
    output_dir: str = "out"
    seed: int = 0
    min_keyword_docs: int = 10

    def validate(self) -> None:
        if self.mode not in ("simulated", "live"):
            raise CliUsageError(f"mode must be 'simulated' or 'live', got {self.mode!r}")
        if self.stop_count < 1:
            raise CliUsageError("stop-count must be >= 1")
        if not 0 < self.cutoff <= 1:
            raise CliUsageError("cutoff must be in (0, 1]")
        if self.min_occurrence < 1:
            raise CliUsageError("min-occurrence must be >= 1")
        if self.top_k < 1:
            raise CliUsageError("top-k must be >= 1")
        for label, window in (
            ("analysis-window", self.analysis_window),
            ("final-window", self.final_window),
        ):
            if window[0] > window[1]:
                raise CliUsageError(f"{label} start {window[0]} is after end {window[1]}")


_WINDOW_FIELDS = {"analysis_window", "final_window"}
_INT_FIELDS = {"stop_count", "year_floor", "min_occurrence", "top_k", "seed", "min_keyword_docs"}
_FLOAT_FIELDS = {"cutoff"}


def _parse_window(raw: str) -> tuple[int, int]:
    parts = raw.replace(":", "-").split("-")
    if len(parts) != 2:
        raise CliUsageError(f"window must look like START-END, got {raw!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise CliUsageError(f"window must be two integers, got {raw!r}") from exc


def load_config_file(path: str | Path) -> dict:
    """Parse a flat ``key = value`` config file into typed overrides."""
    path = Path(path)
    if not path.is_file():
        raise CliUsageError(f"config file not found: {path}")
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    overrides: dict = {}
    for line_num, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise CliUsageError(f"{path}:{line_num}: expected key = value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in known:
            raise CliUsageError(f"{path}:{line_num}: unknown key {key!r}")
        try:
            if key in _WINDOW_FIELDS:
                overrides[key] = _parse_window(value)
            elif key in _INT_FIELDS:
                overrides[key] = int(value)
            elif key in _FLOAT_FIELDS:
                overrides[key] = float(value)
            else:
                overrides[key] = value
        except ValueError as exc:
            raise CliUsageError(f"{path}:{line_num}: bad value for {key}: {value!r}") from exc
    return overrides


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    config = PipelineConfig()
    if args.config:
        for key, value in load_config_file(args.config).items():
            setattr(config, key, value)
    env_output = os.environ.get(OUTPUT_DIR_ENV)
    if env_output:
        config.output_dir = env_output
    for field in dataclasses.fields(PipelineConfig):
        value = getattr(args, field.name, None)
        if value is not None:
            setattr(config, field.name, value)
    config.validate()
    return config


@contextmanager
def _locked_output_dir(config: PipelineConfig) -> Iterator[Path]:
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    lock_path = output_dir / LOCK_FILE
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise CliDataError(
            f"output directory {output_dir} is locked by another run"
            f" (remove {lock_path} if that run is dead)"
        )
    try:
        os.write(fd, str(os.getpid()).encode("ascii"))
        os.close(fd)
        yield output_dir
    finally:
        lock_path.unlink(missing_ok=True)


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(
    command: str,
    config: PipelineConfig,
    output_dir: Path,
    inputs: Sequence[str],
) -> None:
    # output_dir is deliberately left out of the echo: two runs that differ
    # only in where they write must stay byte-identical.
    echo = dataclasses.asdict(config)
    echo.pop("output_dir")
    echo["analysis_window"] = list(config.analysis_window)
    echo["final_window"] = list(config.final_window)
    manifest = {
        "command": command,
        "config": echo,
        "inputs": {p: _sha256(Path(p)) for p in sorted(set(inputs)) if Path(p).is_file()},
        "outputs": {},
    }
    for path in sorted(output_dir.rglob("*")):
        if path.is_file() and path.name not in (MANIFEST_FILE, LOCK_FILE):
            manifest["outputs"][path.relative_to(output_dir).as_posix()] = _sha256(path)
    (output_dir / MANIFEST_FILE).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _require(value: str | None, flag: str) -> str:
    if not value:
        raise CliUsageError(f"missing required option {flag}")
    return value


def _load_inputs(config: PipelineConfig) -> tuple[list[JournalRecord], list[DocumentRecord]]:
    rank_path = _require(config.rank_csv_path, "--rank-csv-path")
    corpus_path = _require(config.corpus_path, "--corpus-path")
    try:
        ranking = parse_rank_csv(rank_path)
    except FileNotFoundError:
        raise CliDataError(f"ranking file not found: {rank_path}")
    except RankCsvError as exc:
        raise CliDataError(str(exc))
    try:
        corpus = load_corpus(corpus_path)
    except FileNotFoundError:
        raise CliDataError(f"corpus file not found: {corpus_path}")
    except CorpusSchemaError as exc:
        raise CliDataError(str(exc))
    return ranking, corpus


def _make_client(config: PipelineConfig, corpus: Sequence[DocumentRecord]):
    if config.mode == "simulated":
        return datasource.SimulatedPortal(corpus)
    base_url = os.environ.get(PORTAL_URL_ENV)
    if not base_url:
        raise CliUsageError(
            f"live mode needs the portal base URL in {PORTAL_URL_ENV}"
        )
    adapter = datasource.LivePortalAdapter()
    return datasource.LiveQueryClient(
        adapter,
        base_url,
        search.build_exact_search_url,
        search.build_relaxed_search_url,
        search.build_cluster_search_url,
    )


def _run_filter_stage(config: PipelineConfig, output_dir: Path) -> search.RunResult:
    ranking, corpus = _load_inputs(config)
    client = _make_client(config, corpus)
    run_config = search.RunConfig(
        stop_count=config.stop_count,
        year_floor=config.year_floor,
        target_subject_area=config.target_area,
    )
    try:
        result = search.run_filter(ranking, client, run_config)
    except search.RunAborted as exc:
        search.write_outcomes_csv(exc.partial, output_dir / OUTCOMES_FILE)
        logger.error("partial outcomes preserved in %s", output_dir / OUTCOMES_FILE)
        raise
    search.write_outcomes_csv(result, output_dir / OUTCOMES_FILE)
    _write_summary(result, output_dir)
    print(_summary_line(result))
    return result


def _summary_line(result: search.RunResult) -> str:
    tally = {tag: 0 for tag in search.Tag}
    for outcome in result.outcomes:
        tally[outcome.tag] += 1
    labels = (
        (search.Tag.FOUND, "found"),
        (search.Tag.NOT_FOUND, "not_found"),
        (search.Tag.PROBABLY_OK, "probably_ok"),
        (search.Tag.PROBABLY_FALSE, "probably_false"),
        (search.Tag.UNSURE, "unsure"),
    )
    parts = [f"{label}={tally[tag]}" for tag, label in labels if tally[tag]]
    return (
        f"searched={result.searched_count},"
        f" output={len(result.outcomes)} ({', '.join(parts)})"
    )


def _write_summary(result: search.RunResult, output_dir: Path) -> None:
    summary = {
        "searched": result.searched_count,
        "output": len(result.outcomes),
        "dismissed": result.dismissed_count,
        "errors": [
            {"journal": e.journal.title, "message": e.message} for e in result.errors
        ],
        "tags": {
            tag.value: sum(1 for o in result.outcomes if o.tag is tag)
            for tag in search.Tag
        },
    }
    (output_dir / SUMMARY_FILE).write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _candidate_rows(output_dir: Path) -> list[search.SearchOutcome]:
    outcomes_path = output_dir / OUTCOMES_FILE
    if not outcomes_path.is_file():
        raise CliDataError(
            f"no search outcomes at {outcomes_path}; run the filter stage first"
        )
    return search.read_outcomes_csv(outcomes_path)


def _run_metrics_stage(config: PipelineConfig, output_dir: Path) -> list[metrics.JournalMetrics]:
    corpus_path = _require(config.corpus_path, "--corpus-path")
    try:
        corpus = load_corpus(corpus_path)
    except FileNotFoundError:
        raise CliDataError(f"corpus file not found: {corpus_path}")
    except CorpusSchemaError as exc:
        raise CliDataError(str(exc))
    outcomes = _candidate_rows(output_dir)

    candidates = []
    for outcome in outcomes:
        candidates.append(
            metrics.compute_journal_metrics(
                corpus,
                outcome.journal,
                lookup_title=outcome.matched_source_title,
                year_floor=config.year_floor,
                keyword=config.keyword,
                keyword_window=config.analysis_window,
                target_area=config.target_area,
            )
        )
    retained = metrics.one_percent_cutoff(candidates, cutoff=config.cutoff)
    top = metrics.top_k_by_jif(retained, k=config.top_k)
    if not top:
        logger.warning("no journals survived the cutoff; writing empty table")
    metrics.write_metrics_csv(top, output_dir / METRICS_FILE, keyword=config.keyword)
    return top


def _journal_slug(title: str) -> str:
    return "_".join(normalize_title(title).words)


def _qualifying_doc_count(
    corpus: Sequence[DocumentRecord],
    lookup_title: str,
    config: PipelineConfig,
) -> int:
    # Qualification bar: in-window documents indexed in the target area and
    # carrying the keyword.
    wanted_tokens = normalize_title(lookup_title).words
    wanted_keyword = config.keyword.casefold()
    wanted_area = config.target_area.casefold()
    start, end = config.analysis_window
    count = 0
    for doc in corpus:
        try:
            if normalize_title(doc.source_title).words != wanted_tokens:
                continue
        except UnnormalizableTitleError:
            continue
        if not start <= doc.year <= end:
            continue
        if not any(a.casefold() == wanted_area for a in doc.subject_areas):
            continue
        if doc.keywords is None or not any(
            k.casefold() == wanted_keyword for k in doc.keywords
        ):
            continue
        count += 1
    return count


def _resolve_lookup_title(
    journal_title: str, outcomes: Sequence[search.SearchOutcome]
) -> str:
    wanted = normalize_title(journal_title).words
    for outcome in outcomes:
        if normalize_title(outcome.journal.title).words == wanted:
            return outcome.matched_source_title or outcome.journal.title
    return journal_title


def _run_cooccur_stage(
    config: PipelineConfig, output_dir: Path, journal_title: str
) -> Path:
    corpus_path = _require(config.corpus_path, "--corpus-path")
    corpus = load_corpus(corpus_path)
    metrics_path = output_dir / METRICS_FILE
    if not metrics_path.is_file():
        raise CliDataError(
            f"no metrics table at {metrics_path}; run the metrics stage first"
        )
    table = metrics.read_metrics_csv(metrics_path, keyword=config.keyword)
    wanted = normalize_title(journal_title).words
    if not any(normalize_title(row["title"]).words == wanted for row in table):
        raise CliDataError(f"journal not in the metrics table: {journal_title!r}")

    outcomes = _candidate_rows(output_dir)
    lookup_title = _resolve_lookup_title(journal_title, outcomes)
    qualifying = _qualifying_doc_count(corpus, lookup_title, config)
    if qualifying <= config.min_keyword_docs:
        raise CliDataError(
            f"{journal_title!r} has {qualifying} {config.target_area}"
            f" document(s) with keyword {config.keyword!r} in"
            f" {config.analysis_window[0]}-{config.analysis_window[1]};"
            f" more than {config.min_keyword_docs} are required"
        )

    wanted_tokens = normalize_title(lookup_title).words
    docs = [
        d
        for d in corpus
        if normalize_title(d.source_title).words == wanted_tokens
    ]
    graph = cooccur.build_graph(
        docs, min_occurrence=config.min_occurrence, window=config.analysis_window
    )
    if graph.nodes:
        graph = cooccur.cluster_graph(graph, seed=config.seed)
    export_path = output_dir / f"cooccur_{_journal_slug(journal_title)}.txt"
    cooccur.export_wordcloud(graph, export_path)
    return export_path


def _run_report_stage(config: PipelineConfig, output_dir: Path) -> reports.ReportBundle:
    corpus_path = _require(config.corpus_path, "--corpus-path")
    corpus = load_corpus(corpus_path)
    metrics_path = output_dir / METRICS_FILE
    if not metrics_path.is_file():
        raise CliDataError(
            f"no metrics table at {metrics_path}; run the metrics stage first"
        )
    table = metrics.read_metrics_csv(metrics_path, keyword=config.keyword)
    outcomes = _candidate_rows(output_dir)
    titles = [_resolve_lookup_title(row["title"], outcomes) for row in table]
    final_set = reports.select_final_set(
        corpus,
        titles,
        keyword=config.keyword,
        subject_area=config.target_area,
        window=config.final_window,
    )
    if not final_set:
        logger.warning("final document set is empty; reports will be empty")
    bundle = reports.build_reports(final_set)
    reports.write_report_files(bundle, output_dir)
    return bundle


def cmd_filter(config: PipelineConfig) -> int:
    with _locked_output_dir(config) as output_dir:
        _run_filter_stage(config, output_dir)
        _write_manifest(
            "filter", config, output_dir,
            [config.rank_csv_path or "", config.corpus_path or ""],
        )
    return EXIT_OK


def cmd_metrics(config: PipelineConfig) -> int:
    with _locked_output_dir(config) as output_dir:
        top = _run_metrics_stage(config, output_dir)
        print(f"retained {len(top)} journal(s) in {output_dir / METRICS_FILE}")
        _write_manifest("metrics", config, output_dir, [config.corpus_path or ""])
    return EXIT_OK


def cmd_cooccur(config: PipelineConfig, journal_title: str) -> int:
    with _locked_output_dir(config) as output_dir:
        export_path = _run_cooccur_stage(config, output_dir, journal_title)
        print(f"wrote {export_path}")
        _write_manifest("cooccur", config, output_dir, [config.corpus_path or ""])
    return EXIT_OK


def cmd_report(config: PipelineConfig) -> int:
    with _locked_output_dir(config) as output_dir:
        bundle = _run_report_stage(config, output_dir)
        total = sum(bundle.per_year.values())
        print(f"reports cover {total} document(s)")
        _write_manifest("report", config, output_dir, [config.corpus_path or ""])
    return EXIT_OK


def cmd_all(config: PipelineConfig) -> int:
    with _locked_output_dir(config) as output_dir:
        _run_filter_stage(config, output_dir)
        top = _run_metrics_stage(config, output_dir)
        corpus = load_corpus(_require(config.corpus_path, "--corpus-path"))
        outcomes = _candidate_rows(output_dir)
        exported = 0
        for row in metrics.read_metrics_csv(
            output_dir / METRICS_FILE, keyword=config.keyword
        ):
            lookup = _resolve_lookup_title(row["title"], outcomes)
            if _qualifying_doc_count(corpus, lookup, config) > config.min_keyword_docs:
                _run_cooccur_stage(config, output_dir, row["title"])
                exported += 1
        print(f"exported {exported} co-occurrence graph(s)")
        _run_report_stage(config, output_dir)
        _write_manifest(
            "all", config, output_dir,
            [config.rank_csv_path or "", config.corpus_path or ""],
        )
    return EXIT_OK


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--rank-csv-path")
    parser.add_argument("--corpus-path")
    parser.add_argument("--mode", choices=("simulated", "live"))
    parser.add_argument("--stop-count", type=int)
    parser.add_argument("--year-floor", type=int)
    parser.add_argument("--analysis-window", type=_parse_window, metavar="START-END")
    parser.add_argument("--final-window", type=_parse_window, metavar="START-END")
    parser.add_argument("--min-occurrence", type=int)
    parser.add_argument("--cutoff", type=float)
    parser.add_argument("--top-k", type=int)
    parser.add_argument("--target-area")
    parser.add_argument("--keyword")
    parser.add_argument("--output-dir")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--min-keyword-docs", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="bibscout",
        description="Rank-driven journal discovery and keyword analysis.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("filter", "run the tagged search cascade over the ranking"),
        ("metrics", "compute the cutoff-filtered top-K journal table"),
        ("cooccur", "export one journal's keyword co-occurrence graph"),
        ("report", "aggregate the final document set into reports"),
        ("all", "run filter, metrics, cooccur, and report in sequence"),
    ):
        sub = subparsers.add_parser(name, help=help_text)
        _add_config_flags(sub)
        if name == "cooccur":
            sub.add_argument("--journal", required=True, help="journal title")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = _build_config(args)
        if args.command == "filter":
            return cmd_filter(config)
        if args.command == "metrics":
            return cmd_metrics(config)
        if args.command == "cooccur":
            return cmd_cooccur(config, args.journal)
        if args.command == "report":
            return cmd_report(config)
        return cmd_all(config)
    except CliUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CliDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except search.RunAborted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except datasource.PortalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
