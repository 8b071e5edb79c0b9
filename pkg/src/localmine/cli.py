"""Command-line interface for the mining pipeline.

Exit codes: 0 success, 1 fatal config/IO error, 2 completed with
per-site errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import PipelineConfig, dump_default_config, load_config
from .crawl import CrawlBudget, crawl_site, dump_snapshot
from .discovery import (
    CandidateSite,
    ingest_url_pairs,
    iter_directory_records,
    iter_warc_records,
    scan_archive,
    select_balanced_hosts,
)
from .fetching import http_fetch, snapshot_fetch
from .filtering import BitextFilter, ScoredPair, embedding_gate, train_filter
from .lexicon import load_pair_tsv
from .pipeline import (
    CorpusRecord,
    SiteReport,
    dedupe,
    emit_report,
    mine_site,
    run_pipeline,
    _resolve_lexicon,
    _resolve_provider,
)
from .text import LanguageTag, make_segmenter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_SITE_ERRORS = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="localmine",
        description="Mine JA-ZH parallel sentence pairs from bilingual websites.",
    )
    parser.add_argument("--config", help="pipeline INI config file")
    parser.add_argument("--seed", type=int, help="override [pipeline] seed")
    parser.add_argument("--jobs", type=int, help="override [pipeline] jobs")
    parser.add_argument(
        "--snapshot-dir", help="serve fetches from this snapshot directory instead of the network"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover-archive", help="scan an archive for balanced JA/ZH hosts")
    p.add_argument("--archive", required=True, help="WARC(.gz) file or record directory")
    p.add_argument("--out", required=True, help="candidate-site JSONL to write")

    p = sub.add_parser("validate-urls", help="validate crowdsourced URL pairs")
    p.add_argument("--submissions", required=True, help="TSV url_ja<TAB>url_zh<TAB>worker_id")
    p.add_argument("--out", required=True, help="candidate-site JSONL to write")
    p.add_argument("--rows-out", help="per-row validation status JSONL")

    p = sub.add_parser("crawl", help="crawl candidate sites into page snapshots")
    p.add_argument("--sites", required=True, help="candidate-site JSONL")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("mine", help="crawl and align sites down to candidate pairs")
    p.add_argument("--sites", required=True, help="candidate-site JSONL")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("train-filter", help="train the sentence-pair filter")
    p.add_argument("--parallel", required=True, help="training corpus TSV ja<TAB>zh")
    p.add_argument("--out", required=True, help="filter model JSON to write")

    p = sub.add_parser("filter", help="apply a trained filter to candidate pairs")
    p.add_argument("--model", required=True, help="filter model JSON")
    p.add_argument("--pairs", required=True, help="raw_pairs JSONL")
    p.add_argument("--out", required=True, help="filtered JSONL to write")

    p = sub.add_parser("dedup", help="drop duplicate pairs")
    p.add_argument("--input", required=True, help="filtered JSONL")
    p.add_argument("--out", required=True, help="deduped JSONL to write")
    p.add_argument("--tsv", help="also write a two-column TSV")
    p.add_argument("--approximate", action="store_true", help="64-bit hash set instead of exact")

    p = sub.add_parser("report", help="render a mining report")
    p.add_argument("--input", required=True, help="report JSON")
    p.add_argument("--format", choices=("tsv", "json", "markdown"), default="tsv")

    sub.add_parser("run", help="end-to-end pipeline per the config")
    sub.add_parser("default-config", help="print the default INI config")
    return parser


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        config.pipeline.seed = args.seed
    if args.jobs is not None:
        config.pipeline.jobs = args.jobs
    if args.snapshot_dir:
        config.pipeline.snapshot_dir = args.snapshot_dir
    return config


def _fetch_for(config: PipelineConfig):
    if config.pipeline.snapshot_dir:
        return snapshot_fetch(config.pipeline.snapshot_dir)
    return http_fetch


def _write_jsonl(path: str | Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def _read_jsonl(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def _cmd_discover_archive(args, config) -> int:
    archive = Path(args.archive)
    records = iter_directory_records(archive) if archive.is_dir() else iter_warc_records(archive)
    scan = scan_archive(records)
    sites = select_balanced_hosts(
        scan.hosts.values(),
        min_bytes=config.discovery.min_bytes,
        min_balance=config.discovery.min_balance,
        limit=config.discovery.limit,
    )
    _write_jsonl(args.out, (s.to_json() for s in sites))
    print(f"{len(scan.hosts)} hosts scanned, {scan.skipped_records} records skipped, "
          f"{len(sites)} candidate sites -> {args.out}")
    return EXIT_OK


def _cmd_validate_urls(args, config) -> int:
    sites, rows = ingest_url_pairs(args.submissions, _fetch_for(config), timeout=config.crawler.timeout)
    _write_jsonl(args.out, (s.to_json() for s in sites))
    if args.rows_out:
        _write_jsonl(args.rows_out, (r.to_json() for r in rows))
    n_errors = sum(1 for r in rows if r.status == "ERROR")
    print(f"{len(rows)} submissions: {len(sites)} valid, {n_errors} errors -> {args.out}")
    return EXIT_OK


def _load_sites_file(path: str) -> list[CandidateSite]:
    return [CandidateSite.from_json(obj) for obj in _read_jsonl(path)]


def _cmd_crawl(args, config) -> int:
    fetch = _fetch_for(config)
    budget = CrawlBudget(
        max_seconds=config.crawler.max_seconds,
        max_pages=config.crawler.max_pages,
        max_bytes=config.crawler.max_bytes,
        per_host_delay_ms=config.crawler.per_host_delay_ms,
    )
    failures = 0
    for site in _load_sites_file(args.sites):
        store = crawl_site(site, budget, fetch, timeout=config.crawler.timeout)
        if store.crawl_failed:
            failures += 1
            print(f"{site.host}: crawl failed ({store.failure_reason})")
            continue
        dump_snapshot(store, Path(args.out_dir) / site.host / "pages")
        print(f"{site.host}: {len(store.pages)} pages")
    return EXIT_SITE_ERRORS if failures else EXIT_OK


def _cmd_mine(args, config) -> int:
    fetch = _fetch_for(config)
    lexicon = _resolve_lexicon(config)
    failures = 0
    total = 0
    for site in _load_sites_file(args.sites):
        site_dir = Path(args.out_dir) / site.host
        outcome, aligned = mine_site(site, lexicon, config, fetch, site_dir)
        if outcome.error:
            failures += 1
            print(f"{site.host}: {outcome.error}")
            continue
        total += outcome.n_candidates
        print(f"{site.host}: {outcome.n_doc_pairs} document pairs, "
              f"{outcome.n_candidates} candidate pairs")
    print(f"{total} candidate pairs total")
    return EXIT_SITE_ERRORS if failures else EXIT_OK


def _cmd_train_filter(args, config) -> int:
    lexicon = _resolve_lexicon(config)
    parallel = load_pair_tsv(args.parallel)
    model = train_filter(
        parallel,
        lexicon,
        make_segmenter(lexicon, LanguageTag.JA),
        make_segmenter(lexicon, LanguageTag.ZH),
        model1_iterations=config.filter.model1_iterations,
        lm_order=config.filter.lm_order,
        lm_k=config.filter.lm_k,
        trees=config.filter.trees,
        depth=config.filter.depth,
        seed=config.pipeline.seed,
        threshold=config.filter.threshold,
    )
    model.save(args.out)
    print(f"filter trained on {len(parallel)} pairs -> {args.out}")
    return EXIT_OK


def _cmd_filter(args, config) -> int:
    lexicon = _resolve_lexicon(config)
    model = BitextFilter.load(args.model)
    provider = _resolve_provider(config)
    seg_ja = make_segmenter(lexicon, LanguageTag.JA)
    seg_zh = make_segmenter(lexicon, LanguageTag.ZH)
    survivors: list[ScoredPair] = []
    n_candidates = 0
    for obj in _read_jsonl(args.pairs):
        n_candidates += 1
        ja, zh = obj["ja"], obj["zh"]
        fv = model.features(ja, zh, seg_ja(ja), seg_zh(zh), lexicon)
        score = model.score(fv)
        if score >= config.filter.threshold:
            survivors.append(
                ScoredPair(
                    ja=ja,
                    zh=zh,
                    url_ja=obj.get("url_ja", ""),
                    url_zh=obj.get("url_zh", ""),
                    doc_score=float(obj.get("doc_score", 0.0)),
                    bead_cost=float(obj.get("bead_cost", 0.0)),
                    filter_score=score,
                )
            )
    if provider is not None:
        survivors = embedding_gate(
            survivors,
            provider,
            threshold=config.filter.embed_threshold,
            keep_below=config.filter.embed_keep_below,
        )
    records = [
        CorpusRecord(
            ja=p.ja, zh=p.zh, src_url_ja=p.url_ja, src_url_zh=p.url_zh,
            doc_score=p.doc_score, bead_cost=p.bead_cost,
            filter_score=p.filter_score, embed_sim=p.embed_sim,
        )
        for p in survivors
    ]
    _write_jsonl(args.out, (r.to_json() for r in records))
    print(f"{len(records)}/{n_candidates} pairs kept -> {args.out}")
    return EXIT_OK


def _cmd_dedup(args, config) -> int:
    records = (CorpusRecord.from_json(obj) for obj in _read_jsonl(args.input))
    kept = list(dedupe(records, exact=not args.approximate))
    _write_jsonl(args.out, (r.to_json() for r in kept))
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as fh:
            for record in kept:
                fh.write(f"{record.ja}\t{record.zh}\n")
    print(f"{len(kept)} records -> {args.out}")
    return EXIT_OK


def _cmd_report(args, config) -> int:
    reports = [SiteReport.from_json(obj) for obj in json.loads(Path(args.input).read_text("utf-8"))]
    sys.stdout.buffer.write(emit_report(reports, args.format))
    return EXIT_OK


def _cmd_run(args, config) -> int:
    result = run_pipeline(config)
    sys.stdout.buffer.write(emit_report(result.reports, "tsv"))
    print(f"{result.n_records} records -> {result.corpus_jsonl}")
    if result.site_errors:
        print(f"{result.site_errors} site(s) failed", file=sys.stderr)
        return EXIT_SITE_ERRORS
    return EXIT_OK


_COMMANDS = {
    "discover-archive": _cmd_discover_archive,
    "validate-urls": _cmd_validate_urls,
    "crawl": _cmd_crawl,
    "mine": _cmd_mine,
    "train-filter": _cmd_train_filter,
    "filter": _cmd_filter,
    "dedup": _cmd_dedup,
    "report": _cmd_report,
    "run": _cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "default-config":
        print(dump_default_config())
        return EXIT_OK
    try:
        config = _load_config(args)
        return _COMMANDS[args.command](args, config)
    except (OSError, ValueError, KeyError) as err:
        logger.error("%s", err)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
