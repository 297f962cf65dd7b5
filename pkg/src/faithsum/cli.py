"""Command-line front end.

Subcommands mirror the pipeline stages: ingest, extract, summarize,
evaluate, sweep, export-ft.  Exit codes: 0 success, 1 configuration or
input error, 2 run finished with per-record failures, 3 generation
backend or scorer unreachable.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .config import RunConfig, load_config
from .corpus import record_to_json
from .errors import BackendError, ConfigError, DatasetError, FaithsumError, ScorerError
from .faithful import SELECTOR_KINDS, SELECTOR_ROUGE1, SelectorSpec
from .generate import BACKEND_MOCK, BACKEND_OPENAI, build_prompt, export_ft_pairs
from .pipeline import (
    aggregate,
    build_backend,
    build_scorer,
    ingest_records,
    load_resources,
    probe_scorer,
    render_table,
    run_extraction,
    run_metadata,
    run_pipeline,
    sweep_temperatures,
    write_json,
    write_jsonl,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_UNREACHABLE = 3

_BACKEND_ALIASES = {
    "mock": BACKEND_MOCK,
    BACKEND_MOCK: BACKEND_MOCK,
    "http": BACKEND_OPENAI,
    BACKEND_OPENAI: BACKEND_OPENAI,
}

DEFAULT_SWEEP = [0.1, 0.3, 0.5, 0.7, 0.9]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faithsum",
        description="Faithful summarization of consumer health questions.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, type=Path, help="YAML run config")
        p.add_argument("--out", type=Path, default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="generation seed override")
        p.add_argument("--limit", type=int, default=None, help="process at most N records")
        p.add_argument(
            "--strict", action="store_true", help="abort on the first bad row or record"
        )

    p = sub.add_parser("ingest", help="load and normalize the dataset")
    common(p)

    p = sub.add_parser("extract", help="rank sentences and select context")
    common(p)

    def generation_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--backend",
            choices=sorted(set(_BACKEND_ALIASES)),
            default=None,
            help="generation backend override",
        )
        p.add_argument(
            "--selector",
            default=None,
            help="candidate selector: rouge1[:reference|:source], summac, or entity",
        )

    p = sub.add_parser("summarize", help="generate and select candidate summaries")
    common(p)
    generation_flags(p)

    p = sub.add_parser("evaluate", help="run the pipeline and report corpus metrics")
    common(p)
    generation_flags(p)

    p = sub.add_parser("sweep", help="evaluate across a temperature grid")
    common(p)
    generation_flags(p)
    p.add_argument(
        "--temperatures",
        default=None,
        help="comma-separated list, e.g. 0.1,0.3,0.5,0.7,0.9",
    )

    p = sub.add_parser("export-ft", help="write prompt/reference fine-tuning pairs")
    common(p)
    return parser


def _parse_selector(text: str) -> SelectorSpec:
    kind, _, target = text.partition(":")
    if kind not in SELECTOR_KINDS:
        raise ConfigError(
            f"--selector must be one of {sorted(SELECTOR_KINDS)}, got {kind!r}"
        )
    if target and kind != SELECTOR_ROUGE1:
        raise ConfigError(f"--selector {kind} takes no target suffix")
    if kind == SELECTOR_ROUGE1:
        return SelectorSpec(kind=kind, rouge1_target=target or "source")
    return SelectorSpec(kind=kind)


def _parse_temperatures(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--temperatures: {exc}") from exc
    if not values:
        raise ConfigError("--temperatures must name at least one value")
    for t in values:
        if not 0.0 <= t <= 2.0:
            raise ConfigError(f"--temperatures: {t} outside [0, 2]")
    return values


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> None:
    if args.out is not None:
        config.run.output_dir = args.out
    if args.limit is not None:
        if args.limit <= 0:
            raise ConfigError("--limit must be positive")
        config.run.limit = args.limit
    if args.strict:
        config.run.strict = True
    if args.seed is not None:
        config.generation = dataclasses.replace(config.generation, seed=args.seed)
    backend = getattr(args, "backend", None)
    if backend is not None:
        config.generation = dataclasses.replace(
            config.generation, backend_id=_BACKEND_ALIASES[backend]
        )
        if config.generation.backend_id == BACKEND_OPENAI and not config.base_url:
            raise ConfigError("--backend http needs generation.base_url in the config")
    selector = getattr(args, "selector", None)
    if selector is not None:
        config.selector = _parse_selector(selector)


def _exit_for(result) -> int:
    if not result.failures:
        return EXIT_OK
    if not result.outputs:
        return EXIT_UNREACHABLE
    return EXIT_PARTIAL


def _failure_rows(failures) -> list[dict]:
    return [f.to_json() for f in failures]


# ---------------------------------------------------------------------------
# subcommand bodies


def cmd_ingest(config: RunConfig, args: argparse.Namespace) -> int:
    records, result = ingest_records(config)
    out = config.run.output_dir
    write_jsonl(out / "records.jsonl", (record_to_json(r) for r in records))
    write_json(
        out / "ingest.json",
        {
            "dataset": config.manifest.name,
            "language": config.language.value,
            "total_rows": result.total_rows,
            "kept": len(records),
            "rejected": result.rejected,
        },
    )
    print(
        f"ingest: {len(records)} records kept, "
        f"{len(result.rejected)} rejected -> {out / 'records.jsonl'}"
    )
    return EXIT_OK


def cmd_extract(config: RunConfig, args: argparse.Namespace) -> int:
    records, _ = ingest_records(config)
    res = load_resources(config)
    extractions, failures = run_extraction(records, config, res)
    out = config.run.output_dir
    write_jsonl(out / "extraction.jsonl", (e.to_json() for e in extractions))
    write_json(
        out / "extract.json",
        {
            "n_records": len(extractions),
            "n_failures": len(failures),
            "failures": _failure_rows(failures),
            **run_metadata(config),
        },
    )
    print(
        f"extract: {len(extractions)} records, {len(failures)} failures "
        f"-> {out / 'extraction.jsonl'}"
    )
    if failures:
        return EXIT_PARTIAL if extractions else EXIT_UNREACHABLE
    return EXIT_OK


def _prepared_run(config: RunConfig):
    records, _ = ingest_records(config)
    res = load_resources(config)
    scorer = build_scorer(config)
    probe_scorer(scorer)
    backend = build_backend(config)
    return records, res, backend, scorer


def cmd_summarize(config: RunConfig, args: argparse.Namespace) -> int:
    records, res, backend, scorer = _prepared_run(config)
    result = run_pipeline(records, config, res, backend, scorer)
    out = config.run.output_dir
    write_jsonl(out / "summaries.jsonl", (o.to_json() for o in result.outputs))
    write_json(
        out / "run.json",
        {
            "n_records": len(result.outputs),
            "n_failures": len(result.failures),
            "failures": _failure_rows(result.failures),
            "selector": config.selector.kind,
            **run_metadata(config),
        },
    )
    print(
        f"summarize: {len(result.outputs)} summaries, "
        f"{len(result.failures)} failures -> {out / 'summaries.jsonl'}"
    )
    return _exit_for(result)


def cmd_evaluate(config: RunConfig, args: argparse.Namespace) -> int:
    records, res, backend, scorer = _prepared_run(config)
    result = run_pipeline(records, config, res, backend, scorer)
    aggregates = aggregate(result.reports)
    out = config.run.output_dir
    write_jsonl(
        out / "scores.jsonl",
        (
            {"id": o.record.id, "summary": o.best.text, "report": o.best.report.to_json()}
            for o in result.outputs
        ),
    )
    write_json(
        out / "summary.json",
        {
            "aggregates": aggregates,
            "n_failures": len(result.failures),
            "failures": _failure_rows(result.failures),
            "selector": config.selector.kind,
            **run_metadata(config),
        },
    )
    table = render_table([(config.manifest.name, aggregates)], config.language)
    (out / "table.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return _exit_for(result)


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    temperatures = (
        _parse_temperatures(args.temperatures)
        if args.temperatures is not None
        else list(DEFAULT_SWEEP)
    )
    records, res, backend, scorer = _prepared_run(config)
    rows, failures = sweep_temperatures(records, config, res, backend, scorer, temperatures)
    out = config.run.output_dir
    write_json(
        out / "sweep.json",
        {
            "rows": [{"temperature": t, "aggregates": agg} for t, agg in rows],
            "n_failures": len(failures),
            "failures": _failure_rows(failures),
            **run_metadata(config),
        },
    )
    table = render_table(
        [(f"t={t:g}", agg) for t, agg in rows], config.language, label="run"
    )
    (out / "sweep_table.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    if failures:
        return EXIT_PARTIAL if any(agg["n_records"] for _, agg in rows) else EXIT_UNREACHABLE
    return EXIT_OK


def cmd_export_ft(config: RunConfig, args: argparse.Namespace) -> int:
    records, _ = ingest_records(config)
    res = load_resources(config)
    extractions, failures = run_extraction(records, config, res)
    pairs = (
        (
            e.record,
            build_prompt(e.record, e.context_sentences, config.template_id, res.templates_dir),
        )
        for e in extractions
    )
    out = config.run.output_dir
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ft_pairs.jsonl"
    count = export_ft_pairs(pairs, path)
    print(f"export-ft: {count} pairs -> {path}")
    if failures:
        return EXIT_PARTIAL if extractions else EXIT_UNREACHABLE
    return EXIT_OK


_COMMANDS = {
    "ingest": cmd_ingest,
    "extract": cmd_extract,
    "summarize": cmd_summarize,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "export-ft": cmd_export_ft,
}


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        apply_overrides(config, args)
        return _COMMANDS[args.command](config, args)
    except (ConfigError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ScorerError, BackendError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except (FaithsumError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


def entry() -> None:
    sys.exit(main())
