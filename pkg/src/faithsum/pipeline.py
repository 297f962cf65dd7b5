"""End-to-end orchestration: ingest, extract, generate, score, aggregate.

Every stage is a pure function of (records, config, resources); repeat runs
with the same inputs write byte-identical artifacts.  Records that fail are
collected, not fatal, unless strict mode is on.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Callable, Optional, Sequence

from .config import STUB_SCORER_URL, RunConfig, active_template_id, config_fingerprint
from .corpus import ChqRecord, Language, load_dataset
from .errors import ConfigError, FaithsumError
from .faithful import (
    SELECTOR_SUMMAC,
    ScoredCandidate,
    score_candidate,
    select_best,
)
from .generate import (
    API_KEY_ENV,
    BACKEND_MOCK,
    MODE_NO_CONTEXT,
    MODE_SINGLE,
    GenerationParams,
    MockBackend,
    OpenAiHttpBackend,
    build_prompt,
    generate_candidates,
)
from .medner import (
    EntityMention,
    Gazetteer,
    NegationLexicon,
    load_gazetteer,
    load_negation_lexicon,
    tag_sentences,
)
from .scoring import CachedScorerClient, HttpScorerClient, StubScorerClient
from .textproc import load_word_list, normalized_words, segment_sentences, tokenize
from .textrank import (
    ExtractiveContext,
    build_similarity_graph,
    default_budget,
    query_terms,
    rank,
    select_context,
)

logger = logging.getLogger(__name__)

SCORER_URL_ENV = "FAITHSUM_SCORER_URL"


@dataclass
class Resources:
    """Loaded lexicons shared by every record of a run."""

    stopwords: frozenset[str]
    gazetteer: Gazetteer
    negation: NegationLexicon
    abbreviations: Optional[frozenset[str]]
    templates_dir: Optional[Path]


def load_resources(config: RunConfig) -> Resources:
    paths = config.resources.resolved(config.language)
    abbreviations = None
    if paths["abbreviations"] is not None:
        abbreviations = load_word_list(paths["abbreviations"])
    return Resources(
        stopwords=load_word_list(paths["stopwords"]),
        gazetteer=load_gazetteer(paths["gazetteer"], config.language),
        negation=load_negation_lexicon(paths["negation"], config.language),
        abbreviations=abbreviations,
        templates_dir=paths["templates_dir"],
    )


def build_backend(config: RunConfig):
    if config.generation.backend_id == BACKEND_MOCK:
        return MockBackend()
    api_key = os.environ.get(API_KEY_ENV, "")
    return OpenAiHttpBackend(
        base_url=config.base_url or "",
        model=config.model or "",
        api_key=api_key,
    )


def build_scorer(config: RunConfig):
    """Scorer client per config/env, or None when faithfulness scoring is off.

    ``scorer.url: stub`` selects the in-process lexical stub; any other URL
    is treated as an HTTP scorer endpoint.  The FAITHSUM_SCORER_URL
    environment variable fills in when the config leaves the URL unset.
    """
    url = config.scorer.url or os.environ.get(SCORER_URL_ENV) or None
    if url is None:
        if config.selector.kind == SELECTOR_SUMMAC:
            raise ConfigError(
                "selector.kind 'summac' needs a scorer: set scorer.url "
                f"(or {SCORER_URL_ENV}); use '{STUB_SCORER_URL}' for the offline stub"
            )
        return None
    if url == STUB_SCORER_URL:
        scorer = StubScorerClient()
    else:
        scorer = HttpScorerClient(url, timeout=config.scorer.timeout)
    if config.scorer.cache_dir is not None:
        scorer = CachedScorerClient(scorer, config.scorer.cache_dir)
    return scorer


def probe_scorer(scorer) -> None:
    """Raise ScorerError early when the scorer endpoint is down."""
    if scorer is not None:
        scorer.health()


# ---------------------------------------------------------------------------
# per-record stages


@dataclass
class Extraction:
    record: ChqRecord
    sentences: list[str]
    scores: list[float]
    iterations: int
    mentions: list[EntityMention]
    context: ExtractiveContext

    @property
    def context_sentences(self) -> list[str]:
        return [self.sentences[i] for i in self.context.selected]

    def to_json(self) -> dict:
        return {
            "id": self.record.id,
            "language": self.record.language.value,
            "n_sentences": len(self.sentences),
            "sentences": self.sentences,
            "scores": self.scores,
            "iterations": self.iterations,
            "entities": [
                {
                    "canonical_id": m.canonical_id,
                    "surface": m.surface,
                    "sentence": m.sentence_index,
                    "negated": m.negated,
                }
                for m in self.mentions
            ],
            "selected": self.context.selected,
            "reasons": {str(i): r for i, r in sorted(self.context.reasons.items())},
        }


def extract_record(record: ChqRecord, res: Resources, config: RunConfig) -> Extraction:
    """Sentence-rank the question and pick the context subset."""
    spans = segment_sentences(record.question, record.language, res.abbreviations)
    if not spans:
        raise ValueError(f"record {record.id}: no sentences after segmentation")
    sentences = [s.text for s in spans]
    tokens = [tokenize(text, record.language) for text in sentences]
    mentions = tag_sentences(tokens, res.gazetteer, res.negation, config.negation_window)
    words = [normalized_words(toks) for toks in tokens]
    graph = build_similarity_graph(words, res.stopwords)
    scores, iterations = rank(graph, config.textrank)
    terms = query_terms(tokens, record.language, res.stopwords)
    budget = config.budget if config.budget is not None else default_budget(len(sentences))
    context = select_context(tokens, scores, mentions, terms, budget)
    return Extraction(
        record=record,
        sentences=sentences,
        scores=scores,
        iterations=iterations,
        mentions=mentions,
        context=context,
    )


@dataclass
class RecordOutput:
    extraction: Extraction
    candidates: list[ScoredCandidate]
    best: ScoredCandidate
    retries: int

    @property
    def record(self) -> ChqRecord:
        return self.extraction.record

    def to_json(self) -> dict:
        return {
            "id": self.record.id,
            "language": self.record.language.value,
            "context": self.extraction.context_sentences,
            "candidates": [
                {"index": c.index, "text": c.text, "report": c.report.to_json()}
                for c in self.candidates
            ],
            "best_index": self.best.index,
            "summary": self.best.text,
            "report": self.best.report.to_json(),
        }


def summarize_record(
    extraction: Extraction,
    res: Resources,
    config: RunConfig,
    backend,
    scorer,
    params: Optional[GenerationParams] = None,
) -> RecordOutput:
    """Generate candidates for one extracted record and keep the best."""
    if params is None:
        params = config.generation
    if config.mode == MODE_SINGLE:
        params = dataclasses.replace(params, n_candidates=1)
    record = extraction.record
    if config.mode == MODE_NO_CONTEXT:
        context_sentences = [record.question]
    else:
        context_sentences = extraction.context_sentences
    prompt = build_prompt(
        record, context_sentences, active_template_id(config), res.templates_dir
    )
    result = generate_candidates(prompt, params, backend)
    scored = [
        ScoredCandidate(
            index=cand.index,
            text=cand.text,
            report=score_candidate(
                record,
                cand.text,
                res.gazetteer,
                res.negation,
                scorer,
                config.negation_window,
                config.scorer.chunk_size,
                res.abbreviations,
            ),
        )
        for cand in result.candidates
    ]
    best = select_best(scored, config.selector)
    return RecordOutput(
        extraction=extraction,
        candidates=scored,
        best=best,
        retries=sum(c.retries for c in result.candidates),
    )


# ---------------------------------------------------------------------------
# corpus-level driver


@dataclass
class Failure:
    record_id: str
    stage: str
    message: str

    def to_json(self) -> dict:
        return {"id": self.record_id, "stage": self.stage, "error": self.message}


@dataclass
class PipelineResult:
    outputs: list[RecordOutput] = field(default_factory=list)
    failures: list[Failure] = field(default_factory=list)

    @property
    def reports(self):
        return [o.best.report for o in self.outputs]


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def ingest_records(config: RunConfig):
    """Load, normalize and optionally truncate the configured dataset."""
    result = load_dataset(config.manifest, strict=config.run.strict)
    records = result.records
    if config.run.limit is not None:
        records = records[: config.run.limit]
    return records, result


def run_extraction(
    records: Sequence[ChqRecord], config: RunConfig, res: Resources
) -> tuple[list[Extraction], list[Failure]]:
    extractions: list[Extraction] = []
    failures: list[Failure] = []

    def one(record: ChqRecord):
        try:
            return extract_record(record, res, config)
        except (FaithsumError, ValueError) as exc:
            if config.run.strict:
                raise
            return Failure(record.id, "extract", str(exc))

    for item in _map_ordered(one, records, config.run.workers):
        if isinstance(item, Failure):
            failures.append(item)
            logger.warning("extract failed for %s: %s", item.record_id, item.message)
        else:
            extractions.append(item)
    return extractions, failures


def run_pipeline(
    records: Sequence[ChqRecord],
    config: RunConfig,
    res: Resources,
    backend,
    scorer,
    params: Optional[GenerationParams] = None,
    extractions: Optional[Sequence[Extraction]] = None,
) -> PipelineResult:
    """Full per-record chain over a corpus; order follows the input."""
    result = PipelineResult()
    if extractions is None:
        extractions, result.failures = run_extraction(records, config, res)

    def one(extraction: Extraction):
        try:
            return summarize_record(extraction, res, config, backend, scorer, params)
        except (FaithsumError, ValueError) as exc:
            if config.run.strict:
                raise
            return Failure(extraction.record.id, "summarize", str(exc))

    for item in _map_ordered(one, extractions, config.run.workers):
        if isinstance(item, Failure):
            result.failures.append(item)
            logger.warning("summarize failed for %s: %s", item.record_id, item.message)
        else:
            result.outputs.append(item)
    return result


# ---------------------------------------------------------------------------
# aggregation and rendering


def aggregate(reports: Sequence) -> dict:
    """Corpus means; metrics missing on every record aggregate to None."""

    def mean_of(values):
        present = [v for v in values if v is not None]
        return fmean(present) if present else None

    n = len(reports)
    return {
        "n_records": n,
        "rouge1": mean_of(r.r1.f1 for r in reports),
        "rouge2": mean_of(r.r2.f1 for r in reports),
        "rougeL": mean_of(r.rl.f1 for r in reports),
        "rouge1_source": mean_of(r.r1_source.f1 for r in reports),
        "bert_f1": mean_of(r.bert_f1 for r in reports),
        "fre": mean_of(r.fre for r in reports),
        "summac_zs": mean_of(r.summac_zs for r in reports),
        "align": mean_of(r.align for r in reports),
        "entity_retention": mean_of(r.entity_retention for r in reports),
        "negation_consistency": (
            sum(1 for r in reports if r.negation_consistent) / n if n else None
        ),
    }


# (column header, aggregate key, scale), in display order.
_TABLE_COLUMNS = [
    ("R1", "rouge1", 100.0),
    ("R2", "rouge2", 100.0),
    ("RL", "rougeL", 100.0),
    ("BERT", "bert_f1", 100.0),
    ("Read.", "fre", 1.0),
    ("SummaC", "summac_zs", 1.0),
    ("Align", "align", 100.0),
]


def render_table(
    rows: Sequence[tuple[str, dict]], language: Language, label: str = "system"
) -> str:
    """Fixed-width metric table; the readability column is English-only."""
    columns = [c for c in _TABLE_COLUMNS if language is Language.ENGLISH or c[0] != "Read."]
    label_width = max([len(label)] + [len(name) for name, _ in rows])
    widths = [max(len(h), 7) for h, _, _ in columns]

    def fmt(value, scale) -> str:
        if value is None:
            return "n/a"
        return f"{value * scale:.2f}"

    lines = [
        label.ljust(label_width)
        + "  "
        + "  ".join(h.rjust(w) for (h, _, _), w in zip(columns, widths))
    ]
    lines.append("-" * len(lines[0]))
    for name, agg in rows:
        cells = [
            fmt(agg.get(key), scale).rjust(w)
            for (_, key, scale), w in zip(columns, widths)
        ]
        lines.append(name.ljust(label_width) + "  " + "  ".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# artifact writing


def write_json(path: Path, payload) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, ensure_ascii=False, indent=2)
        fh.write("\n")


def write_jsonl(path: Path, rows) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
            count += 1
    return count


def run_metadata(config: RunConfig, params: Optional[GenerationParams] = None) -> dict:
    from .kernels import BACKEND as kernels_backend

    meta = {
        "fingerprint": config_fingerprint(config),
        "kernels": kernels_backend,
    }
    if params is not None and params != config.generation:
        meta["generation_override"] = params.snapshot()
    return meta


def sweep_temperatures(
    records: Sequence[ChqRecord],
    config: RunConfig,
    res: Resources,
    backend,
    scorer,
    temperatures: Sequence[float],
) -> tuple[list[tuple[float, dict]], list[Failure]]:
    """Re-run generation+scoring per temperature over shared extractions."""
    extractions, failures = run_extraction(records, config, res)
    rows: list[tuple[float, dict]] = []
    for t in temperatures:
        params = dataclasses.replace(config.generation, temperature=t)
        result = run_pipeline(
            records, config, res, backend, scorer, params=params, extractions=extractions
        )
        failures.extend(result.failures)
        rows.append((t, aggregate(result.reports)))
    return rows, failures
