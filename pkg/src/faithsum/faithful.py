"""Faithfulness scoring and best-of-N selection.

Covers the NLI grid and its zero-shot max-mean aggregation, chunked
alignment, sidecar-delegated BERTScore, the entity-retention proxy, and
selector-driven candidate choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import ChqRecord, Language
from .errors import ScorerProtocolError
from .medner import Gazetteer, NegationLexicon, OverlapReport, entity_overlap, tag_sentences
from .metrics import PrfScore, ZERO_SCORE, fre, rouge_l, rouge_n
from .textproc import normalized_words, segment_sentences, tokenize

SIMPLEX_TOLERANCE = 1e-4
DEFAULT_CHUNK_SIZE = 4

SELECTOR_ROUGE1 = "rouge1"
SELECTOR_SUMMAC = "summac"
SELECTOR_ENTITY = "entity"
SELECTOR_KINDS = frozenset({SELECTOR_ROUGE1, SELECTOR_SUMMAC, SELECTOR_ENTITY})
ROUGE1_TARGET_REFERENCE = "reference"
ROUGE1_TARGET_SOURCE = "source"


@dataclass(frozen=True)
class NliCell:
    entail: float
    contradict: float
    neutral: float


@dataclass
class NliMatrix:
    """Grid of NLI probabilities: rows index summary sentences, columns
    index source sentences."""

    cells: list[list[NliCell]]

    @property
    def n_summary(self) -> int:
        return len(self.cells)

    @property
    def n_source(self) -> int:
        return len(self.cells[0]) if self.cells else 0


@dataclass(frozen=True)
class SelectorSpec:
    kind: str
    rouge1_target: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in (SELECTOR_ROUGE1, SELECTOR_SUMMAC, SELECTOR_ENTITY):
            raise ValueError(f"unknown selector kind: {self.kind!r}")
        if self.kind == SELECTOR_ROUGE1:
            if self.rouge1_target not in (ROUGE1_TARGET_REFERENCE, ROUGE1_TARGET_SOURCE):
                raise ValueError("rouge1 selector needs a target of 'reference' or 'source'")
        elif self.rouge1_target is not None:
            raise ValueError("rouge1_target only applies to the rouge1 selector")


@dataclass
class ScoreReport:
    r1: PrfScore
    r2: PrfScore
    rl: PrfScore
    r1_source: PrfScore
    bert_f1: Optional[float]
    fre: Optional[float]
    summac_zs: Optional[float]
    align: Optional[float]
    entity_retention: float
    negation_consistent: bool

    def to_json(self) -> dict:
        return {
            "r1": {"p": self.r1.precision, "r": self.r1.recall, "f1": self.r1.f1},
            "r2": {"p": self.r2.precision, "r": self.r2.recall, "f1": self.r2.f1},
            "rl": {"p": self.rl.precision, "r": self.rl.recall, "f1": self.rl.f1},
            "r1_source_f1": self.r1_source.f1,
            "bert_f1": self.bert_f1,
            "fre": self.fre,
            "summac_zs": self.summac_zs,
            "align": self.align,
            "align_x100": None if self.align is None else self.align * 100.0,
            "entity_retention": self.entity_retention,
            "negation_consistent": self.negation_consistent,
        }


def _validate_cell(entail: float, contradict: float, neutral: float) -> NliCell:
    total = entail + contradict + neutral
    if min(entail, contradict, neutral) < 0.0 or abs(total - 1.0) > SIMPLEX_TOLERANCE:
        raise ScorerProtocolError(
            f"NLI cell ({entail}, {contradict}, {neutral}) is not a probability triple"
        )
    return NliCell(entail, contradict, neutral)


def nli_matrix(
    source_sentences: Sequence[str],
    summary_sentences: Sequence[str],
    scorer,
) -> NliMatrix:
    """Score every (source sentence as premise, summary sentence as
    hypothesis) pair in one batched scorer call, row-major by summary."""
    if not source_sentences or not summary_sentences:
        raise ValueError("both sentence lists must be non-empty")
    pairs = [
        (src, summ) for summ in summary_sentences for src in source_sentences
    ]
    flat = scorer.nli(pairs)
    if len(flat) != len(pairs):
        raise ScorerProtocolError(
            f"scorer returned {len(flat)} cells for {len(pairs)} pairs"
        )
    n_src = len(source_sentences)
    cells = []
    for row_index in range(len(summary_sentences)):
        row = [
            _validate_cell(*flat[row_index * n_src + col]) for col in range(n_src)
        ]
        cells.append(row)
    return NliMatrix(cells=cells)


def summac_zs(matrix: NliMatrix) -> float:
    """Zero-shot aggregation: per summary sentence take the best
    entail-minus-contradict over source sentences, then average."""
    per_sentence = [
        max(cell.entail - cell.contradict for cell in row) for row in matrix.cells
    ]
    return sum(per_sentence) / len(per_sentence)


def source_chunks(source_sentences: Sequence[str], chunk_size: int) -> list[str]:
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    return [
        " ".join(source_sentences[i : i + chunk_size])
        for i in range(0, len(source_sentences), chunk_size)
    ]


def align_zs(
    source_sentences: Sequence[str],
    summary_sentences: Sequence[str],
    scorer,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> float:
    """Chunked alignment: each summary sentence aligns to its best source
    chunk by entailment probability; the mean over summary sentences is
    returned in [0, 1]."""
    if not source_sentences or not summary_sentences:
        raise ValueError("both sentence lists must be non-empty")
    chunks = source_chunks(source_sentences, chunk_size)
    pairs = [(chunk, summ) for summ in summary_sentences for chunk in chunks]
    flat = scorer.nli(pairs)
    if len(flat) != len(pairs):
        raise ScorerProtocolError(
            f"scorer returned {len(flat)} cells for {len(pairs)} pairs"
        )
    n_chunks = len(chunks)
    per_sentence = []
    for i in range(len(summary_sentences)):
        cells = [
            _validate_cell(*flat[i * n_chunks + j]) for j in range(n_chunks)
        ]
        per_sentence.append(max(c.entail for c in cells))
    return sum(per_sentence) / len(per_sentence)


def bert_f1(candidate_text: str, reference_text: str, scorer, lang: str = "en") -> float:
    """Delegates to the sidecar's bertscore endpoint; the returned f1 is
    range-checked and passed through unchanged."""
    result = scorer.bertscore(candidate_text, reference_text, lang)
    value = float(result["f1"])
    if not 0.0 <= value <= 1.0:
        raise ScorerProtocolError(f"bertscore f1 out of range: {value}")
    return value


def entity_retention(
    record: ChqRecord,
    summary_text: str,
    gazetteer: Gazetteer,
    negation_lexicon: NegationLexicon,
    window: int = 5,
) -> tuple[float, bool, OverlapReport]:
    """Automated retention proxy: tag both texts, compare
    (entity, negation) keys.  Retention is 1.0 when the source has no
    entities; consistency requires no flips and no hallucinations."""
    language = record.language

    def doc_mentions(text: str):
        spans = segment_sentences(text, language)
        tokens = [tokenize(span.text, language) for span in spans]
        return tag_sentences(tokens, gazetteer, negation_lexicon, window)

    source_mentions = doc_mentions(record.question)
    summary_mentions = doc_mentions(summary_text)
    report = entity_overlap(source_mentions, summary_mentions)
    source_keys = {m.key for m in source_mentions}
    retention = (
        len(report.retained) / len(source_keys) if source_keys else 1.0
    )
    flipped = {
        (cid, neg) for cid, neg in report.lost if (cid, not neg) in report.hallucinated
    }
    consistent = not flipped and not report.hallucinated
    return retention, consistent, report


@dataclass
class ScoredCandidate:
    index: int
    text: str
    report: ScoreReport


def selector_key(scored: ScoredCandidate, spec: SelectorSpec):
    report = scored.report
    if spec.kind == SELECTOR_ROUGE1:
        if spec.rouge1_target == ROUGE1_TARGET_REFERENCE:
            return report.r1.f1
        return report.r1_source.f1
    if spec.kind == SELECTOR_SUMMAC:
        if report.summac_zs is None:
            raise ValueError("summac selector needs faithfulness scoring enabled")
        return report.summac_zs
    summac = report.summac_zs if report.summac_zs is not None else 0.0
    return (report.negation_consistent, report.entity_retention, summac)


def select_best(scored: Sequence[ScoredCandidate], spec: SelectorSpec) -> ScoredCandidate:
    """Argmax of the selector key; ties keep the lowest candidate index."""
    if not scored:
        raise ValueError("no scored candidates to select from")
    best = scored[0]
    best_key = selector_key(best, spec)
    for cand in scored[1:]:
        key = selector_key(cand, spec)
        if key > best_key:
            best = cand
            best_key = key
    return best


def score_candidate(
    record: ChqRecord,
    candidate_text: str,
    gazetteer: Gazetteer,
    negation_lexicon: NegationLexicon,
    scorer=None,
    window: int = 5,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    abbreviations: Optional[frozenset[str]] = None,
) -> ScoreReport:
    """Assemble the full metric vector for one candidate summary."""
    language = record.language
    cand_words = normalized_words(tokenize(candidate_text, language))
    source_words = normalized_words(tokenize(record.question, language))

    if record.reference_summary:
        ref_words = normalized_words(tokenize(record.reference_summary, language))
        r1 = rouge_n(cand_words, ref_words, 1)
        r2 = rouge_n(cand_words, ref_words, 2)
        rl = rouge_l(cand_words, ref_words)
    else:
        r1 = r2 = rl = ZERO_SCORE
    r1_source = rouge_n(cand_words, source_words, 1)

    readability = None
    if language is Language.ENGLISH and cand_words:
        readability = fre(candidate_text, abbreviations)

    summac_score = None
    align_score = None
    bert_score = None
    if scorer is not None:
        source_sentences = [
            s.text for s in segment_sentences(record.question, language)
        ]
        summary_sentences = [
            s.text for s in segment_sentences(candidate_text, language)
        ]
        if source_sentences and summary_sentences:
            matrix = nli_matrix(source_sentences, summary_sentences, scorer)
            summac_score = summac_zs(matrix)
            align_score = align_zs(
                source_sentences, summary_sentences, scorer, chunk_size
            )
        lang_tag = "en" if language is Language.ENGLISH else "bn"
        if record.reference_summary:
            bert_score = bert_f1(
                candidate_text, record.reference_summary, scorer, lang_tag
            )

    retention, consistent, _ = entity_retention(
        record, candidate_text, gazetteer, negation_lexicon, window
    )
    return ScoreReport(
        r1=r1,
        r2=r2,
        rl=rl,
        r1_source=r1_source,
        bert_f1=bert_score,
        fre=readability,
        summac_zs=summac_score,
        align=align_score,
        entity_retention=retention,
        negation_consistent=consistent,
    )
