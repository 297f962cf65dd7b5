"""Sentence graph construction, damped power-iteration ranking, and
entity/query-aware context selection.

Edge weights follow the classic sentence-similarity formula: shared
distinct content words normalized by the log sentence lengths.  Ranking
runs on the kernels backend (compiled when available).
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .corpus import Language
from .kernels import power_iteration
from .medner import EntityMention
from .textproc import Token

def _nfc_set(words: list[str]) -> frozenset[str]:
    return frozenset(unicodedata.normalize("NFC", w) for w in words)


INTERROGATIVES = {
    Language.ENGLISH: _nfc_set(
        ["what", "why", "how", "when", "where", "which", "who", "whom", "whose"]
    ),
    Language.BANGLA: _nfc_set(
        ["কি", "কী", "কেন", "কিভাবে", "কীভাবে", "কোথায়", "কখন", "কোন", "কে", "কার", "কাকে"]
    ),
}

REASON_ENTITY = "entity-bearing"
REASON_QUERY = "query-term"
REASON_TOPUP = "rank-top-up"


@dataclass
class TextRankParams:
    damping: float = 0.85
    epsilon: float = 1e-6
    max_iterations: int = 100

    def __post_init__(self) -> None:
        if not 0.0 < self.damping < 1.0:
            raise ValueError("damping must be in (0, 1)")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class SimilarityGraph:
    weights: np.ndarray

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass
class ExtractiveContext:
    selected: list[int]
    scores: list[float]
    reasons: dict[int, str] = field(default_factory=dict)


def build_similarity_graph(
    sentence_words: Sequence[Sequence[str]],
    stopwords: frozenset[str] = frozenset(),
) -> SimilarityGraph:
    """Symmetric zero-diagonal graph over sentences.

    ``sentence_words`` holds each sentence's normalized word tokens.
    weight(i, j) = |shared distinct non-stopword tokens| / (ln|Si| + ln|Sj|);
    sentences with <= 1 word token take weight 0 (log guard).
    """
    n = len(sentence_words)
    if n == 0:
        raise ValueError("at least one sentence required")
    lengths = [len(words) for words in sentence_words]
    content = [frozenset(w for w in words if w not in stopwords) for words in sentence_words]
    weights = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            if lengths[i] <= 1 or lengths[j] <= 1:
                continue
            overlap = len(content[i] & content[j])
            if overlap == 0:
                continue
            w = overlap / (math.log(lengths[i]) + math.log(lengths[j]))
            weights[i, j] = w
            weights[j, i] = w
    return SimilarityGraph(weights=weights)


def rank(graph: SimilarityGraph, params: Optional[TextRankParams] = None) -> tuple[list[float], int]:
    """Scores via score_i = (1-d) + d * sum_j (w_ji / sum_k w_jk) * score_j,
    uniform init 1.0; stops when the max score delta drops below epsilon."""
    if params is None:
        params = TextRankParams()
    return power_iteration(
        graph.weights, params.damping, params.epsilon, params.max_iterations
    )


def default_budget(n_sentences: int) -> int:
    return max(3, math.ceil(n_sentences / 2))


def query_terms(
    sentences_tokens: Sequence[Sequence[Token]],
    language: Language,
    stopwords: frozenset[str] = frozenset(),
) -> frozenset[str]:
    """Interrogative words plus the content tokens of the final
    interrogative sentence (the sentence ending in '?'), when one exists."""
    terms = set(INTERROGATIVES[language])
    final_interrogative = None
    for tokens in sentences_tokens:
        if any(t.surface == "?" for t in tokens):
            final_interrogative = tokens
    if final_interrogative is not None:
        for tok in final_interrogative:
            if tok.is_word and tok.normalized not in stopwords:
                terms.add(tok.normalized)
    return frozenset(terms)


def select_context(
    sentences_tokens: Sequence[Sequence[Token]],
    scores: Sequence[float],
    entity_mentions: Sequence[EntityMention],
    query_term_set: frozenset[str],
    budget: int,
) -> ExtractiveContext:
    """Keep entity-bearing and query-bearing sentences (score-capped at
    ``budget``), topping up with the highest-ranked rest; document order
    is preserved and ties break toward the earlier sentence."""
    n = len(sentences_tokens)
    if n == 0:
        raise ValueError("empty sentence list")
    if budget <= 0:
        raise ValueError("budget must be positive")
    if len(scores) != n:
        raise ValueError("scores and sentences disagree in length")

    entity_sentences = {m.sentence_index for m in entity_mentions}
    reasons: dict[int, str] = {}
    mandatory = []
    for idx, tokens in enumerate(sentences_tokens):
        if idx in entity_sentences:
            reasons[idx] = REASON_ENTITY
            mandatory.append(idx)
        elif any(t.is_word and t.normalized in query_term_set for t in tokens):
            reasons[idx] = REASON_QUERY
            mandatory.append(idx)

    by_rank = sorted(range(n), key=lambda i: (-scores[i], i))
    if len(mandatory) > budget:
        keep = sorted(mandatory, key=lambda i: (-scores[i], i))[:budget]
        selected = sorted(keep)
    else:
        selected = list(mandatory)
        for idx in by_rank:
            if len(selected) >= budget:
                break
            if idx not in reasons:
                reasons[idx] = REASON_TOPUP
                selected.append(idx)
        selected.sort()

    return ExtractiveContext(
        selected=selected,
        scores=[float(s) for s in scores],
        reasons={i: reasons[i] for i in selected},
    )
