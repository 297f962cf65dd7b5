"""Deterministic lexical scoring backend.

Stands in for transformer checkpoints when the service must run fully
offline.  NLI probabilities come from hypothesis-token coverage of the
premise plus a negation-cue polarity check; BERTScore-style similarity
from greedy character-trigram matching.  Identical requests always
produce identical responses, which is what the golden-file tests pin.
"""

from __future__ import annotations

import math
import re
import unicodedata
import zlib
from typing import Sequence

# \w alone excludes combining marks and would split Bangla words at
# vowel signs; widening with the Bengali block keeps them whole.
_WORD_RE = re.compile(r"[\wঀ-৿]+", re.UNICODE)

# Small high-precision cue sets; a mismatch in cue presence between
# premise and hypothesis is treated as a polarity flip.
_NEGATION_CUES = {
    unicodedata.normalize("NFC", cue)
    for cue in (
        "no", "not", "never", "without", "denies", "denied", "cannot", "none",
        "না", "নেই", "নয়", "ছাড়া", "বিনা",
    )
}


def _words(text: str) -> list[str]:
    text = unicodedata.normalize("NFC", text)
    return [w.casefold() for w in _WORD_RE.findall(text)]


def _softmax3(a: float, b: float, c: float) -> tuple[float, float, float]:
    m = max(a, b, c)
    ea, eb, ec = math.exp(a - m), math.exp(b - m), math.exp(c - m)
    z = ea + eb + ec
    return ea / z, eb / z, ec / z


def _token_vector(token: str) -> set[int]:
    padded = f"^{token}$"
    grams = {padded[i : i + 3] for i in range(max(len(padded) - 2, 1))}
    return {zlib.crc32(g.encode("utf-8")) for g in grams}


def _similarity(a: str, b: str) -> float:
    if a == b:
        return 1.0
    va, vb = _token_vector(a), _token_vector(b)
    union = len(va | vb)
    return len(va & vb) / union if union else 0.0


class LexicalBackend:
    """Instant-loading, dependency-free backend."""

    nli_model_id = "lexical-nli-v1"
    bert_model_id = "lexical-encoder-v1"

    @property
    def model_ids(self) -> list[str]:
        return [self.nli_model_id, self.bert_model_id]

    def nli(
        self, pairs: Sequence[tuple[str, str]]
    ) -> tuple[list[tuple[float, float, float]], str]:
        scores = []
        for premise, hypothesis in pairs:
            p_words = set(_words(premise))
            h_words = _words(hypothesis)
            coverage = (
                sum(1 for w in h_words if w in p_words) / len(h_words)
                if h_words
                else 0.0
            )
            p_negated = bool(p_words & _NEGATION_CUES)
            h_negated = bool(set(h_words) & _NEGATION_CUES)
            flip = 1.0 if p_negated != h_negated else 0.0
            entail_logit = 4.0 * coverage - 5.0 * flip - 1.0
            contradict_logit = 5.0 * flip + (1.0 - coverage) - 2.0
            scores.append(_softmax3(entail_logit, contradict_logit, 0.0))
        return scores, self.nli_model_id

    def bertscore(
        self, candidate: str, reference: str, lang: str = "en"
    ) -> tuple[float, float, float, str]:
        cand = _words(candidate)
        ref = _words(reference)
        if not cand or not ref:
            return 0.0, 0.0, 0.0, self.bert_model_id
        precision = sum(max(_similarity(c, r) for r in ref) for c in cand) / len(cand)
        recall = sum(max(_similarity(r, c) for c in cand) for r in ref) / len(ref)
        f1 = (
            0.0
            if precision + recall == 0
            else 2 * precision * recall / (precision + recall)
        )
        return precision, recall, f1, self.bert_model_id
