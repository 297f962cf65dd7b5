"""Reference-based quality metrics: ROUGE-1/2/L and Flesch Reading Ease.

ROUGE uses clipped n-gram counts and LCS over normalized word tokens;
no stemming or synonym matching.  FRE uses the package's own
segmentation and syllable heuristic and is left unclamped.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .corpus import Language
from .kernels import lcs_length
from .textproc import count_syllables, segment_sentences, tokenize


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, precision: float, recall: float) -> "PrfScore":
        if precision + recall == 0.0:
            return cls(precision, recall, 0.0)
        f1 = 2.0 * precision * recall / (precision + recall)
        return cls(precision, recall, f1)


ZERO_SCORE = PrfScore(0.0, 0.0, 0.0)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(
    candidate_tokens: Sequence[str], reference_tokens: Sequence[str], n: int
) -> PrfScore:
    """Clipped n-gram overlap: each reference n-gram matches at most its
    reference multiplicity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cand = _ngrams(candidate_tokens, n)
    ref = _ngrams(reference_tokens, n)
    total_cand = sum(cand.values())
    total_ref = sum(ref.values())
    if total_cand == 0 or total_ref == 0:
        return ZERO_SCORE
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return PrfScore.from_pr(overlap / total_cand, overlap / total_ref)


def rouge_l(
    candidate_tokens: Sequence[str], reference_tokens: Sequence[str]
) -> PrfScore:
    """Longest-common-subsequence precision/recall/F1."""
    if not candidate_tokens or not reference_tokens:
        return ZERO_SCORE
    lcs = lcs_length(list(candidate_tokens), list(reference_tokens))
    return PrfScore.from_pr(lcs / len(candidate_tokens), lcs / len(reference_tokens))


def fre(text: str, abbreviations: Optional[frozenset[str]] = None) -> float:
    """Flesch Reading Ease, English only, unclamped:
    206.835 - 1.015 * words/sentences - 84.6 * syllables/words."""
    sentences = segment_sentences(text, Language.ENGLISH, abbreviations)
    words = [t for t in tokenize(text, Language.ENGLISH) if t.is_word]
    if not words:
        raise ValueError("FRE needs at least one word")
    n_sentences = max(len(sentences), 1)
    syllables = sum(count_syllables(t.surface) for t in words)
    return (
        206.835
        - 1.015 * (len(words) / n_sentences)
        - 84.6 * (syllables / len(words))
    )
