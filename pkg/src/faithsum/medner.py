"""Gazetteer-based medical entity recognition with negation detection.

Mentions are found by left-to-right longest match over normalized
tokens; negation follows a NegEx-style bounded window with clause
boundary blockers.  Matching is case-insensitive for English (via token
normalization) and exact for Bangla.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .corpus import Language, normalize_text
from .errors import LexiconError
from .textproc import Token, tokenize

logger = logging.getLogger(__name__)

DEFAULT_NEGATION_WINDOW = 5

# Tokens that end a negation scope between trigger and mention.
_CLAUSE_BOUNDARIES = {
    Language.ENGLISH: {",", ";", "but"},
    Language.BANGLA: {",", ";", unicodedata.normalize("NFC", "কিন্তু")},
}


@dataclass(frozen=True)
class Gazetteer:
    entries: dict[tuple[str, ...], str]
    source_name: str
    language: Language

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_len(self) -> int:
        return max((len(k) for k in self.entries), default=0)


@dataclass(frozen=True)
class NegationLexicon:
    triggers: frozenset[tuple[str, ...]]
    language: Language

    @property
    def max_len(self) -> int:
        return max((len(t) for t in self.triggers), default=0)


@dataclass(frozen=True)
class EntityMention:
    canonical_id: str
    surface: str
    sentence_index: int
    token_start: int
    token_end: int
    negated: bool

    @property
    def key(self) -> tuple[str, bool]:
        return (self.canonical_id, self.negated)


@dataclass
class OverlapReport:
    retained: set[tuple[str, bool]] = field(default_factory=set)
    lost: set[tuple[str, bool]] = field(default_factory=set)
    hallucinated: set[tuple[str, bool]] = field(default_factory=set)


def _normalize_phrase(phrase: str, language: Language) -> tuple[str, ...]:
    # NFC first so lexicon files match corpus-normalized text regardless of
    # how their own codepoints were composed.
    phrase = normalize_text(phrase)
    return tuple(t.normalized for t in tokenize(phrase, language) if t.is_word)


def load_gazetteer(path: Path, language: Language, source_name: str = "") -> Gazetteer:
    """Parse ``surface|canonical_id`` lines; duplicates keep first with a warning."""
    path = Path(path)
    if not path.exists():
        raise LexiconError(f"gazetteer file not found: {path}")
    entries: dict[tuple[str, ...], str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "|" not in line:
                raise LexiconError(f"{path}:{lineno}: expected 'surface|canonical_id'")
            surface, canonical_id = line.split("|", 1)
            key = _normalize_phrase(surface, language)
            if not key:
                raise LexiconError(f"{path}:{lineno}: empty surface form")
            if key in entries:
                logger.warning("%s:%d: duplicate surface %r, keeping first", path, lineno, surface)
                continue
            entries[key] = canonical_id.strip()
    if not entries:
        raise LexiconError(f"gazetteer file is empty: {path}")
    return Gazetteer(entries=entries, source_name=source_name or path.name, language=language)


def load_negation_lexicon(path: Path, language: Language) -> NegationLexicon:
    path = Path(path)
    if not path.exists():
        raise LexiconError(f"negation lexicon not found: {path}")
    triggers = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            phrase = _normalize_phrase(line, language)
            if phrase:
                triggers.add(phrase)
    if not triggers:
        raise LexiconError(f"negation lexicon is empty: {path}")
    return NegationLexicon(triggers=frozenset(triggers), language=language)


def load_lexicons(
    gazetteer_path: Path, negation_path: Path, language: Language
) -> tuple[Gazetteer, NegationLexicon]:
    return (
        load_gazetteer(gazetteer_path, language),
        load_negation_lexicon(negation_path, language),
    )


# Non-word tokens allowed inside a multi-word trigger span (contractions,
# hyphenated cues).
_TRIGGER_TRANSPARENT = {"'", "’", "-"}


def _negated(
    tokens: Sequence[Token],
    mention_start: int,
    lexicon: NegationLexicon,
    window: int,
    language: Language,
) -> bool:
    """True when a trigger ends within `window` word tokens before the
    mention with no clause boundary token in between."""
    boundaries = _CLAUSE_BOUNDARIES[language]
    word_pos = [i for i in range(mention_start) if tokens[i].is_word]
    checked = 0
    prev_raw = mention_start
    for k in range(len(word_pos) - 1, -1, -1):
        if checked >= window:
            return False
        raw_i = word_pos[k]
        for r in range(raw_i + 1, prev_raw):
            if tokens[r].normalized in boundaries:
                return False
        if tokens[raw_i].normalized in boundaries:
            return False
        checked += 1
        for trigger in lexicon.triggers:
            tlen = len(trigger)
            first = k - tlen + 1
            if first < 0:
                continue
            segment = tuple(tokens[word_pos[m]].normalized for m in range(first, k + 1))
            if segment != trigger:
                continue
            span_ok = all(
                tokens[r].is_word or tokens[r].surface in _TRIGGER_TRANSPARENT
                for r in range(word_pos[first], raw_i + 1)
            )
            if span_ok:
                return True
        prev_raw = raw_i
    return False


def _span_key(span: Sequence[Token]) -> tuple[str, ...] | None:
    """Word tokens of a span; hyphens are transparent ('covid-19' matches
    the two-token entry), any other punctuation blocks the match."""
    if not span or not span[-1].is_word:
        return None
    key = []
    for tok in span:
        if tok.is_word:
            key.append(tok.normalized)
        elif tok.surface != "-":
            return None
    return tuple(key)


def _span_surface(span: Sequence[Token]) -> str:
    parts = []
    prev_end = None
    for tok in span:
        if prev_end is not None and tok.char_start > prev_end:
            parts.append(" ")
        parts.append(tok.surface)
        prev_end = tok.char_end
    return "".join(parts)


def tag_entities(
    sentence_tokens: Sequence[Token],
    gazetteer: Gazetteer,
    negation_lexicon: NegationLexicon,
    window: int = DEFAULT_NEGATION_WINDOW,
    sentence_index: int = 0,
) -> list[EntityMention]:
    """Left-to-right longest-match over one sentence's tokens."""
    mentions: list[EntityMention] = []
    n = len(sentence_tokens)
    max_span = 2 * gazetteer.max_len  # room for transparent hyphens
    i = 0
    while i < n:
        if not sentence_tokens[i].is_word:
            i += 1
            continue
        match_end = 0
        match_id = None
        limit = min(n, i + max_span)
        for j in range(limit, i, -1):
            key = _span_key(sentence_tokens[i:j])
            if key is None:
                continue
            cid = gazetteer.entries.get(key)
            if cid is not None:
                match_end = j
                match_id = cid
                break
        if match_id is not None:
            surface = _span_surface(sentence_tokens[i:match_end])
            negated = _negated(
                sentence_tokens, i, negation_lexicon, window, gazetteer.language
            )
            mentions.append(
                EntityMention(
                    canonical_id=match_id,
                    surface=surface,
                    sentence_index=sentence_index,
                    token_start=i,
                    token_end=match_end,
                    negated=negated,
                )
            )
            i = match_end
        else:
            i += 1
    return mentions


def tag_sentences(
    sentences_tokens: Sequence[Sequence[Token]],
    gazetteer: Gazetteer,
    negation_lexicon: NegationLexicon,
    window: int = DEFAULT_NEGATION_WINDOW,
) -> list[EntityMention]:
    mentions: list[EntityMention] = []
    for idx, tokens in enumerate(sentences_tokens):
        mentions.extend(
            tag_entities(tokens, gazetteer, negation_lexicon, window, sentence_index=idx)
        )
    return mentions


def entity_overlap(
    source_mentions: Sequence[EntityMention],
    summary_mentions: Sequence[EntityMention],
) -> OverlapReport:
    """Set comparison keyed by (canonical_id, negated); a flipped negation
    shows up as both lost and hallucinated."""
    source_keys = {m.key for m in source_mentions}
    summary_keys = {m.key for m in summary_mentions}
    return OverlapReport(
        retained=source_keys & summary_keys,
        lost=source_keys - summary_keys,
        hallucinated=summary_keys - source_keys,
    )
