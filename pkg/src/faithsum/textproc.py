"""Language-aware sentence segmentation, tokenization and syllable counts.

Rule-based throughout: deterministic and adequate for short consumer
health questions in English and Bangla.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .corpus import Language

_TERMINAL_EN = ".!?"
_DANDA = "।"
_CLOSERS = "\"')]»”’"
# ZWJ / ZWNJ continue a word run (Bangla conjunct control) but never start one.
_JOINERS = {"‌", "‍"}
_VOWELS = "aeiouy"


@dataclass(frozen=True)
class SentenceSpan:
    index: int
    text: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    char_start: int
    char_end: int
    is_word: bool


def load_word_list(path: Path) -> frozenset[str]:
    """One entry per line, UTF-8, NFC-composed; blank lines and #-comments
    ignored."""
    entries = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = unicodedata.normalize("NFC", line.strip())
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)


@lru_cache(maxsize=1)
def default_abbreviations() -> frozenset[str]:
    with resources.as_file(resources.files("faithsum.data") / "abbreviations_en.txt") as p:
        return frozenset(a.lower() for a in load_word_list(p))


def _protected_dots(text: str, abbreviations: frozenset[str]) -> set[int]:
    """Indices of '.' that belong to an abbreviation or a decimal number."""
    protected: set[int] = set()
    lowered = text.lower()
    for abbr in abbreviations:
        start = 0
        while True:
            pos = lowered.find(abbr, start)
            if pos < 0:
                break
            before_ok = pos == 0 or not (lowered[pos - 1].isalnum())
            after = pos + len(abbr)
            after_ok = after >= len(lowered) or not lowered[after].isalnum()
            if before_ok and after_ok:
                for k, ch in enumerate(abbr):
                    if ch == ".":
                        protected.add(pos + k)
            start = pos + 1
    for i, ch in enumerate(text):
        if ch == "." and 0 < i < len(text) - 1:
            if text[i - 1].isdigit() and text[i + 1].isdigit():
                protected.add(i)
    return protected


def _is_word_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("L", "N", "M")


def segment_sentences(
    text: str,
    language: Language,
    abbreviations: Optional[frozenset[str]] = None,
) -> list[SentenceSpan]:
    """Split on terminal punctuation (. ! ? plus the Bangla danda).

    Dots inside known abbreviations or decimal numbers never split.  Text
    without terminal punctuation yields exactly one span.
    """
    if not text.strip():
        return []
    if abbreviations is None:
        abbreviations = default_abbreviations()

    terminals = _TERMINAL_EN + (_DANDA if language is Language.BANGLA else "")
    protected = _protected_dots(text, abbreviations) if "." in text else set()

    spans: list[SentenceSpan] = []
    n = len(text)
    start = 0
    i = 0

    def emit(seg_start: int, seg_end: int) -> None:
        while seg_start < seg_end and text[seg_start].isspace():
            seg_start += 1
        while seg_end > seg_start and text[seg_end - 1].isspace():
            seg_end -= 1
        if seg_start < seg_end:
            spans.append(
                SentenceSpan(
                    index=len(spans),
                    text=text[seg_start:seg_end],
                    char_start=seg_start,
                    char_end=seg_end,
                )
            )

    while i < n:
        ch = text[i]
        if ch in terminals and not (ch == "." and i in protected):
            j = i + 1
            while j < n and (
                (text[j] in terminals and not (text[j] == "." and j in protected))
                or text[j] in _CLOSERS
            ):
                j += 1
            emit(start, j)
            start = j
            i = j
        else:
            i += 1
    emit(start, n)
    return spans


def tokenize(text: str, language: Language) -> list[Token]:
    """Word tokens are maximal runs of letters/digits/combining marks;
    other non-space characters come out as single-char non-word tokens."""
    tokens: list[Token] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_word_char(ch):
            j = i + 1
            while j < n and (_is_word_char(text[j]) or text[j] in _JOINERS):
                j += 1
            while j > i and text[j - 1] in _JOINERS:
                j -= 1
            surface = text[i:j]
            normalized = surface.lower() if language is Language.ENGLISH else surface
            tokens.append(Token(surface, normalized, i, j, True))
            i = j
        else:
            tokens.append(Token(ch, ch, i, i + 1, False))
            i += 1
    return tokens


def word_tokens(tokens: Sequence[Token]) -> list[Token]:
    return [t for t in tokens if t.is_word]


def normalized_words(tokens: Sequence[Token]) -> list[str]:
    return [t.normalized for t in tokens if t.is_word]


def count_syllables(word: str) -> int:
    """Heuristic English syllable count: vowel groups, silent final 'e'
    dropped unless the word ends in consonant+'le'; minimum 1."""
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
                in_group = True
        else:
            in_group = False
    if groups > 1 and w.endswith("e"):
        keeps_le = (
            len(w) >= 3 and w.endswith("le") and w[-3] not in _VOWELS
        )
        if not keeps_le:
            groups -= 1
    return max(groups, 1)
