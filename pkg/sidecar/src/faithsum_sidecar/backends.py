"""Backend selection."""

from __future__ import annotations

from .config import BACKEND_LEXICAL, BACKEND_TRANSFORMER, Settings
from .lexical import LexicalBackend


def expected_model_ids(settings: Settings) -> list[str]:
    """Model identifiers the service will expose, known before loading."""
    if settings.backend == BACKEND_LEXICAL:
        return [LexicalBackend.nli_model_id, LexicalBackend.bert_model_id]
    return [
        settings.nli_en,
        settings.nli_multi,
        settings.encoder_en,
        settings.encoder_multi,
    ]


def build_backend(settings: Settings):
    if settings.backend == BACKEND_LEXICAL:
        return LexicalBackend()
    if settings.backend == BACKEND_TRANSFORMER:
        from .transformer import TransformerBackend

        return TransformerBackend(settings)
    raise ValueError(f"unknown backend: {settings.backend!r}")
