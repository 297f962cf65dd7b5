"""Service settings resolved from environment variables.

Every checkpoint is configurable; the defaults below are documented,
widely available models.  The ``lexical`` backend needs no checkpoints at
all and is the default so the service runs on machines with no model
cache and no network.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional

BACKEND_ENV = "FAITHSUM_SIDECAR_BACKEND"
NLI_EN_ENV = "FAITHSUM_SIDECAR_NLI_EN"
NLI_MULTI_ENV = "FAITHSUM_SIDECAR_NLI_MULTI"
ENCODER_EN_ENV = "FAITHSUM_SIDECAR_ENCODER_EN"
ENCODER_MULTI_ENV = "FAITHSUM_SIDECAR_ENCODER_MULTI"

BACKEND_LEXICAL = "lexical"
BACKEND_TRANSFORMER = "transformer"
BACKENDS = (BACKEND_LEXICAL, BACKEND_TRANSFORMER)

DEFAULT_NLI_EN = "roberta-large-mnli"
DEFAULT_NLI_MULTI = "joeddav/xlm-roberta-large-xnli"
DEFAULT_ENCODER_EN = "roberta-large"
DEFAULT_ENCODER_MULTI = "bert-base-multilingual-cased"

DEFAULT_PORT = 8808

# Request limits enforced by the app layer.
MAX_PAIRS = 256
MAX_TEXT_CHARS = 2000


@dataclass(frozen=True)
class Settings:
    """Backend choice and checkpoint identifiers for one service process."""

    backend: str = BACKEND_LEXICAL
    nli_en: str = DEFAULT_NLI_EN
    nli_multi: str = DEFAULT_NLI_MULTI
    encoder_en: str = DEFAULT_ENCODER_EN
    encoder_multi: str = DEFAULT_ENCODER_MULTI

    def __post_init__(self) -> None:
        if self.backend not in BACKENDS:
            raise ValueError(
                f"backend must be one of {BACKENDS}, got {self.backend!r}"
            )

    @classmethod
    def from_env(cls, env: Optional[Mapping[str, str]] = None) -> "Settings":
        env = os.environ if env is None else env
        return cls(
            backend=env.get(BACKEND_ENV, BACKEND_LEXICAL),
            nli_en=env.get(NLI_EN_ENV, DEFAULT_NLI_EN),
            nli_multi=env.get(NLI_MULTI_ENV, DEFAULT_NLI_MULTI),
            encoder_en=env.get(ENCODER_EN_ENV, DEFAULT_ENCODER_EN),
            encoder_multi=env.get(ENCODER_MULTI_ENV, DEFAULT_ENCODER_MULTI),
        )
