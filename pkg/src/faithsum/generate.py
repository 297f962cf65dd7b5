"""Prompt construction, candidate generation backends, and fine-tuning
pair export.

Backends implement ``complete(prompt, params, index) -> (text, retries,
latency)``.  Shipped backends: an OpenAI-compatible chat-completions
client and a fully deterministic mock used for tests and desk runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template
from typing import Iterable, Optional, Sequence

import requests

from .corpus import ChqRecord, Language
from .errors import BackendError, GenerationFailed

logger = logging.getLogger(__name__)

BACKEND_MOCK = "deterministic-mock"
BACKEND_OPENAI = "openai-compatible-http"

API_KEY_ENV = "FAITHSUM_API_KEY"

# Evaluation settings: full best-of-n, single candidate (no selection), and
# a prompt carrying the bare question without extracted context.
MODE_BEST_OF_N = "best-of-n"
MODE_SINGLE = "single"
MODE_NO_CONTEXT = "no-context"
GENERATION_MODES = frozenset({MODE_BEST_OF_N, MODE_SINGLE, MODE_NO_CONTEXT})

_CONTEXT_PREFIX = "- "


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.7
    n_candidates: int = 3
    max_output_tokens: int = 64
    seed: int = 0
    backend_id: str = BACKEND_MOCK

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be >= 1")

    def snapshot(self) -> dict:
        return {
            "temperature": self.temperature,
            "max_output_tokens": self.max_output_tokens,
            "seed": self.seed,
            "backend_id": self.backend_id,
        }


@dataclass(frozen=True)
class Prompt:
    system_text: str
    user_text: str
    language: Language
    template_id: str
    context_sentences: tuple[str, ...]


@dataclass(frozen=True)
class Candidate:
    text: str
    index: int
    params: dict
    latency: float
    retries: int = 0


@dataclass
class GenerationResult:
    candidates: list[Candidate]
    failures: list[dict] = field(default_factory=list)


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    language: Language
    system_text: str
    user_template: str


def load_template(
    template_id: str, language: Language, templates_dir: Optional[Path] = None
) -> PromptTemplate:
    """Templates are sectioned text files named '<id>_<en|bn>.txt' with
    [system] and [user] blocks; the user block carries ${question} and
    ${context} placeholders."""
    suffix = "en" if language is Language.ENGLISH else "bn"
    name = f"{template_id}_{suffix}.txt"
    if templates_dir is not None:
        path = Path(templates_dir) / name
        if not path.exists():
            raise BackendError(f"unknown template: {name} (not in {templates_dir})")
        raw = path.read_text(encoding="utf-8")
    else:
        ref = resources.files("faithsum.data") / "templates" / name
        try:
            raw = ref.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise BackendError(f"unknown template: {template_id!r} for {language.value}")
    sections: dict[str, list[str]] = {}
    current = None
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped in ("[system]", "[user]"):
            current = stripped[1:-1]
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    if "system" not in sections or "user" not in sections:
        raise BackendError(f"template {name} must contain [system] and [user] sections")
    return PromptTemplate(
        template_id=template_id,
        language=language,
        system_text="\n".join(sections["system"]).strip(),
        user_template="\n".join(sections["user"]).strip(),
    )


def format_context_block(sentences: Sequence[str]) -> str:
    return "\n".join(_CONTEXT_PREFIX + s for s in sentences)


def extract_context_sentences(user_text: str) -> list[str]:
    """Recover the context block from a filled prompt: the first
    contiguous run of '- ' lines."""
    sentences = []
    in_block = False
    for line in user_text.splitlines():
        if line.startswith(_CONTEXT_PREFIX):
            sentences.append(line[len(_CONTEXT_PREFIX):])
            in_block = True
        elif in_block:
            break
    return sentences


def build_prompt(
    record: ChqRecord,
    context_sentences: Sequence[str],
    template_id: str = "default",
    templates_dir: Optional[Path] = None,
) -> Prompt:
    """Fill the named template; context sentences are inserted verbatim,
    one per '- ' line, and placeholders inside them are never re-expanded."""
    if not context_sentences:
        raise ValueError("context must contain at least one sentence")
    template = load_template(template_id, record.language, templates_dir)
    user_text = Template(template.user_template).substitute(
        question=record.question,
        context=format_context_block(context_sentences),
    )
    return Prompt(
        system_text=template.system_text,
        user_text=user_text,
        language=record.language,
        template_id=template_id,
        context_sentences=tuple(context_sentences),
    )


class MockBackend:
    """Deterministic stand-in for a generation model.

    Output is the prompt's context sentences joined in an order that a
    seeded shuffle perturbs more as temperature grows (zero swaps at
    t <= 0.1 for typical context sizes), truncated to max_output_tokens
    whitespace tokens.  Identical inputs give bitwise-identical output.
    """

    backend_id = BACKEND_MOCK

    def complete(self, prompt: Prompt, params: GenerationParams, index: int):
        digest = hashlib.sha256(
            f"{params.seed}:{index}:{prompt.user_text}".encode("utf-8")
        ).digest()
        rng = random.Random(int.from_bytes(digest[:8], "big"))
        sentences = list(prompt.context_sentences)
        n_swaps = int(params.temperature * len(sentences))
        for _ in range(n_swaps):
            if len(sentences) < 2:
                break
            pos = rng.randrange(len(sentences) - 1)
            sentences[pos], sentences[pos + 1] = sentences[pos + 1], sentences[pos]
        words = " ".join(sentences).split()
        text = " ".join(words[: params.max_output_tokens])
        return text, 0, 0.0


class OpenAiHttpBackend:
    """Chat-completions client for any OpenAI-compatible endpoint."""

    backend_id = BACKEND_OPENAI

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: Optional[str] = None,
        timeout: float = 120.0,
        max_attempts: int = 3,
        backoff: float = 0.5,
        session=None,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.session = session or requests.Session()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def complete(self, prompt: Prompt, params: GenerationParams, index: int):
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        url = f"{self.base_url}/chat/completions"
        last_error: Optional[str] = None
        retries = 0
        started = time.perf_counter()
        for attempt in range(self.max_attempts):
            if attempt > 0:
                retries += 1
                time.sleep(self.backoff * (2 ** (attempt - 1)))
            try:
                response = self.session.post(
                    url, json=payload, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = str(exc)
                continue
            if response.status_code in (429,) or response.status_code >= 500:
                last_error = f"HTTP {response.status_code}: {response.text[:200]}"
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"backend rejected request ({response.status_code}): "
                    f"{response.text[:200]}"
                )
            try:
                text = response.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError) as exc:
                raise BackendError(f"malformed backend response: {exc}") from exc
            return text, retries, time.perf_counter() - started
        raise BackendError(
            f"backend failed after {self.max_attempts} attempts: {last_error}"
        )


def generate_candidates(
    prompt: Prompt, params: GenerationParams, backend
) -> GenerationResult:
    """Sample exactly n_candidates completions, one request each; an
    empty completion is retried once, then recorded as a failure.  All
    candidates failing is a record-level error."""
    candidates: list[Candidate] = []
    failures: list[dict] = []
    for index in range(params.n_candidates):
        try:
            text, retries, latency = backend.complete(prompt, params, index)
            if not text.strip():
                logger.warning("empty generation for candidate %d, retrying once", index)
                text, more_retries, latency = backend.complete(prompt, params, index)
                retries += more_retries
            text = text.strip()
            if not text:
                failures.append(
                    {"index": index, "error": "empty generation after retry", "retries": retries}
                )
                continue
            candidates.append(
                Candidate(
                    text=text,
                    index=index,
                    params=params.snapshot(),
                    latency=latency,
                    retries=retries,
                )
            )
        except BackendError as exc:
            failures.append({"index": index, "error": str(exc), "retries": 0})
    if not candidates:
        raise GenerationFailed(
            f"all {params.n_candidates} candidates failed: "
            + "; ".join(f["error"] for f in failures)
        )
    return GenerationResult(candidates=candidates, failures=failures)


def export_ft_pairs(
    pairs: Iterable[tuple[ChqRecord, Prompt]], output_path: Path
) -> int:
    """Write (prompt, reference summary) record-lines for external
    supervised fine-tuning; records without references are skipped."""
    count = 0
    with open(output_path, "w", encoding="utf-8") as fh:
        for record, prompt in pairs:
            if not record.reference_summary:
                logger.warning("record %s has no reference summary, skipping", record.id)
                continue
            fh.write(
                json.dumps(
                    {
                        "id": record.id,
                        "language": record.language.value,
                        "prompt": prompt.user_text,
                        "completion": record.reference_summary,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
            )
            fh.write("\n")
            count += 1
    return count
