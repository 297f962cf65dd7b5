"""Clients for the scoring sidecar's wire protocol, plus a deterministic
in-process stub and an on-disk response cache.

A scorer client exposes:
  nli(pairs)                 -> list of (entail, contradict, neutral)
  bertscore(cand, ref, lang) -> dict with precision/recall/f1
  health()                   -> dict
  model_id                   -> str used for cache keying
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import tempfile
import unicodedata
import zlib
from pathlib import Path
from typing import Optional, Sequence

import requests

from .errors import ScorerError, ScorerProtocolError

NLI_BATCH_LIMIT = 256

# \w alone excludes combining marks and would split Bangla words at
# vowel signs; widening with the Bengali block keeps them whole.
_WORD_RE = re.compile(r"[\wঀ-৿]+", re.UNICODE)
_NEGATION_CUES = {
    unicodedata.normalize("NFC", cue)
    for cue in (
        "no", "not", "never", "without", "denies", "denied", "cannot", "none",
        "না", "নেই", "নয়", "ছাড়া", "বিনা",
    )
}


def _softmax3(a: float, b: float, c: float) -> tuple[float, float, float]:
    m = max(a, b, c)
    ea, eb, ec = math.exp(a - m), math.exp(b - m), math.exp(c - m)
    z = ea + eb + ec
    return ea / z, eb / z, ec / z


def _words(text: str) -> list[str]:
    text = unicodedata.normalize("NFC", text)
    return [w.casefold() for w in _WORD_RE.findall(text)]


class StubScorerClient:
    """Deterministic lexical scorer used when no sidecar is available.

    NLI probabilities come from hypothesis-token coverage and negation-cue
    mismatch; BERTScore-style F1 from greedy character-trigram matching.
    Fully deterministic, so pipeline runs are bytewise reproducible.
    """

    model_id = "stub-lexical-v1"

    def nli(self, pairs: Sequence[tuple[str, str]]) -> list[tuple[float, float, float]]:
        out = []
        for premise, hypothesis in pairs:
            p_words = set(_words(premise))
            h_words = _words(hypothesis)
            cov = (
                sum(1 for w in h_words if w in p_words) / len(h_words)
                if h_words
                else 0.0
            )
            flip = 1.0 if (bool(p_words & _NEGATION_CUES) != bool(set(h_words) & _NEGATION_CUES)) else 0.0
            entail = 4.0 * cov - 5.0 * flip - 1.0
            contradict = 5.0 * flip + (1.0 - cov) - 2.0
            out.append(_softmax3(entail, contradict, 0.0))
        return out

    @staticmethod
    def _token_vec(token: str) -> set[int]:
        padded = f"^{token}$"
        grams = {padded[i : i + 3] for i in range(max(len(padded) - 2, 1))}
        return {zlib.crc32(g.encode("utf-8")) for g in grams}

    @classmethod
    def _sim(cls, a: str, b: str) -> float:
        if a == b:
            return 1.0
        va, vb = cls._token_vec(a), cls._token_vec(b)
        union = len(va | vb)
        return len(va & vb) / union if union else 0.0

    def bertscore(self, candidate: str, reference: str, lang: str = "en") -> dict:
        cand = _words(candidate)
        ref = _words(reference)
        if not cand or not ref:
            return {"precision": 0.0, "recall": 0.0, "f1": 0.0, "model_id": self.model_id}
        precision = sum(max(self._sim(c, r) for r in ref) for c in cand) / len(cand)
        recall = sum(max(self._sim(r, c) for c in cand) for r in ref) / len(ref)
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        return {"precision": precision, "recall": recall, "f1": f1, "model_id": self.model_id}

    def health(self) -> dict:
        return {"status": "ok", "models": [self.model_id], "ready": True}


class HttpScorerClient:
    """Client for the scorer sidecar's HTTP endpoints."""

    def __init__(self, base_url: str, timeout: float = 60.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = session or requests.Session()
        self._model_id: Optional[str] = None

    @property
    def model_id(self) -> str:
        if self._model_id is None:
            try:
                models = self.health().get("models", [])
                self._model_id = "+".join(models) if models else "unknown"
            except ScorerError:
                self._model_id = "unknown"
        return self._model_id

    def _post(self, route: str, payload: dict) -> dict:
        url = f"{self.base_url}{route}"
        try:
            response = self.session.post(url, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerError(f"scorer unreachable at {url}: {exc}") from exc
        if response.status_code != 200:
            raise ScorerError(
                f"scorer returned HTTP {response.status_code} for {route}",
                status=response.status_code,
                body=response.text,
            )
        try:
            return response.json()
        except ValueError as exc:
            raise ScorerProtocolError(f"non-JSON scorer response from {route}") from exc

    def nli(self, pairs: Sequence[tuple[str, str]]) -> list[tuple[float, float, float]]:
        scores: list[tuple[float, float, float]] = []
        for start in range(0, len(pairs), NLI_BATCH_LIMIT):
            batch = pairs[start : start + NLI_BATCH_LIMIT]
            payload = {
                "pairs": [{"premise": p, "hypothesis": h} for p, h in batch]
            }
            data = self._post("/v1/nli", payload)
            got = data.get("scores")
            if not isinstance(got, list) or len(got) != len(batch):
                raise ScorerProtocolError(
                    f"scorer returned {len(got) if isinstance(got, list) else 'no'} "
                    f"scores for {len(batch)} pairs"
                )
            for cell in got:
                scores.append(
                    (float(cell["entail"]), float(cell["contradict"]), float(cell["neutral"]))
                )
        return scores

    def bertscore(self, candidate: str, reference: str, lang: str = "en") -> dict:
        return self._post(
            "/v1/bertscore",
            {"candidate": candidate, "reference": reference, "lang": lang},
        )

    def health(self) -> dict:
        url = f"{self.base_url}/v1/health"
        try:
            response = self.session.get(url, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerError(f"scorer unreachable at {url}: {exc}") from exc
        if response.status_code != 200:
            raise ScorerError(
                "scorer health check failed",
                status=response.status_code,
                body=response.text,
            )
        return response.json()


class CachedScorerClient:
    """Content-addressed on-disk cache around another scorer client.

    Keys combine the operation, the inner client's model id, and the
    request payload; writes are atomic so concurrent workers are safe.
    """

    def __init__(self, inner, cache_dir: Path):
        self.inner = inner
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    @property
    def model_id(self) -> str:
        return self.inner.model_id

    def _key_path(self, op: str, payload) -> Path:
        blob = json.dumps(
            {"op": op, "model": self.inner.model_id, "payload": payload},
            sort_keys=True,
            ensure_ascii=False,
        )
        digest = hashlib.sha256(blob.encode("utf-8")).hexdigest()
        return self.cache_dir / digest[:2] / f"{digest}.json"

    def _load(self, path: Path):
        if path.exists():
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        return None

    def _store(self, path: Path, value) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(value, fh, ensure_ascii=False)
        os.replace(tmp, path)

    def nli(self, pairs: Sequence[tuple[str, str]]) -> list[tuple[float, float, float]]:
        path = self._key_path("nli", [[p, h] for p, h in pairs])
        cached = self._load(path)
        if cached is not None:
            return [tuple(cell) for cell in cached]
        scores = self.inner.nli(pairs)
        self._store(path, [list(cell) for cell in scores])
        return scores

    def bertscore(self, candidate: str, reference: str, lang: str = "en") -> dict:
        path = self._key_path("bertscore", [candidate, reference, lang])
        cached = self._load(path)
        if cached is not None:
            return cached
        result = self.inner.bertscore(candidate, reference, lang)
        self._store(path, result)
        return result

    def health(self) -> dict:
        return self.inner.health()
