"""HTTP service for NLI pair scoring and BERTScore.

Routes:
  POST /v1/nli        {"pairs": [{"premise", "hypothesis"}, ...]}
                      -> {"scores": [{"entail", "contradict", "neutral"}, ...],
                          "model_id"}
  POST /v1/bertscore  {"candidate", "reference", "lang"}
                      -> {"precision", "recall", "f1", "model_id"}
  GET  /v1/health     {"status", "models", "ready"}

The lexical backend loads synchronously at startup; the transformer
backend loads in a background thread so /v1/health answers (ready=false)
while checkpoints come up, and scoring endpoints return 503 until then.
"""

from __future__ import annotations

import logging
import threading
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .backends import build_backend, expected_model_ids
from .config import BACKEND_LEXICAL, MAX_PAIRS, MAX_TEXT_CHARS, Settings

logger = logging.getLogger(__name__)


class NliPairIn(BaseModel):
    premise: str
    hypothesis: str


class NliRequest(BaseModel):
    pairs: list[NliPairIn]


class NliScoreOut(BaseModel):
    entail: float
    contradict: float
    neutral: float


class NliResponse(BaseModel):
    scores: list[NliScoreOut]
    model_id: str


class BertScoreRequest(BaseModel):
    candidate: str
    reference: str
    lang: str = "en"


class BertScoreResponse(BaseModel):
    precision: float
    recall: float
    f1: float
    model_id: str


class HealthResponse(BaseModel):
    status: str
    models: list[str]
    ready: bool


class BackendHolder:
    """Backend instance plus readiness state shared by all requests."""

    def __init__(self, settings: Settings, backend=None):
        self.settings = settings
        self.backend = backend
        self.error: Optional[str] = None

    @property
    def ready(self) -> bool:
        return self.backend is not None

    def load(self) -> None:
        try:
            self.backend = build_backend(self.settings)
        except Exception as exc:
            self.error = str(exc)
            logger.error("backend load failed: %s", exc)


def create_app(settings: Optional[Settings] = None, backend=None) -> FastAPI:
    """Build the service; ``backend`` injects a pre-loaded (or fake)
    backend and skips startup loading."""
    settings = settings or Settings.from_env()
    holder = BackendHolder(settings, backend)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if holder.backend is None:
            if settings.backend == BACKEND_LEXICAL:
                holder.load()
            else:
                threading.Thread(target=holder.load, daemon=True).start()
        yield

    app = FastAPI(title="scorer-sidecar", lifespan=lifespan)
    app.state.holder = holder

    def require_backend():
        if holder.error is not None:
            raise HTTPException(status_code=503, detail=f"backend failed to load: {holder.error}")
        if not holder.ready:
            raise HTTPException(status_code=503, detail="models are still loading")
        return holder.backend

    def check_length(text: str, what: str) -> None:
        if len(text) > MAX_TEXT_CHARS:
            raise HTTPException(
                status_code=400,
                detail=f"{what} exceeds {MAX_TEXT_CHARS} characters",
            )

    @app.post("/v1/nli", response_model=NliResponse)
    def nli(request: NliRequest) -> NliResponse:
        backend = require_backend()
        if not request.pairs:
            raise HTTPException(status_code=400, detail="pairs must be non-empty")
        if len(request.pairs) > MAX_PAIRS:
            raise HTTPException(
                status_code=400,
                detail=f"at most {MAX_PAIRS} pairs per request, got {len(request.pairs)}",
            )
        for index, pair in enumerate(request.pairs):
            check_length(pair.premise, f"pairs[{index}].premise")
            check_length(pair.hypothesis, f"pairs[{index}].hypothesis")
        try:
            scores, model_id = backend.nli(
                [(pair.premise, pair.hypothesis) for pair in request.pairs]
            )
        except Exception as exc:
            logger.exception("nli inference failed")
            raise HTTPException(status_code=500, detail=f"inference failed: {exc}")
        return NliResponse(
            scores=[
                NliScoreOut(entail=e, contradict=c, neutral=n) for e, c, n in scores
            ],
            model_id=model_id,
        )

    @app.post("/v1/bertscore", response_model=BertScoreResponse)
    def bertscore(request: BertScoreRequest) -> BertScoreResponse:
        backend = require_backend()
        if not request.candidate.strip() or not request.reference.strip():
            raise HTTPException(
                status_code=400, detail="candidate and reference must be non-empty"
            )
        check_length(request.candidate, "candidate")
        check_length(request.reference, "reference")
        try:
            precision, recall, f1, model_id = backend.bertscore(
                request.candidate, request.reference, request.lang
            )
        except Exception as exc:
            logger.exception("bertscore inference failed")
            raise HTTPException(status_code=500, detail=f"inference failed: {exc}")
        return BertScoreResponse(
            precision=precision, recall=recall, f1=f1, model_id=model_id
        )

    @app.get("/v1/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        if holder.error is not None:
            status = "error"
        elif holder.ready:
            status = "ok"
        else:
            status = "loading"
        models = (
            holder.backend.model_ids
            if holder.ready
            else expected_model_ids(settings)
        )
        return HealthResponse(status=status, models=models, ready=holder.ready)

    return app
