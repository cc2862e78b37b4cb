"""HTTP service exposing ask, proof retrieval and belief management.

The service is stateless apart from the proof store (append-only) and the
memory store; restarting it and replaying GETs yields identical bodies.
Every proof leaving the service is revalidated with ``rescore_tree`` first.
"""

from __future__ import annotations

import logging
from concurrent.futures import Future, ThreadPoolExecutor, TimeoutError as FutureTimeout
from typing import Literal

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from entail import proofio
from entail.backend import Backend
from entail.core import Context, SearchConfig, Statement, rescore_tree
from entail.errors import (
    BackendUnavailableError,
    ContractError,
    DatasetError,
    DeclarativizationError,
    OpenEndedUnsupportedError,
    QuestionError,
)
from entail.memory import DEFAULT_CONTEXT_CAP, MemoryStore, context_for_question
from entail.pipeline import QuestionRecord, answer, build_hypotheses, resolve_options
from entail.proofio import ProofStore

log = logging.getLogger(__name__)

DEFAULT_REQUEST_TIMEOUT_S = 120.0


class AskBody(BaseModel):
    question: str = Field(min_length=1)
    options: list[str] | None = None
    open_ended: bool = False
    n_candidates: int | None = None
    mode: Literal["direct", "entailer", "combined"] = "entailer"
    use_memory: bool = False
    cfg: dict | None = None
    id: str = "http"


class BeliefBody(BaseModel):
    statement: str = Field(min_length=1)
    asserted_true: bool
    source: Literal["user", "import"] = "user"
    note: str | None = None


def create_app(
    backend: Backend,
    memory_store: MemoryStore,
    proof_store: ProofStore,
    default_cfg: SearchConfig | None = None,
    request_timeout_s: float = DEFAULT_REQUEST_TIMEOUT_S,
    context_cap: int = DEFAULT_CONTEXT_CAP,
) -> FastAPI:
    app = FastAPI(title="entail", docs_url=None, redoc_url=None)
    # the browser frontend is served from its own origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.backend = backend
    app.state.memory = memory_store
    app.state.proofs = proof_store
    app.state.default_cfg = default_cfg or SearchConfig()
    app.state.request_timeout_s = request_timeout_s
    app.state.context_cap = context_cap
    # searches run here so the HTTP layer can give up at the timeout
    app.state.pool = ThreadPoolExecutor(max_workers=8)

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    def error_json(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"detail": message})

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "backend": type(backend).__name__,
            "beliefs": len(memory_store),
            "proofs": len(proof_store),
        }

    @app.post("/ask")
    def ask(body: AskBody):
        try:
            record = QuestionRecord(
                id=body.id,
                question=body.question,
                options=tuple(body.options) if body.options is not None else None,
                open_ended=body.open_ended,
                n_candidates=body.n_candidates,
            )
            cfg = proofio.cfg_from_dict({**proofio.cfg_to_dict(app.state.default_cfg), **(body.cfg or {})})
        except (DatasetError, ContractError, TypeError) as exc:
            return error_json(400, str(exc))

        def run() -> dict:
            context: Context | None = None
            if body.use_memory:
                options = resolve_options(backend, record, cfg)
                hypotheses = build_hypotheses(backend, record.question, options)
                context = context_for_question(
                    memory_store, record.question, hypotheses, cap=app.state.context_cap
                )
            result = answer(backend, record, cfg, body.mode, context)
            for outcome in result.per_option:
                if outcome.proof is not None:
                    rescore_tree(outcome.proof)  # never serve an inconsistent tree
            return proofio.result_to_dict(result)

        future: Future = app.state.pool.submit(run)
        try:
            result_dict = future.result(timeout=app.state.request_timeout_s)
        except FutureTimeout:
            future.cancel()
            return error_json(
                504,
                f"search exceeded {app.state.request_timeout_s:.0f}s; "
                "partial progress was discarded",
            )
        except BackendUnavailableError as exc:
            return error_json(503, str(exc))
        except (DeclarativizationError, QuestionError, OpenEndedUnsupportedError,
                DatasetError, ContractError) as exc:
            return error_json(400, str(exc))

        stored = proof_store.add(record.question, body.mode, proofio.cfg_to_dict(cfg), result_dict)
        return {"proof_id": stored.proof_id, "created_at": stored.created_at, "result": result_dict}

    @app.get("/proofs/{proof_id}")
    def get_proof(proof_id: str):
        record = proof_store.get(proof_id)
        if record is None:
            return error_json(404, f"unknown proof id {proof_id!r}")
        return record.to_json()

    @app.post("/beliefs")
    def add_belief(body: BeliefBody):
        try:
            statement = Statement(body.statement)
        except ContractError as exc:
            return error_json(400, str(exc))
        override = memory_store.add_override(
            statement, body.asserted_true, source=body.source, note=body.note
        )
        return {"key": override.key, "override": override.to_json()}

    @app.get("/beliefs")
    def list_beliefs():
        return {
            "overrides": [
                {"key": o.key, **o.to_json()} for o in memory_store.list_overrides()
            ]
        }

    @app.delete("/beliefs/{key}")
    def delete_belief(key: str):
        if not memory_store.remove(key):
            return error_json(404, f"no override stored for key {key!r}")
        return {"removed": key}

    return app
