"""Read-only HTTP API over an :class:`~newsprior.engine.Engine`.

Bodies are canonical JSON, the same bytes the CLI prints. Every response
carries ``X-Engine-Version`` and ``X-Config-Hash``.
"""

from __future__ import annotations

import json
import logging
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import Response

from . import canonical
from .engine import Engine
from .errors import DataError, IngestError, MissingProfileError
from .ingest import ArticleRecord

log = logging.getLogger(__name__)

MEDIA_TYPE = "application/json"


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="newsprior", version=engine.version_info["engine_version"])
    headers = {"X-Engine-Version": engine.version_info["engine_version"],
               "X-Config-Hash": engine.version_info["config_hash"]}

    def reply(obj, status: int = 200) -> Response:
        body = obj if isinstance(obj, bytes) else canonical.dump_bytes(obj)
        return Response(body, status_code=status, media_type=MEDIA_TYPE, headers=headers)

    def error(status: int, message: str, **extra) -> Response:
        return reply({"error": message, **extra}, status)

    async def json_body(request: Request):
        raw = await request.body()
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise IngestError(f"malformed JSON body: {exc}") from None

    @app.exception_handler(Exception)
    async def internal(request: Request, exc: Exception):
        incident = uuid.uuid4().hex
        log.exception("incident %s on %s %s", incident, request.method, request.url.path)
        return error(500, "internal error", incident=incident)

    @app.get("/v1/health")
    def health():
        return reply(engine.health())

    @app.get("/v1/profile/{domain}")
    def profile(domain: str):
        p = engine.store.get_profile(domain)
        if p is None:
            return error(404, f"unknown domain {domain!r}")
        return reply(p.canonical().encode())

    @app.post("/v1/score/article")
    async def score_article(request: Request):
        try:
            body = await json_body(request)
            if isinstance(body, dict) and "article" in body and len(body) == 1:
                body = body["article"]
            article = ArticleRecord.from_dict(body)
        except IngestError as exc:
            return error(400, str(exc), field=exc.field)
        try:
            return reply(engine.score_article(article))
        except MissingProfileError as exc:
            return error(404, str(exc))

    @app.post("/v1/score/claim")
    async def score_claim(request: Request):
        try:
            body = await json_body(request)
        except IngestError as exc:
            return error(400, str(exc), field=None)
        if not isinstance(body, dict) or set(body) != {"claim"}:
            return error(400, "body must be an object with exactly one field 'claim'",
                         field="claim")
        claim = body["claim"]
        if not isinstance(claim, str) or not claim.strip():
            return error(400, "claim must be a non-empty string", field="claim")
        try:
            verdict = engine.score_claim(claim)
        except MissingProfileError as exc:
            return error(404, str(exc))
        except DataError as exc:
            return error(400, str(exc), field="claim")
        return reply(verdict.canonical().encode())

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(engine), host=host, port=port)
