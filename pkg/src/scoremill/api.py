"""HTTP facade over the engine.

Bodies are parsed from raw bytes (floats mapped to Decimal) so configured
decimals survive the wire; every error body carries a stable machine code.
"""

from __future__ import annotations

import json
import time

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from .errors import EngineError, MalformedRequest, ValidationRejected
from .model import ModelDecodeError, decode_model, encode_model, model_summary
from .numeric import json_loads_exact
from .pipeline import HALT, SKIP_AND_REPORT, decode_score_request, process_line, score_one
from .registry import Registry, RegistrySnapshot, get_model
from .validation import validate_document

NDJSON = "application/x-ndjson"


class _BatchResponse(Response):
    """Scores an NDJSON request body into an NDJSON response body.

    Owns the whole ASGI exchange: the stock streaming response pairs the
    body writer with a disconnect listener that competes for receive() on
    ASGI spec < 2.4 and can swallow request chunks, deadlocking any route
    that streams its own input.
    """

    media_type = NDJSON

    def __init__(self, snapshot: RegistrySnapshot, policy: str):
        self.snapshot = snapshot
        self.policy = policy
        self.status_code = 200
        self.background = None
        self.init_headers(None)

    async def __call__(self, scope, receive, send):
        await send(
            {"type": "http.response.start", "status": self.status_code, "headers": self.raw_headers}
        )
        start = time.perf_counter()
        total = succeeded = failed = 0
        failures: list[dict] = []
        number = 0

        async def handle(raw: bytes) -> bool:
            nonlocal total, succeeded, failed, number
            number += 1
            ok, out, failure = process_line(
                self.snapshot, number, raw.decode("utf-8", errors="replace")
            )
            total += 1
            if ok:
                succeeded += 1
            else:
                failed += 1
                failures.append(failure)
                if self.policy == HALT:
                    return False
            await send(
                {"type": "http.response.body", "body": out.encode("utf-8") + b"\n", "more_body": True}
            )
            return True

        buffer = b""
        more = True
        halted = False
        while more and not halted:
            message = await receive()
            if message["type"] == "http.disconnect":
                return
            buffer += message.get("body", b"")
            more = message.get("more_body", False)
            while b"\n" in buffer:
                line, _, buffer = buffer.partition(b"\n")
                if not await handle(line):
                    halted = True
                    break
        if not halted and buffer.strip():
            await handle(buffer)

        report = {
            "total": total,
            "succeeded": succeeded,
            "failed": failed,
            "failures": failures,
            "elapsed_ms": int((time.perf_counter() - start) * 1000),
        }
        line = json.dumps({"report": report}, separators=(",", ":"), ensure_ascii=False) + "\n"
        await send({"type": "http.response.body", "body": line.encode("utf-8"), "more_body": True})
        await send({"type": "http.response.body", "body": b"", "more_body": False})


def _parse_body(body: bytes):
    if not body:
        raise MalformedRequest("request body is empty")
    try:
        return json_loads_exact(body.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedRequest(f"invalid JSON: {exc}") from None


def create_app(registry: Registry, console_origin: str | None = None) -> FastAPI:
    app = FastAPI(title="scoremill", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.registry = registry

    if console_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[console_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(EngineError)
    async def engine_error(_request, exc: EngineError):
        return JSONResponse(status_code=exc.http_status, content=exc.to_doc())

    @app.exception_handler(RequestValidationError)
    async def request_validation(_request, exc):
        return JSONResponse(
            status_code=400, content={"code": "malformed_request", "message": str(exc)}
        )

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_request, exc: StarletteHTTPException):
        return JSONResponse(
            status_code=exc.status_code,
            content={"code": "malformed_request", "message": str(exc.detail)},
        )

    @app.exception_handler(Exception)
    async def unexpected(_request, _exc):
        return JSONResponse(
            status_code=500, content={"code": "internal", "message": "internal error"}
        )

    @app.get("/healthz")
    async def healthz():
        return {"snapshot_version": registry.snapshot().snapshot_version}

    @app.post("/v1/score")
    async def score(request: Request):
        doc = _parse_body(await request.body())
        score_request = decode_score_request(doc)
        result = score_one(registry.snapshot(), score_request)
        return JSONResponse(content=result.to_doc())

    @app.post("/v1/score/batch")
    async def score_batch_route(request: Request):
        content_type = request.headers.get("content-type", "")
        if NDJSON not in content_type:
            raise MalformedRequest(f"batch body must be {NDJSON}")
        policy = request.query_params.get("on_error", SKIP_AND_REPORT)
        if policy == "skip":
            policy = SKIP_AND_REPORT
        if policy not in (HALT, SKIP_AND_REPORT):
            raise MalformedRequest(f"unknown error policy {policy!r}")
        # pin one snapshot for the whole batch before touching the stream
        return _BatchResponse(registry.snapshot(), policy)

    @app.get("/v1/models")
    async def list_models():
        snapshot = registry.snapshot()
        summaries = [model_summary(snapshot.models[mid]) for mid in sorted(snapshot.models)]
        return JSONResponse(content={"models": summaries, "snapshot_version": snapshot.snapshot_version})

    @app.get("/v1/models/{model_id}")
    async def get_model_route(model_id: int):
        model = get_model(registry.snapshot(), model_id)
        return JSONResponse(content=encode_model(model))

    @app.put("/v1/models/{model_id}")
    async def put_model(model_id: int, request: Request):
        doc = _parse_body(await request.body())
        if not isinstance(doc, dict):
            raise MalformedRequest("model document must be a JSON object")
        doc = dict(doc)
        base_version = doc.pop("base_version", None)
        if base_version is not None and (isinstance(base_version, bool) or not isinstance(base_version, int)):
            raise MalformedRequest("base_version must be an integer when present")
        if doc.get("model_id") != model_id:
            return JSONResponse(
                status_code=409,
                content={
                    "code": "validation_rejected",
                    "message": f"body model_id {doc.get('model_id')!r} does not match path id {model_id}",
                    "details": {
                        "findings": [
                            {
                                "severity": "error",
                                "code": "model_id_mismatch",
                                "message": f"path says {model_id}, body says {doc.get('model_id')!r}",
                                "location": "model_id",
                            }
                        ]
                    },
                },
            )
        findings = validate_document(doc)
        errors = [f for f in findings if f.severity == "error"]
        if errors:
            raise ValidationRejected([f.to_doc() for f in errors])
        try:
            model = decode_model(doc)
        except ModelDecodeError as exc:
            raise MalformedRequest(str(exc)) from None
        stored = registry.upsert(model, base_version)
        return JSONResponse(
            content={
                "model_id": stored.model_id,
                "version": stored.version,
                "snapshot_version": registry.snapshot().snapshot_version,
            }
        )

    @app.delete("/v1/models/{model_id}")
    async def delete_model_route(model_id: int):
        registry.delete(model_id)
        return Response(status_code=204)

    @app.post("/v1/models/validate")
    async def validate_route(request: Request):
        doc = _parse_body(await request.body())
        findings = validate_document(doc)
        return JSONResponse(content={"findings": [f.to_doc() for f in findings]})

    return app
