"""HTTP layer over the session service.

Thin FastAPI adapter: request bodies are validated against the shipped
versioned schema (schema/session_api_v1.json), then passed to the
SessionService; nothing here computes anything itself.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import jsonschema
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .corpus import parse_conll
from .session import CorpusBundle, SessionError, SessionService, UnknownSession

__all__ = ["load_api_schema", "build_app", "corpus_from_files"]


def load_api_schema() -> dict:
    text = resources.files("chunklab").joinpath("schema/session_api_v1.json").read_text("utf-8")
    return json.loads(text)


def corpus_from_files(name: str, train_path, test_path) -> CorpusBundle:
    train = parse_conll(Path(train_path).read_text("utf-8"))
    test = parse_conll(Path(test_path).read_text("utf-8"))
    return CorpusBundle.from_pairs(name, train, test)


def build_app(service: SessionService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="chunklab session service")
    schema = load_api_schema()

    def validated(kind: str, body: dict) -> dict:
        try:
            jsonschema.validate(body, {**schema["requests"][kind],
                                       "definitions": schema["definitions"]})
        except jsonschema.ValidationError as exc:
            raise HTTPException(status_code=422, detail=exc.message)
        return body

    @app.exception_handler(UnknownSession)
    async def _unknown(request: Request, exc: UnknownSession):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(SessionError)
    async def _bad_request(request: Request, exc: SessionError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "corpora": sorted(service.corpora)}

    @app.get("/schema")
    def api_schema():
        return schema

    @app.post("/sessions")
    async def create_session(request: Request):
        body = validated("create_session", await request.json())
        return service.create_session(body["mode"], body.get("config"))

    @app.get("/sessions/{sid}")
    def describe(sid: str):
        return service.describe(sid)

    @app.post("/sessions/{sid}/feedback")
    async def feedback(sid: str, request: Request):
        body = validated("feedback", await request.json())
        return service.feedback_step(sid, tags=body.get("tags"), stop=body.get("stop", False))

    @app.get("/sessions/{sid}/batch")
    def batch(sid: str):
        return service.next_batch(sid)

    @app.post("/sessions/{sid}/annotations")
    async def annotations(sid: str, request: Request):
        body = validated("annotations", await request.json())
        return service.submit_annotations(sid, body["batch"], body["labelings"])

    @app.post("/sessions/{sid}/rules")
    async def rules(sid: str, request: Request):
        body = validated("rules", await request.json())
        return service.submit_rules(sid, body["text"])

    @app.post("/sessions/{sid}/final")
    async def final(sid: str, request: Request):
        body = validated("final", await request.json())
        return service.final_eval(sid, body["labelings"])

    @app.get("/sessions/{sid}/reference")
    def reference(sid: str):
        return service.reference(sid)

    @app.get("/sessions/{sid}/events")
    def events(sid: str):
        return {"session": sid, "events": service.events(sid)}

    if static_dir is not None:
        # API routes above take precedence; everything else serves the
        # browser workbench build.
        app.mount("/", StaticFiles(directory=Path(static_dir), html=True), name="ui")

    return app
