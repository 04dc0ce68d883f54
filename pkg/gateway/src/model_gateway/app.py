"""HTTP service implementing the toolforge wire protocol.

One app serves both modes: stub answers from recorded fixtures, live
forwards to model backends. Requests and responses are validated against
the schema files packaged with toolforge (the same ones its clients use),
and every JSON body is serialized canonically, so a given request always
yields byte-identical stub responses.
"""

from __future__ import annotations

import json

import jsonschema
from fastapi import FastAPI, Request
from fastapi.responses import Response

from toolforge.wire import load_schema

from . import live
from .config import GatewayConfig
from .fixtures import FixtureStore


def _json_response(document: dict, status: int = 200) -> Response:
    body = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return Response(content=body, status_code=status, media_type="application/json")


def _error(status: int, code: str, message: str) -> Response:
    return _json_response({"error": {"code": code, "message": message}}, status=status)


async def _request_payload(request: Request) -> dict | None:
    try:
        data = await request.json()
    except Exception:
        return None
    return data if isinstance(data, dict) else None


def create_app(config: GatewayConfig | None = None) -> FastAPI:
    config = config or GatewayConfig()
    store = FixtureStore(config.resolved_fixture_dir()) if config.mode == "stub" else None
    app = FastAPI(title="model-gateway", docs_url=None, redoc_url=None)

    def respond(endpoint: str, payload: dict | None, live_fn) -> Response:
        if payload is None:
            return _error(400, "schema", "request body must be a JSON object")
        try:
            jsonschema.validate(payload, load_schema(f"{endpoint}_request"))
        except jsonschema.ValidationError as exc:
            return _error(400, "schema", exc.message)

        if store is not None:
            document = store.lookup(endpoint, payload)
            if document is None:
                return _error(404, "fixture_missing", f"no fixture for this {endpoint} request")
        else:
            try:
                document = live_fn(config, payload)
            except live.ModelUnavailable as exc:
                return _error(503, "model_unavailable", str(exc))
            except live.Unnormalizable as exc:
                return _error(422, "unnormalizable", str(exc))

        try:
            jsonschema.validate(document, load_schema(f"{endpoint}_response"))
        except jsonschema.ValidationError as exc:
            # a fixture that breaks its own schema is a server defect, not client error
            if store is not None:
                return _error(500, "fixture_invalid", exc.message)
            return _error(422, "unnormalizable", exc.message)
        return _json_response(document)

    @app.post("/v1/interpret")
    async def interpret(request: Request) -> Response:
        return respond("interpret", await _request_payload(request), live.predict_interpret)

    @app.post("/v1/genmesh")
    async def genmesh(request: Request) -> Response:
        return respond("genmesh", await _request_payload(request), live.predict_genmesh)

    @app.post("/v1/act")
    async def act(request: Request) -> Response:
        return respond("act", await _request_payload(request), live.predict_act)

    @app.get("/v1/health")
    async def health() -> Response:
        return _json_response({"status": "ok", "mode": config.mode})

    return app
