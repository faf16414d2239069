"""FastAPI application implementing the /v1 wire protocol.

POST /v1/classify  {"pairs": [{"id", "claim", "piece"}]}
                   -> {"results": [{"id", "prob_label1"}]}, request order
GET  /v1/health    -> {"status": "ok", "model": ..., "max_tokens": ...}

Malformed bodies answer 400, oversize batches 413, model failures 500,
always with a JSON error body.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import ServingConfig
from .model import ClaimTooLongError, load_model


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def validate_pairs(body) -> list[dict] | str:
    """The request's pair list, or an error message."""
    if not isinstance(body, dict) or "pairs" not in body:
        return "body must be a JSON object with a 'pairs' list"
    pairs = body["pairs"]
    if not isinstance(pairs, list) or not pairs:
        return "'pairs' must be a non-empty list"
    for i, pair in enumerate(pairs):
        if not isinstance(pair, dict):
            return f"pairs[{i}] is not an object"
        for field in ("id", "claim", "piece"):
            if field not in pair or not isinstance(pair[field], str):
                return f"pairs[{i}] needs string field '{field}'"
    return pairs


def create_app(config: ServingConfig, model=None) -> FastAPI:
    app = FastAPI(title="noveltysearch sidecar", docs_url=None)
    app.state.config = config
    app.state.model = model if model is not None else load_model(config)

    @app.get("/v1/health")
    def health():
        return {
            "status": "ok",
            "model": app.state.model.name,
            "max_tokens": config.max_tokens,
        }

    @app.post("/v1/classify")
    async def classify(request: Request):
        raw = await request.body()
        try:
            body = json.loads(raw)
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            return _error(400, f"malformed JSON body: {exc}")
        pairs = validate_pairs(body)
        if isinstance(pairs, str):
            return _error(400, pairs)
        if len(pairs) > config.max_request_pairs:
            return _error(413, f"batch of {len(pairs)} pairs exceeds the "
                               f"limit of {config.max_request_pairs}")
        claims = [p["claim"] for p in pairs]
        pieces = [p["piece"] for p in pairs]
        try:
            probs = app.state.model.classify(claims, pieces)
        except ClaimTooLongError as exc:
            return _error(400, str(exc))
        except Exception as exc:
            return _error(500, f"model failure: {exc}")
        results = [{"id": pair["id"], "prob_label1": float(prob)}
                   for pair, prob in zip(pairs, probs)]
        return {"results": results}

    return app
