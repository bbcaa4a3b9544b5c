"""HTTP surface of the engine, used by the playground UI and external
drivers. All bodies are JSON and versioned with "v": 1; engine errors map
to 4xx/5xx responses carrying their machine-readable codes."""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .catalog import ServiceId
from .engine import Engine
from .errors import SayReaError
from .recognition import UiEvent


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="sayrea", version="1")
    app.state.engine = engine
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(SayReaError)
    async def engine_error(request: Request, exc: SayReaError):
        return JSONResponse(status_code=exc.http_status,
                            content={"v": 1, "error": exc.code, "detail": str(exc)})

    @app.exception_handler(IndexError)
    async def index_error(request: Request, exc: IndexError):
        return JSONResponse(status_code=400,
                            content={"v": 1, "error": "INDEX_ERROR", "detail": str(exc)})

    @app.post("/context")
    def post_context(body: dict):
        snapshot = engine.update_context(body["values"], body.get("ts"))
        return {"v": 1, "snapshot": {
            "timestamp": snapshot.timestamp,
            "attributes": [a.to_dict() for a in sorted(snapshot.attributes,
                                                       key=lambda x: x.triple())],
        }}

    @app.post("/events")
    def post_event(body: dict):
        payload = frozenset(body["keywords"]) if body["kind"] == "page" else body["value"]
        event = UiEvent(int(body["ts"]), body["kind"], payload)
        recognitions = engine.ingest_ui_event(event)
        return {"v": 1, "recognitions": [
            {"service": str(r.service), "distance": r.matched_distance,
             "trigger": r.trigger} for r in recognitions
        ]}

    @app.get("/recommendations")
    def get_recommendations(k: Optional[int] = None):
        return {"v": 1, "recommendations": [r.to_dict() for r in engine.recommendations(k)],
                "semantics": {
                    str(r.service): engine.catalog.semantic_of(r.service)
                    for r in engine.recommendations(k)
                }}

    @app.post("/usage")
    def post_usage(body: dict):
        req = engine.inject_usage(ServiceId.parse(body["service"]), body.get("ts"),
                                  semantic=body.get("semantic"))
        return {"v": 1, "request": req.to_dict() if req else None}

    @app.get("/requests")
    def get_requests():
        return {"v": 1, "requests": [
            r.to_dict() for r in engine.pending.values() if r.state == "pending"
        ]}

    @app.post("/requests/{request_id}/reason")
    def post_reason(request_id: str, body: dict):
        rule = engine.submit_reason(request_id, body["text"], body.get("ts"))
        return {"v": 1, "rule": rule.to_dict()}

    @app.post("/requests/{request_id}/confirm")
    def post_confirm(request_id: str, body: dict):
        rule = engine.confirm_predicted(request_id, int(body.get("index", 0)), body.get("ts"))
        return {"v": 1, "rule": rule.to_dict()}

    @app.post("/requests/{request_id}/dismiss")
    def post_dismiss(request_id: str, body: Optional[dict] = None):
        engine.dismiss(request_id, (body or {}).get("ts"))
        return {"v": 1, "ok": True}

    @app.post("/requests/{request_id}/select")
    def post_select(request_id: str, body: dict):
        result = engine.select_attributes(request_id, body["attributes"], body.get("ts"))
        return {"v": 1, **result}

    @app.post("/recommendations/{service:path}/reject")
    def post_reject(service: str, body: Optional[dict] = None):
        req = engine.reject(ServiceId.parse(service), (body or {}).get("ts"))
        return {"v": 1, "request": req.to_dict()}

    @app.get("/rules")
    def get_rules():
        return {"v": 1, "rules": [r.to_dict() for r in engine.store.all_rules()]}

    @app.delete("/rules/{rule_id}")
    def delete_rule(rule_id: str):
        engine.delete_rule(rule_id)
        return {"v": 1, "ok": True}

    @app.get("/metrics")
    def get_metrics(tz_offset_minutes: int = 0):
        return engine.metrics(tz_offset_minutes)

    @app.get("/state")
    def get_state():
        return engine.state_dict()

    @app.get("/registry")
    def get_registry():
        return engine.registry.to_dict()

    @app.get("/catalog")
    def get_catalog():
        return engine.catalog.to_dict()

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8787):
    import uvicorn

    uvicorn.run(create_app(engine), host=host, port=port, log_level="warning")
