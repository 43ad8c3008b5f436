"""HTTP front-end for the query engine.

Endpoints:

* ``GET /evaluate?expr=...&count=10&offset=0&attributes=Id,Ti``
* ``GET /calchistogram?expr=...&count=10&offset=0&attributes=Y``
* ``GET /health``
* ``POST /reload`` with body ``{"path": "...", "mode": "strict"}``

Success and error bodies are produced by the shared wire encoders, so the
service emits byte-for-byte the same JSON as the CLI. Malformed requests
come back as 400 with an error envelope (a missing ``expr`` counts as a
syntax error at position 0), histogram requests over the entity cap as
413, and every query endpoint as 503 until a snapshot is loaded; /health
mirrors that 503 so probes see readiness truthfully.

Extended attributes in query position are a deployment decision, not a
request option: the flag lives in :class:`ServiceConfig`, and requests
carry no parameter for it.

The graph is swapped atomically on reload; readers always see either the
old snapshot or the new one, never a half-loaded state.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, Request, Response

from .errors import AkError, CapExceeded, DataError, QueryError, QuerySyntaxError
from .graph import AcademicGraph
from .histogram import DEFAULT_CAP, calc_histogram
from .ingest import load_snapshot
from .query import evaluate, parse
from .wire import (
    dumps,
    error_payload,
    evaluate_payload,
    histogram_payload,
    load_report_payload,
)

log = logging.getLogger(__name__)

DEFAULT_PORT = 8080
DEFAULT_COUNT = 10
MAX_COUNT = 1000

_EVALUATE_PARAMS = frozenset({"expr", "count", "offset", "attributes"})
_HISTOGRAM_PARAMS = frozenset({"expr", "count", "offset", "attributes"})


@dataclass(frozen=True)
class ServiceConfig:
    """Everything the service needs to come up."""

    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    snapshot_path: Optional[Union[str, Path]] = None
    mode: str = "strict"
    cap: int = DEFAULT_CAP
    default_count: int = DEFAULT_COUNT
    max_count: int = MAX_COUNT
    extended_query: bool = False


class _BadRequest(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class _ServiceUnavailable(Exception):
    code = "NoSnapshot"

    def __init__(self):
        super().__init__("no snapshot is loaded")


def _json(payload: dict, status: int = 200) -> Response:
    return Response(content=dumps(payload), status_code=status,
                    media_type="application/json")


def _check_params(request: Request, allowed: frozenset) -> None:
    unknown = set(request.query_params) - allowed
    if unknown:
        raise _BadRequest("UnknownParameter",
                          f"unknown query parameter(s): {', '.join(sorted(unknown))}")
    if "expr" not in request.query_params:
        raise QuerySyntaxError(0, ("expr",), "the 'expr' parameter is required")


def _int_param(request: Request, name: str, default: int, minimum: int,
               maximum: Optional[int] = None) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise _BadRequest("InvalidParameter", f"{name} must be an integer") from None
    if value < minimum:
        raise _BadRequest("InvalidParameter", f"{name} must be at least {minimum}")
    if maximum is not None and value > maximum:
        raise _BadRequest("InvalidParameter", f"{name} must be at most {maximum}")
    return value


def _attributes_param(request: Request, default: str = "Id,Ti") -> list[str]:
    raw = request.query_params.get("attributes") or default
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise _BadRequest("InvalidParameter", "attributes must name at least one attribute")
    return parts


def create_app(
    snapshot_path: Optional[Union[str, Path]] = None,
    mode: str = "strict",
    cap: int = DEFAULT_CAP,
    default_count: int = DEFAULT_COUNT,
    max_count: int = MAX_COUNT,
    extended_query: bool = False,
) -> FastAPI:
    """Build the service, optionally preloading a snapshot."""
    app = FastAPI(openapi_url=None, docs_url=None, redoc_url=None)
    app.state.graph = None
    app.state.report = None
    app.state.cap = cap
    app.state.lock = threading.Lock()

    if snapshot_path is not None:
        graph, report = load_snapshot(snapshot_path, mode)  # fail fast at startup
        app.state.graph = graph
        app.state.report = report
        log.info("loaded snapshot %s: %r", snapshot_path, graph)

    def current_graph() -> AcademicGraph:
        graph = app.state.graph
        if graph is None:
            raise _ServiceUnavailable()
        return graph

    @app.get("/evaluate")
    def http_evaluate(request: Request) -> Response:
        try:
            _check_params(request, _EVALUATE_PARAMS)
            count = _int_param(request, "count", default_count, 1, max_count)
            offset = _int_param(request, "offset", 0, 0)
            attributes = _attributes_param(request)
            graph = current_graph()
            expr_text = request.query_params["expr"]
            expr = parse(expr_text, extended_query=extended_query)
            resp = evaluate(graph, expr, count=count, offset=offset,
                            attributes=attributes, expr_text=expr_text)
            return _json(evaluate_payload(resp))
        except Exception as exc:  # noqa: BLE001 - mapped to wire envelopes
            return _error_response(exc)

    @app.get("/calchistogram")
    def http_histogram(request: Request) -> Response:
        try:
            _check_params(request, _HISTOGRAM_PARAMS)
            count = _int_param(request, "count", default_count, 1, max_count)
            offset = _int_param(request, "offset", 0, 0)
            attributes = _attributes_param(request, default="Y")
            graph = current_graph()
            expr_text = request.query_params["expr"]
            expr = parse(expr_text, extended_query=extended_query)
            resp = calc_histogram(graph, expr, attributes, count=count,
                                  offset=offset, expr_text=expr_text,
                                  cap=app.state.cap)
            return _json(histogram_payload(resp))
        except Exception as exc:  # noqa: BLE001
            return _error_response(exc)

    @app.get("/health")
    def http_health() -> Response:
        graph = app.state.graph
        if graph is None:
            return _json({"status": "no-snapshot"}, status=503)
        m = graph.meta
        return _json({"status": "ok", "snapshot": {
            "source": m.source, "papers": m.papers, "journals": m.journals,
            "venues": m.venues, "fields": m.fields,
        }})

    @app.post("/reload")
    async def http_reload(request: Request) -> Response:
        try:
            try:
                body = await request.json()
            except Exception:
                raise _BadRequest("InvalidBody", "request body must be a JSON object") from None
            if not isinstance(body, dict) or not body.get("path"):
                raise _BadRequest("MissingParameter", "the 'path' field is required")
            load_mode = body.get("mode", "strict")
            if load_mode not in ("strict", "lenient"):
                raise _BadRequest("InvalidParameter", "mode must be 'strict' or 'lenient'")
            with app.state.lock:
                graph, report = load_snapshot(body["path"], load_mode)
                app.state.graph = graph
                app.state.report = report
            log.info("reloaded snapshot %s: %r", body["path"], graph)
            return _json({"status": "ok", "snapshot": load_report_payload(report)})
        except Exception as exc:  # noqa: BLE001
            return _error_response(exc)

    return app


def app_for(config: ServiceConfig) -> FastAPI:
    return create_app(
        snapshot_path=config.snapshot_path,
        mode=config.mode,
        cap=config.cap,
        default_count=config.default_count,
        max_count=config.max_count,
        extended_query=config.extended_query,
    )


def _error_response(exc: Exception) -> Response:
    if isinstance(exc, _ServiceUnavailable):
        return _json(error_payload(exc), status=503)
    if isinstance(exc, CapExceeded):
        return _json(error_payload(exc), status=413)
    if isinstance(exc, (_BadRequest, QueryError, DataError, ValueError)):
        return _json(error_payload(exc), status=400)
    log.exception("unhandled error", exc_info=exc)
    if isinstance(exc, AkError):
        return _json(error_payload(exc), status=500)
    return _json({"error": {"code": "InternalError", "message": "internal error"}}, status=500)


def run_server(config: ServiceConfig) -> None:
    """Serve a fresh app for ``config`` with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(app_for(config), host=config.host, port=config.port, log_level="info")
