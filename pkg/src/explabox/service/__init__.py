"""HTTP API over a loaded session, consumed by the web UI and other tooling.

All analysis endpoints return canonical JSON bytes from the session's
digestible cache, so identical request bodies (seed included) yield
byte-identical responses. Error bodies are {code, message} objects:
400 invalid params, 404 unknown id/split, 422 task mismatch, 503 backend
down.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..bridge import BackendCrash, BackendTimeout, BridgeError
from ..examine import ExamineError
from ..explain import AttributionError, ComponentError, SummaryError
from ..expose import ExposeError
from ..ingest import IngestError, UnknownSplitError
from ..report import canonical_json, render_html
from ..session import Session, SessionError
from .schemas import (
    DigestibleListResponse,
    DigestibleResponse,
    ExplainRequest,
    InstancesPage,
    MetaResponse,
    PredictRequest,
    PredictResponse,
    SplitsResponse,
    SuiteRunRequest,
)

API_PREFIX = "/api/v1"


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": status, "message": message})


def _canonical_response(data: bytes) -> Response:
    return Response(content=data, media_type="application/json")


TASK_MISMATCH_MARKERS = (
    "requires a classification",
    "requires a regression",
    "require a classification",
    "require a regression",
)


def create_app(session: Session, frontend_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="explabox service", version=session.meta()["artifact_version"])

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, f"invalid parameters: {exc.errors()[:3]}")

    @app.exception_handler(UnknownSplitError)
    async def split_handler(request: Request, exc: UnknownSplitError):
        return _error(404, str(exc))

    @app.exception_handler(BackendCrash)
    async def crash_handler(request: Request, exc: BackendCrash):
        return _error(503, f"model backend down: {exc}")

    @app.exception_handler(BackendTimeout)
    async def timeout_handler(request: Request, exc: BackendTimeout):
        return _error(503, f"model backend timed out: {exc}")

    @app.exception_handler(SessionError)
    async def session_handler(request: Request, exc: SessionError):
        return _error(503, str(exc))

    @app.exception_handler(BridgeError)
    async def bridge_handler(request: Request, exc: BridgeError):
        return _error(502, f"model backend error: {exc}")

    @app.exception_handler(ValueError)
    async def value_handler(request: Request, exc: ValueError):
        message = str(exc)
        if isinstance(exc, (ExamineError, SummaryError, ExposeError)) and any(
            marker in message for marker in TASK_MISMATCH_MARKERS
        ):
            return _error(422, message)
        if isinstance(
            exc,
            (IngestError, ExamineError, ExposeError, SummaryError, AttributionError, ComponentError),
        ):
            if "unknown instance id" in message or "unknown split" in message:
                return _error(404, message)
            return _error(400, message)
        return _error(400, message)

    # -- meta --------------------------------------------------------------

    @app.get(API_PREFIX + "/meta", response_model=MetaResponse)
    def meta() -> Response:
        return _canonical_response(canonical_json(session.meta()))

    @app.get(API_PREFIX + "/splits", response_model=SplitsResponse)
    def splits() -> Response:
        return _canonical_response(
            canonical_json({"splits": session.meta()["splits"]})
        )

    @app.get(API_PREFIX + "/instances", response_model=InstancesPage)
    def instances(split: str, offset: int = 0, limit: int = 50) -> Response:
        if offset < 0 or limit < 1:
            raise IngestError("offset must be >= 0 and limit >= 1")
        all_instances = session.dataset.split_instances(split)
        page = all_instances[offset : offset + limit]
        predicted: list[str | float | None] = [None] * len(page)
        if session.handle is not None and page:
            if session.dataset.task == "classification":
                predicted = list(session.handle.argmax_labels([i.text for i in page]))
            else:
                predicted = [float(s) for s in session.handle.predict_scores([i.text for i in page])]
        rows = []
        for instance, pred in zip(page, predicted):
            correct = None
            if instance.gold is not None and pred is not None:
                correct = (
                    str(instance.gold) == pred
                    if session.dataset.task == "classification"
                    else None
                )
            rows.append(
                {
                    "id": instance.id,
                    "text": instance.text,
                    "gold": instance.gold,
                    "predicted": pred,
                    "correct": correct,
                }
            )
        body = {
            "split": split,
            "total": len(all_instances),
            "offset": offset,
            "limit": limit,
            "instances": rows,
        }
        return _canonical_response(canonical_json(body))

    # -- analyses ------------------------------------------------------------

    @app.get(API_PREFIX + "/explore/stats", response_model=DigestibleResponse)
    def explore_stats(split: str, k_top: int = 10) -> Response:
        data = session.cached_digestible(
            "explore/stats",
            {"split": split, "k_top": k_top},
            None,
            lambda: session.stats_digestible(split, k_top),
        )
        return _canonical_response(data)

    @app.get(API_PREFIX + "/examine/metrics", response_model=DigestibleResponse)
    def examine_metrics(split: str) -> Response:
        data = session.cached_digestible(
            "examine/metrics", {"split": split}, None, lambda: session.metrics_digestible(split)
        )
        return _canonical_response(data)

    @app.get(API_PREFIX + "/examine/drilldown")
    def examine_drilldown(split: str, gold: str, pred: str) -> Response:
        return _canonical_response(canonical_json(session.drilldown_ids(split, gold, pred)))

    @app.post(API_PREFIX + "/predict", response_model=PredictResponse)
    def predict(request: PredictRequest) -> Response:
        handle = session.require_handle()
        batch = handle.predict(request.texts)
        body = {
            "texts": list(batch.texts),
            "outputs": [list(o) if isinstance(o, tuple) else o for o in batch.outputs],
            "labels": list(handle.labels),
        }
        return _canonical_response(canonical_json(body))

    @app.post(API_PREFIX + "/explain", response_model=DigestibleResponse)
    def explain(request: ExplainRequest) -> Response:
        params = {
            "method": request.method,
            "instance_id": request.instance_id,
            "text": request.text,
            "target_label": request.target_label,
            "params": request.params,
        }
        data = session.cached_digestible(
            "explain",
            params,
            request.seed,
            lambda: session.explain_digestible(
                request.method,
                instance_id=request.instance_id,
                text=request.text,
                target_label=request.target_label,
                params=request.params,
                seed=request.seed,
            ),
        )
        return _canonical_response(data)

    @app.get(API_PREFIX + "/global/{kind}", response_model=DigestibleResponse)
    def global_summary(kind: str, split: str, k: int = 3, m_c: int = 2) -> Response:
        options = {"k": k, "m_c": m_c} if kind in ("prototypes", "criticisms") else (
            {"k": k} if kind == "token-frequency" else {}
        )
        data = session.cached_digestible(
            "global",
            {"kind": kind, "split": split, **options},
            session.seed,
            lambda: session.global_digestible(kind, split, **options),
        )
        return _canonical_response(data)

    @app.post(API_PREFIX + "/expose/run", response_model=DigestibleListResponse)
    def expose_run(request: SuiteRunRequest) -> Response:
        data = session.cached_digestible(
            "expose/run",
            {"suite": request.suite},
            request.seed,
            lambda: _ListWrapper(
                [d.to_dict() for d in session.suite_digestibles(request.suite, request.seed)]
            ),
        )
        return _canonical_response(data)

    @app.get(API_PREFIX + "/expose/fairness", response_model=DigestibleResponse)
    def expose_fairness(
        split: str, attribute: str, positive_label: str | None = None, loss: str = "mae"
    ) -> Response:
        data = session.cached_digestible(
            "expose/fairness",
            {"split": split, "attribute": attribute, "positive_label": positive_label, "loss": loss},
            None,
            lambda: session.fairness_digestible(split, attribute, positive_label, loss),
        )
        return _canonical_response(data)

    @app.get(API_PREFIX + "/report")
    def report(format: str = "json") -> Response:
        data = session.cached_digestible(
            "report", {}, session.seed, lambda: session.full_report()
        )
        if format == "html":
            return Response(content=render_html(json.loads(data)), media_type="text/html")
        return _canonical_response(data)

    @app.get(API_PREFIX + "/health")
    def health() -> Response:
        handle = session.handle
        body = handle.health() if handle is not None else {"alive": False, "kind": None, "cache_size": 0}
        return _canonical_response(canonical_json(body))

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app


class _ListWrapper:
    """Adapts a list of digestible dicts to the cached_digestible protocol."""

    def __init__(self, items: list[dict]):
        self._items = items

    def to_dict(self) -> dict:
        return {"digestibles": self._items}
