"""HTTP scoring service with the moderation queue.

Endpoints (JSON unless noted):

    POST /score                 score one text; enqueue when above threshold
    POST /score/batch           score many texts in one call
    GET  /queue                 flagged items, score-descending, paginated
    GET  /queue/{id}            one item with trigram contributions
    POST /queue/{id}/review     confirm or reject (write-once)
    GET  /export                reviewed items as corpus CSV (text/csv)
    GET  /healthz               liveness and queue counters

When an auth token is configured every endpoint except /healthz requires
the X-Auth-Token header. The model is immutable and shared, so scoring
is safe under concurrency; queue mutations serialize through the queue's
internal lock.
"""

from __future__ import annotations

import threading
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .classifier import LinearModel, Prediction, explain, load_model, predict
from .config import ServiceConfig
from .corpus import normalize
from .moderation import (
    ItemNotFoundError,
    ItemStatus,
    ModerationQueue,
    ReviewConflictError,
)
from .schemas import (
    BatchScoreRequest,
    BatchScoreResponse,
    FeatureContribution,
    HealthResponse,
    QueueItemDetail,
    QueueItemModel,
    QueueListResponse,
    ReviewRequest,
    ScoreRequest,
    ScoreResponse,
)

MAX_TEXT_BYTES = 64 * 1024
TOP_FEATURES = 10


class ScoringEngine:
    """Shared service state: the live model, the queue, and the flag rule."""

    def __init__(
        self,
        model: LinearModel,
        queue: ModerationQueue,
        flag_threshold: float = 0.0,
    ):
        self._model = model
        self.queue = queue
        self.flag_threshold = flag_threshold
        self._model_lock = threading.Lock()

    @property
    def model(self) -> LinearModel:
        return self._model

    def reload_model(self, path: str | Path) -> None:
        """Atomic swap; in-flight requests finish on the old model."""
        fresh = load_model(path)
        with self._model_lock:
            self._model = fresh

    def score(self, text: str) -> ScoreResponse:
        model = self._model
        pred: Prediction = predict(model, text)
        features = [
            FeatureContribution(trigram=g, contribution=c)
            for g, c in explain(model, text, top_k=TOP_FEATURES)
        ]
        flagged = pred.score > self.flag_threshold
        item_id = None
        if flagged:
            item = self.queue.flag(
                text=text,
                score=pred.score,
                label=pred.label,
                normalized_text=normalize(text),
                top_features=tuple((f.trigram, f.contribution) for f in features),
            )
            item_id = item.item_id
        return ScoreResponse(
            label=pred.label.value,
            score=pred.score,
            low_confidence=pred.low_confidence,
            top_features=features,
            flagged=flagged,
            item_id=item_id,
        )


def create_app(
    config: ServiceConfig,
    model: LinearModel | None = None,
    queue: ModerationQueue | None = None,
) -> FastAPI:
    """Build the service; the model must load successfully up front."""
    if model is None:
        model = load_model(config.model_path)
    if queue is None:
        queue = ModerationQueue(config.review_log)
    engine = ScoringEngine(model, queue, flag_threshold=config.flag_threshold)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        queue.close()

    app = FastAPI(title="tripwire", version="0.1.0", lifespan=lifespan)
    app.state.engine = engine
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def check_auth(request: Request) -> None:
        if config.auth_token is None:
            return
        if request.headers.get("x-auth-token") != config.auth_token:
            raise HTTPException(status_code=401, detail="missing or bad auth token")

    def reject_oversized(text: str) -> None:
        if len(text.encode("utf-8")) > MAX_TEXT_BYTES:
            raise HTTPException(
                status_code=413,
                detail=f"text exceeds {MAX_TEXT_BYTES} bytes",
            )

    @app.post("/score", response_model=ScoreResponse)
    def score(body: ScoreRequest, _=Depends(check_auth)):
        reject_oversized(body.text)
        return engine.score(body.text)

    @app.post("/score/batch", response_model=BatchScoreResponse)
    def score_batch(body: BatchScoreRequest, _=Depends(check_auth)):
        for text in body.texts:
            reject_oversized(text)
        return BatchScoreResponse(results=[engine.score(t) for t in body.texts])

    @app.get("/queue", response_model=QueueListResponse)
    def queue_list(
        status: str | None = Query(default=None),
        min_score: float | None = Query(default=None),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
        _=Depends(check_auth),
    ):
        status_filter = None
        if status is not None and status != "":
            try:
                status_filter = ItemStatus(status)
            except ValueError:
                raise HTTPException(
                    status_code=422, detail=f"unknown status {status!r}"
                ) from None
        items = engine.queue.list_items(status=status_filter, min_score=min_score)
        start = (page - 1) * page_size
        page_items = items[start : start + page_size]
        return QueueListResponse(
            items=[QueueItemModel.from_item(i) for i in page_items],
            page=page,
            page_size=page_size,
            total=len(items),
            counts=engine.queue.counts(),
        )

    @app.get("/queue/{item_id}", response_model=QueueItemDetail)
    def queue_item(item_id: str, _=Depends(check_auth)):
        try:
            return QueueItemDetail.from_item(engine.queue.get(item_id))
        except ItemNotFoundError:
            raise HTTPException(
                status_code=404, detail=f"no item {item_id}"
            ) from None

    @app.post("/queue/{item_id}/review", response_model=QueueItemModel)
    def review(item_id: str, body: ReviewRequest, _=Depends(check_auth)):
        try:
            updated = engine.queue.review(item_id, body.decision, body.reviewer)
        except ItemNotFoundError:
            raise HTTPException(
                status_code=404, detail=f"no item {item_id}"
            ) from None
        except ReviewConflictError as err:
            raise HTTPException(status_code=409, detail=str(err)) from None
        return QueueItemModel.from_item(updated)

    @app.get("/export")
    def export(_=Depends(check_auth)):
        return Response(
            content=engine.queue.export_csv(),
            media_type="text/csv",
            headers={
                "Content-Disposition": 'attachment; filename="training-data.csv"'
            },
        )

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(
            status="ok",
            model_features=engine.model.vocabulary.size,
            queue=engine.queue.counts(),
        )

    if config.dashboard_dir and Path(config.dashboard_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount(
            "/dashboard",
            StaticFiles(directory=config.dashboard_dir, html=True),
            name="dashboard",
        )

    return app
