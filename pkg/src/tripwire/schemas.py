"""Pydantic request/response models for the scoring service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from .moderation import FlaggedItem


class ScoreRequest(BaseModel):
    text: str


class BatchScoreRequest(BaseModel):
    texts: list[str]


class FeatureContribution(BaseModel):
    trigram: str
    contribution: float


class ScoreResponse(BaseModel):
    label: str
    score: float
    low_confidence: bool
    top_features: list[FeatureContribution]
    flagged: bool
    item_id: str | None = None


class BatchScoreResponse(BaseModel):
    results: list[ScoreResponse]


class QueueItemModel(BaseModel):
    item_id: str
    text: str
    score: float
    label: str
    received_at: str
    status: str
    reviewer: str | None = None
    reviewed_at: str | None = None

    @classmethod
    def from_item(cls, item: FlaggedItem) -> "QueueItemModel":
        return cls(
            item_id=item.item_id,
            text=item.text,
            score=item.score,
            label=item.label.value,
            received_at=item.received_at,
            status=item.status.value,
            reviewer=item.reviewer,
            reviewed_at=item.reviewed_at,
        )


class QueueItemDetail(QueueItemModel):
    normalized_text: str = ""
    top_features: list[FeatureContribution] = Field(default_factory=list)

    @classmethod
    def from_item(cls, item: FlaggedItem) -> "QueueItemDetail":
        base = QueueItemModel.from_item(item)
        return cls(
            **base.model_dump(),
            normalized_text=item.normalized_text,
            top_features=[
                FeatureContribution(trigram=g, contribution=v)
                for g, v in item.top_features
            ],
        )


class QueueListResponse(BaseModel):
    items: list[QueueItemModel]
    page: int
    page_size: int
    total: int  # items matching the filter across all pages
    counts: dict[str, int]  # per-status totals for the whole queue


class ReviewRequest(BaseModel):
    decision: Literal["confirmed", "rejected"]
    reviewer: str = Field(min_length=1)


class HealthResponse(BaseModel):
    status: str
    model_features: int
    queue: dict[str, int]
