"""Moderation queue persisted as an append-only JSON-lines event log.

Two event kinds exist: ``flagged`` (a scored text entered the queue) and
``reviewed`` (a moderator confirmed or rejected it). The queue's whole
state is reconstructed by replaying the log, so a restart after a crash
loses at most a torn final line. All mutations serialize through one
lock and flush before returning.
"""

from __future__ import annotations

import csv
import io
import json
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .corpus import Label


class ItemStatus(str, Enum):
    PENDING = "pending"
    CONFIRMED = "confirmed"
    REJECTED = "rejected"


class ItemNotFoundError(KeyError):
    pass


class ReviewConflictError(ValueError):
    """The item was already reviewed; reviews are write-once."""


@dataclass(frozen=True)
class FlaggedItem:
    item_id: str  # zero-padded sequence number; creation order == sort order
    text: str
    score: float
    label: Label
    received_at: str
    status: ItemStatus = ItemStatus.PENDING
    reviewer: str | None = None
    reviewed_at: str | None = None
    normalized_text: str = ""
    top_features: tuple[tuple[str, float], ...] = ()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ModerationQueue:
    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self._lock = threading.Lock()
        self._items: dict[str, FlaggedItem] = {}
        self._next_seq = 1
        if self.log_path.exists():
            self._replay()
        self._fh = open(self.log_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            lines = fh.read().split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        for line_no, line in enumerate(lines, start=1):
            try:
                event = json.loads(line)
            except json.JSONDecodeError:
                if line_no == len(lines):
                    break  # torn final line from a crash mid-append
                raise ValueError(
                    f"{self.log_path}: corrupt event on line {line_no}"
                ) from None
            self._apply(event, line_no)

    def _apply(self, event: dict, line_no: int) -> None:
        kind = event.get("event")
        if kind == "flagged":
            item = FlaggedItem(
                item_id=event["item_id"],
                text=event["text"],
                score=event["score"],
                label=Label(event["label"]),
                received_at=event["received_at"],
                normalized_text=event.get("normalized_text", ""),
                top_features=tuple(
                    (str(g), float(v)) for g, v in event.get("top_features", [])
                ),
            )
            self._items[item.item_id] = item
            self._next_seq = max(self._next_seq, int(item.item_id) + 1)
        elif kind == "reviewed":
            item = self._items[event["item_id"]]
            self._items[item.item_id] = replace(
                item,
                status=ItemStatus(event["decision"]),
                reviewer=event["reviewer"],
                reviewed_at=event["reviewed_at"],
            )
        else:
            raise ValueError(
                f"{self.log_path}: unknown event {kind!r} on line {line_no}"
            )

    def _append(self, event: dict) -> None:
        self._fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        self._fh.flush()

    def flag(
        self,
        text: str,
        score: float,
        label: Label,
        normalized_text: str = "",
        top_features: tuple[tuple[str, float], ...] = (),
    ) -> FlaggedItem:
        with self._lock:
            item = FlaggedItem(
                item_id=f"{self._next_seq:010d}",
                text=text,
                score=score,
                label=label,
                received_at=_now(),
                normalized_text=normalized_text,
                top_features=tuple(top_features),
            )
            self._next_seq += 1
            self._items[item.item_id] = item
            self._append(
                {
                    "event": "flagged",
                    "item_id": item.item_id,
                    "text": item.text,
                    "score": item.score,
                    "label": item.label.value,
                    "received_at": item.received_at,
                    "normalized_text": item.normalized_text,
                    "top_features": [[g, v] for g, v in item.top_features],
                }
            )
            return item

    def review(self, item_id: str, decision: str, reviewer: str) -> FlaggedItem:
        status = ItemStatus(decision)
        if status is ItemStatus.PENDING:
            raise ValueError("decision must be 'confirmed' or 'rejected'")
        if not reviewer:
            raise ValueError("reviewer must be non-empty")
        with self._lock:
            if item_id not in self._items:
                raise ItemNotFoundError(item_id)
            item = self._items[item_id]
            if item.status is not ItemStatus.PENDING:
                raise ReviewConflictError(
                    f"item {item_id} already {item.status.value}"
                )
            updated = replace(
                item, status=status, reviewer=reviewer, reviewed_at=_now()
            )
            self._items[item_id] = updated
            self._append(
                {
                    "event": "reviewed",
                    "item_id": item_id,
                    "decision": status.value,
                    "reviewer": reviewer,
                    "reviewed_at": updated.reviewed_at,
                }
            )
            return updated

    def get(self, item_id: str) -> FlaggedItem:
        with self._lock:
            if item_id not in self._items:
                raise ItemNotFoundError(item_id)
            return self._items[item_id]

    def list_items(
        self,
        status: ItemStatus | None = None,
        min_score: float | None = None,
    ) -> list[FlaggedItem]:
        """Filtered items, highest score first (ties by item_id)."""
        with self._lock:
            items = list(self._items.values())
        if status is not None:
            items = [i for i in items if i.status is status]
        if min_score is not None:
            items = [i for i in items if i.score >= min_score]
        items.sort(key=lambda i: (-i.score, i.item_id))
        return items

    def counts(self) -> dict[str, int]:
        with self._lock:
            out = {s.value: 0 for s in ItemStatus}
            for item in self._items.values():
                out[item.status.value] += 1
            return out

    def snapshot(self) -> dict[str, FlaggedItem]:
        with self._lock:
            return dict(self._items)

    def export_csv(self) -> str:
        """Reviewed items as corpus-format training rows.

        Confirmed items become HATE rows and rejected items SAFE rows;
        the reviewer stands in as the author column. Re-ingesting the
        output is valid corpus input.
        """
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["id", "author", "text", "date", "label"])
        for item in sorted(self.snapshot().values(), key=lambda i: i.item_id):
            if item.status is ItemStatus.PENDING:
                continue
            label = Label.HATE if item.status is ItemStatus.CONFIRMED else Label.SAFE
            writer.writerow(
                [
                    int(item.item_id),
                    item.reviewer or "moderation",
                    item.text,
                    item.reviewed_at or "",
                    label.value,
                ]
            )
        return buf.getvalue()

    def close(self) -> None:
        with self._lock:
            if not self._fh.closed:
                self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
