"""Corpus ingestion, normalization, and featurization primitives.

The on-disk corpus format is a CSV with columns
``id, author, text[, date][, label][, lang]``. A header row is
auto-detected when the first cell of the first row is non-numeric.
Malformed rows are collected as :class:`RowError` entries instead of
aborting the whole ingest.
"""

from __future__ import annotations

import csv
import random
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator

MAX_ID = 2**64 - 1


class Label(str, Enum):
    HATE = "HATE"
    SAFE = "SAFE"
    UNLABELED = "UNLABELED"


@dataclass(frozen=True)
class DocumentRecord:
    """One tweet-like text. ``date`` is an opaque string kept verbatim."""

    id: int
    author: str
    text: str
    date: str = ""
    label: Label = Label.UNLABELED
    lang: str | None = None


@dataclass(frozen=True)
class Corpus:
    """Immutable ordered collection of records with unique ids."""

    records: tuple[DocumentRecord, ...]
    label_counts: dict[Label, int] = field(compare=False, default_factory=dict)

    def __post_init__(self):
        seen: set[int] = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id}")
            seen.add(rec.id)
        counts = Counter(rec.label for rec in self.records)
        object.__setattr__(
            self, "label_counts", {lab: counts.get(lab, 0) for lab in Label}
        )

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.records)

    def count(self, label: Label) -> int:
        return self.label_counts.get(label, 0)

    def labeled(self) -> "Corpus":
        """Sub-corpus of records labeled HATE or SAFE."""
        return Corpus(
            tuple(r for r in self.records if r.label is not Label.UNLABELED)
        )


@dataclass(frozen=True)
class RowError:
    line: int
    reason: str

    def to_json_dict(self) -> dict:
        return {"line": self.line, "reason": self.reason}


@dataclass(frozen=True)
class IngestResult:
    corpus: Corpus
    row_errors: tuple[RowError, ...]
    duplicates: int


@dataclass(frozen=True)
class CueReport:
    username: str
    cues: frozenset[str]


# "abu"/"umm" are name prefixes; the others flag anywhere in the handle.
PREFIX_CUES = ("abu", "umm")
SUBSTRING_CUES = ("muhajir", "mujahid", "jihad")

_URL_RE = re.compile(r"https?://\S*", re.IGNORECASE)
_MENTION_RE = re.compile(r"(?<!\w)@\w+")
_WS_RE = re.compile(r"\s+")


def normalize(text: str) -> str:
    """Normalize raw text for featurization.

    URLs (``http://``/``https://`` up to the next whitespace) become the
    token ``url``, @-mentions become ``@user``, ``#`` characters are
    removed, letters are lowercased, and whitespace runs collapse to
    single spaces. Everything else (emoji, punctuation, non-Latin
    scripts) is preserved. Idempotent.
    """
    text = _URL_RE.sub("url", text)
    text = _MENTION_RE.sub("@user", text)
    text = text.replace("#", "")
    text = text.lower()
    text = _WS_RE.sub(" ", text)
    return text.strip()


def trigrams(text: str) -> Counter:
    """Multiset of 3-character windows over the full text.

    Windows slide across spaces with no boundary padding, so word
    endings and transitions contribute features. Texts shorter than 3
    characters yield an empty multiset.
    """
    return Counter(text[i : i + 3] for i in range(len(text) - 2))


def username_cues(username: str) -> CueReport:
    """Case-insensitive scan of a handle for known naming cues."""
    low = username.lower()
    cues = {c for c in PREFIX_CUES if low.startswith(c)}
    cues.update(c for c in SUBSTRING_CUES if c in low)
    return CueReport(username=username, cues=frozenset(cues))


def _parse_label(raw: str) -> Label | None:
    try:
        return Label[raw.strip().upper()]
    except KeyError:
        return None


def _parse_row(
    row: list[str], default_label: Label
) -> DocumentRecord | str:
    """Returns a record, or a rejection reason string."""
    if len(row) < 3:
        return "too few columns (need id, author, text)"
    raw_id, author, text = row[0].strip(), row[1].strip(), row[2]
    try:
        rec_id = int(raw_id)
    except ValueError:
        return f"non-integer id {raw_id!r}"
    if not 0 <= rec_id <= MAX_ID:
        return f"id {rec_id} outside unsigned 64-bit range"
    author = author.lstrip("@")
    if not author:
        return "empty author"
    if not text.strip():
        return "empty text"
    date = row[3].strip() if len(row) > 3 else ""
    label = default_label
    if len(row) > 4 and row[4].strip():
        parsed = _parse_label(row[4])
        if parsed is None:
            return f"invalid label {row[4].strip()!r}"
        label = parsed
    lang = None
    if len(row) > 5:
        cand = row[5].strip().lower()
        # lang is advisory metadata; anything that is not a 2-letter
        # code is dropped rather than rejecting the row
        if len(cand) == 2 and cand.isalpha():
            lang = cand
    return DocumentRecord(
        id=rec_id, author=author, text=text, date=date, label=label, lang=lang
    )


def ingest_csv(
    path: str | Path, default_label: Label = Label.UNLABELED
) -> IngestResult:
    """Read a corpus CSV, keeping the first row seen for each id.

    Rows that cannot become valid records are reported as
    :class:`RowError` with their line number; ingestion continues past
    them. Rows without an explicit label get ``default_label``.
    """
    records: list[DocumentRecord] = []
    errors: list[RowError] = []
    seen: set[int] = set()
    duplicates = 0
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for row_num, row in enumerate(reader):
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            if row_num == 0 and not row[0].strip().lstrip("-").isdigit():
                continue  # header row
            parsed = _parse_row(row, default_label)
            if isinstance(parsed, str):
                errors.append(RowError(line=line, reason=parsed))
                continue
            if parsed.id in seen:
                duplicates += 1
                continue
            seen.add(parsed.id)
            records.append(parsed)
    return IngestResult(
        corpus=Corpus(tuple(records)),
        row_errors=tuple(errors),
        duplicates=duplicates,
    )


def write_csv(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to the 6-column CSV format (with header)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "author", "text", "date", "label", "lang"])
        for rec in corpus:
            writer.writerow(
                [rec.id, rec.author, rec.text, rec.date, rec.label.value, rec.lang or ""]
            )


def write_row_errors(errors: Iterable[RowError], path: str | Path) -> None:
    """Emit the row-error report as JSON lines, one object per bad row."""
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for err in errors:
            fh.write(json.dumps(err.to_json_dict(), ensure_ascii=False) + "\n")


def balance(corpus: Corpus, seed: int) -> Corpus:
    """Equalize HATE and SAFE counts by subsampling the majority class.

    The minority class and any unlabeled records are kept in full; the
    majority class is sampled uniformly without replacement using
    ``seed``. Record order is preserved, so a fixed seed gives an
    identical corpus every time.
    """
    n_hate = corpus.count(Label.HATE)
    n_safe = corpus.count(Label.SAFE)
    if n_hate == 0 or n_safe == 0:
        missing = Label.HATE if n_hate == 0 else Label.SAFE
        raise ValueError(f"cannot balance: no {missing.value} records in corpus")
    if n_hate == n_safe:
        return corpus
    majority = Label.HATE if n_hate > n_safe else Label.SAFE
    target = min(n_hate, n_safe)
    majority_ids = [r.id for r in corpus if r.label is majority]
    rng = random.Random(seed)
    keep = set(rng.sample(majority_ids, target))
    kept = tuple(
        r for r in corpus if r.label is not majority or r.id in keep
    )
    return Corpus(kept)
