"""Linear SVM training, prediction, and the portable model file format.

Model files are plain UTF-8 text with LF line endings:

    TRIPWIRE-SVM v1
    bias <decimal>
    features <N>
    <trigram><TAB><decimal>          (N lines, sorted by trigram byte order)

Decimals use Python's shortest round-trip representation, so a
save/load cycle reproduces bit-identical scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus, Label, normalize, trigrams
from .features import (
    SparseVector,
    Vocabulary,
    fit_vocabulary,
    vector_from_counts,
    vectorize_corpus,
)
from . import solver

MAGIC = "TRIPWIRE-SVM"
FORMAT_VERSION = 1

HATE_Y = 1.0
SAFE_Y = -1.0


class ModelFormatError(ValueError):
    """File is not a recognizable model file."""


class ModelVersionError(ModelFormatError):
    """Model file declares an unsupported format version."""


class ModelParseError(ModelFormatError):
    """Model file is truncated or has a malformed line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tolerance: float = 1e-4
    max_iterations: int = 1000
    seed: int = 42

    def __post_init__(self):
        if self.C <= 0:
            raise ValueError("C must be positive")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


@dataclass
class LinearModel:
    weights: np.ndarray  # one weight per vocabulary index
    bias: float
    vocabulary: Vocabulary
    format_version: int = FORMAT_VERSION
    train_config: TrainConfig | None = None
    converged: bool = True
    epochs: int = 0
    # (primal, dual) objective per epoch; filled when trained with tracking
    objective_history: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.weights) != self.vocabulary.size:
            raise ValueError(
                f"weight count {len(self.weights)} does not match vocabulary "
                f"size {self.vocabulary.size}"
            )
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise ValueError("model weights must be finite")


@dataclass(frozen=True)
class Prediction:
    label: Label
    score: float
    low_confidence: bool


def labels_to_y(labels: list[Label]) -> np.ndarray:
    y = np.empty(len(labels))
    for i, lab in enumerate(labels):
        if lab is Label.HATE:
            y[i] = HATE_Y
        elif lab is Label.SAFE:
            y[i] = SAFE_Y
        else:
            raise ValueError(f"record {i} is unlabeled; training needs HATE/SAFE")
    return y


def train(
    vectors: list[SparseVector],
    labels: list[Label] | np.ndarray,
    vocab: Vocabulary,
    config: TrainConfig = TrainConfig(),
    track_objective: bool = False,
) -> LinearModel:
    """Fit the soft-margin linear SVM on pre-vectorized documents.

    Deterministic for a fixed config: the coordinate visit order is the
    only randomized part and it is seeded.
    """
    if len(vectors) != len(labels):
        raise ValueError("vector and label counts differ")
    if len(vectors) < 2:
        raise ValueError("training needs at least 2 documents")
    y = labels_to_y(list(labels)) if not isinstance(labels, np.ndarray) else labels
    if not ((y == HATE_Y).any() and (y == SAFE_Y).any()):
        raise ValueError("training needs both classes present")
    X = solver.to_csr(vectors, vocab.size)
    result = solver.solve(
        X,
        y,
        C=config.C,
        tolerance=config.tolerance,
        max_iterations=config.max_iterations,
        seed=config.seed,
        track_objective=track_objective,
    )
    return LinearModel(
        weights=result.weights,
        bias=result.bias,
        vocabulary=vocab,
        train_config=config,
        converged=result.converged,
        epochs=result.epochs,
        objective_history=result.objective_history,
    )


def train_corpus(
    corpus: Corpus, config: TrainConfig = TrainConfig(), min_df: int = 1
) -> LinearModel:
    """Vocabulary fit + vectorize + train over a labeled corpus."""
    labeled = corpus.labeled()
    vocab = fit_vocabulary(labeled, min_df=min_df)
    vectors = vectorize_corpus(labeled, vocab)
    labels = [rec.label for rec in labeled]
    return train(vectors, labels, vocab, config)


def predict(model: LinearModel, text: str) -> Prediction:
    """Score raw text through normalize -> trigrams -> vectorize -> w.x + b.

    A text with no in-vocabulary trigrams falls back to the bias sign and
    is flagged low confidence. Score 0 classifies as SAFE.
    """
    vec = vector_from_counts(trigrams(normalize(text)), model.vocabulary)
    score = vec.dot(model.weights) + model.bias
    label = Label.HATE if score > 0 else Label.SAFE
    return Prediction(label=label, score=score, low_confidence=vec.is_empty())


def explain(
    model: LinearModel, text: str, top_k: int = 10
) -> list[tuple[str, float]]:
    """Top trigram contributions (weight * normalized count) by magnitude."""
    vec = vector_from_counts(trigrams(normalize(text)), model.vocabulary)
    contribs = [
        (model.vocabulary.features[int(i)], float(model.weights[int(i)]) * float(w))
        for i, w in zip(vec.indices, vec.weights)
    ]
    contribs.sort(key=lambda pair: (-abs(pair[1]), pair[0]))
    return contribs[:top_k]


def _format_float(value: float) -> str:
    return repr(float(value))


def save_model(model: LinearModel, path: str | Path) -> None:
    lines = [
        f"{MAGIC} v{model.format_version}",
        f"bias {_format_float(model.bias)}",
        f"features {model.vocabulary.size}",
    ]
    lines.extend(
        f"{gram}\t{_format_float(model.weights[i])}"
        for i, gram in enumerate(model.vocabulary.features)
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str | Path) -> LinearModel:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    if "\r" in text:
        raise ModelFormatError("model files use LF line endings, found CR")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ModelParseError(1, "empty model file")
    header = lines[0]
    if not header.startswith(MAGIC + " "):
        raise ModelFormatError(
            f"not a {MAGIC} model file (first line {header!r})"
        )
    version = header[len(MAGIC) + 1 :]
    if version != f"v{FORMAT_VERSION}":
        raise ModelVersionError(
            f"unsupported model version {version!r}; expected v{FORMAT_VERSION}"
        )
    if len(lines) < 2 or not lines[1].startswith("bias "):
        raise ModelParseError(2, "expected 'bias <decimal>'")
    try:
        bias = float(lines[1][5:])
    except ValueError:
        raise ModelParseError(2, f"bad bias value {lines[1][5:]!r}") from None
    if len(lines) < 3 or not lines[2].startswith("features "):
        raise ModelParseError(3, "expected 'features <N>'")
    try:
        n_features = int(lines[2][9:])
    except ValueError:
        raise ModelParseError(3, f"bad feature count {lines[2][9:]!r}") from None
    if n_features < 0:
        raise ModelParseError(3, "feature count must be non-negative")
    expected_total = 3 + n_features
    if len(lines) < expected_total:
        raise ModelParseError(
            len(lines) + 1, f"truncated: expected {n_features} feature lines"
        )
    if len(lines) > expected_total:
        raise ModelParseError(expected_total + 1, "trailing content after features")
    grams: list[str] = []
    weights = np.empty(n_features)
    prev: str | None = None
    for offset, line in enumerate(lines[3:expected_total]):
        line_num = 4 + offset
        gram, sep, raw = line.partition("\t")
        if not sep or not gram:
            raise ModelParseError(line_num, "expected '<trigram><TAB><decimal>'")
        if prev is not None and gram <= prev:
            raise ModelParseError(
                line_num, f"feature {gram!r} out of byte order after {prev!r}"
            )
        try:
            weights[offset] = float(raw)
        except ValueError:
            raise ModelParseError(line_num, f"bad weight {raw!r}") from None
        grams.append(gram)
        prev = gram
    return LinearModel(
        weights=weights,
        bias=bias,
        vocabulary=Vocabulary(features=tuple(grams)),
    )
