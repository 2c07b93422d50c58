"""Trigram vocabulary and sparse L2-normalized count vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, normalize, trigrams


@dataclass(frozen=True)
class Vocabulary:
    """Frozen trigram -> column index map.

    Features are stored in lexicographic byte order (UTF-8 preserves
    code-point order, so sorting strings is equivalent), which makes
    index assignment deterministic across runs.
    """

    features: tuple[str, ...]
    index: dict[str, int] = field(compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "index", {f: i for i, f in enumerate(self.features)}
        )

    def __len__(self) -> int:
        return len(self.features)

    def __contains__(self, feature: str) -> bool:
        return feature in self.index

    @property
    def size(self) -> int:
        return len(self.features)


@dataclass
class SparseVector:
    """Sparse vector as parallel (strictly increasing index, weight) arrays."""

    indices: np.ndarray  # int32, strictly increasing
    weights: np.ndarray  # float64, no stored zeros

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def is_empty(self) -> bool:
        return len(self.indices) == 0

    def norm(self) -> float:
        return math.sqrt(float(np.dot(self.weights, self.weights)))

    def dot(self, dense: np.ndarray) -> float:
        return float(np.dot(dense[self.indices], self.weights))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return np.array_equal(self.indices, other.indices) and np.array_equal(
            self.weights, other.weights
        )


def _empty_vector() -> SparseVector:
    return SparseVector(
        indices=np.empty(0, dtype=np.int32), weights=np.empty(0, dtype=np.float64)
    )


def fit_vocabulary(corpus: Corpus, min_df: int = 1) -> Vocabulary:
    """Collect trigrams occurring in at least ``min_df`` normalized texts."""
    if len(corpus) == 0:
        raise ValueError("cannot fit a vocabulary on an empty corpus")
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    df: dict[str, int] = {}
    for rec in corpus:
        for gram in set(trigrams(normalize(rec.text))):
            df[gram] = df.get(gram, 0) + 1
    kept = sorted(g for g, n in df.items() if n >= min_df)
    return Vocabulary(features=tuple(kept))


def vector_from_counts(counts: dict[str, float], vocab: Vocabulary) -> SparseVector:
    """L2-normalize in-vocabulary counts into a sparse vector.

    Trigrams absent from the vocabulary are dropped before
    normalization; if nothing overlaps the result is the empty vector.
    """
    index = vocab.index
    pairs = sorted(
        (index[g], c) for g, c in counts.items() if c != 0 and g in index
    )
    if not pairs:
        return _empty_vector()
    idx = np.fromiter((p[0] for p in pairs), dtype=np.int32, count=len(pairs))
    w = np.fromiter((p[1] for p in pairs), dtype=np.float64, count=len(pairs))
    w /= np.linalg.norm(w)
    return SparseVector(indices=idx, weights=w)


def vectorize(text: str, vocab: Vocabulary) -> SparseVector:
    """Trigram counts of an already-normalized text, L2-normalized."""
    return vector_from_counts(trigrams(text), vocab)


def vectorize_corpus(corpus: Corpus, vocab: Vocabulary) -> list[SparseVector]:
    """Normalize and vectorize every record."""
    return [vectorize(normalize(rec.text), vocab) for rec in corpus]
