"""Character-trigram text triage toolkit.

Core pipeline: normalize tweet-like texts, extract character trigrams,
train a linear SVM on L2-normalized trigram counts, and score new texts.
Around it: corpus ingestion, keyword bias statistics, concordance word
trees, social-graph influencer detection, a scoring HTTP service with a
moderation queue, and a CLI driving all of it.
"""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    CueReport,
    DocumentRecord,
    Label,
    balance,
    ingest_csv,
    normalize,
    trigrams,
    username_cues,
    write_csv,
)
from .features import SparseVector, Vocabulary, fit_vocabulary, vectorize
from .classifier import (
    LinearModel,
    Prediction,
    TrainConfig,
    load_model,
    predict,
    save_model,
    train,
    train_corpus,
)

__all__ = [
    "Corpus",
    "CueReport",
    "DocumentRecord",
    "Label",
    "LinearModel",
    "Prediction",
    "SparseVector",
    "TrainConfig",
    "Vocabulary",
    "balance",
    "fit_vocabulary",
    "ingest_csv",
    "load_model",
    "normalize",
    "predict",
    "save_model",
    "train",
    "train_corpus",
    "trigrams",
    "username_cues",
    "vectorize",
    "write_csv",
]
