import random
import string

import pytest

from tripwire.corpus import Corpus, DocumentRecord, Label

PLANTED_LEXICON = (
    "zarqat", "vexilum", "drakonir", "melqart", "ubrax",
    "qintara", "fenwyr", "joxul", "praveth", "skarnil",
    "welvox", "hazrup", "tyriq", "obrand", "luxfer",
    "gramvol", "nistrak", "pellqar", "yovrex", "cindrax",
)


def random_word(rng, lo=3, hi=8):
    return "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(lo, hi)))


def make_planted_corpus(
    n_hate: int,
    n_safe: int,
    seed: int = 7,
    background_size: int = 500,
    doc_len: tuple[int, int] = (6, 14),
    langs: tuple[str, ...] = (),
) -> Corpus:
    """Synthetic corpus: HATE docs carry 1-3 planted lexicon tokens,
    SAFE docs draw only from a shared background vocabulary."""
    rng = random.Random(seed)
    background = [random_word(rng) for _ in range(background_size)]
    records = []
    rec_id = 1
    for label, count in ((Label.HATE, n_hate), (Label.SAFE, n_safe)):
        for _ in range(count):
            n_tokens = rng.randint(*doc_len)
            words = [rng.choice(background) for _ in range(n_tokens)]
            if label is Label.HATE:
                for _ in range(rng.randint(1, 3)):
                    words[rng.randrange(len(words))] = rng.choice(PLANTED_LEXICON)
            records.append(
                DocumentRecord(
                    id=rec_id,
                    author=f"user{rec_id % 97}",
                    text=" ".join(words),
                    label=label,
                    lang=rng.choice(langs) if langs else None,
                )
            )
            rec_id += 1
    return Corpus(tuple(records))


@pytest.fixture(scope="session")
def planted_corpus_small():
    return make_planted_corpus(120, 120, seed=11)


@pytest.fixture(scope="session")
def toy_model():
    """Separable two-document model: 'aaa' is HATE, 'bbb' is SAFE."""
    from tripwire.classifier import TrainConfig, train
    from tripwire.features import fit_vocabulary, vectorize

    corpus = Corpus(
        (
            DocumentRecord(id=1, author="x", text="aaa", label=Label.HATE),
            DocumentRecord(id=2, author="y", text="bbb", label=Label.SAFE),
        )
    )
    vocab = fit_vocabulary(corpus)
    vectors = [vectorize("aaa", vocab), vectorize("bbb", vocab)]
    return train(vectors, [Label.HATE, Label.SAFE], vocab, TrainConfig())
