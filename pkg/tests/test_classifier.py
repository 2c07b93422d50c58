import random

import numpy as np
import pytest

from tripwire.classifier import (
    LinearModel,
    ModelFormatError,
    ModelParseError,
    ModelVersionError,
    Prediction,
    TrainConfig,
    explain,
    load_model,
    predict,
    save_model,
    train,
    train_corpus,
)
from tripwire.corpus import Corpus, DocumentRecord, Label, normalize
from tripwire.features import SparseVector, Vocabulary, fit_vocabulary, vectorize

from conftest import make_planted_corpus


def separable_setup():
    corpus = Corpus(
        (
            DocumentRecord(id=1, author="x", text="aaa", label=Label.HATE),
            DocumentRecord(id=2, author="y", text="bbb", label=Label.SAFE),
        )
    )
    vocab = fit_vocabulary(corpus)
    vectors = [vectorize("aaa", vocab), vectorize("bbb", vocab)]
    return corpus, vocab, vectors


class TestTrain:
    def test_separable_toy_perfect_margins(self):
        _, vocab, vectors = separable_setup()
        model = train(vectors, [Label.HATE, Label.SAFE], vocab)
        assert vectors[0].dot(model.weights) + model.bias > 0
        assert vectors[1].dot(model.weights) + model.bias < 0

    def test_single_class_errors(self):
        _, vocab, vectors = separable_setup()
        with pytest.raises(ValueError, match="both classes"):
            train(vectors, [Label.HATE, Label.HATE], vocab)

    def test_unlabeled_errors(self):
        _, vocab, vectors = separable_setup()
        with pytest.raises(ValueError, match="unlabeled"):
            train(vectors, [Label.HATE, Label.UNLABELED], vocab)

    def test_dimension_mismatch_errors(self):
        _, vocab, _ = separable_setup()
        bad = SparseVector(
            indices=np.array([vocab.size + 3], dtype=np.int32),
            weights=np.array([1.0]),
        )
        with pytest.raises(ValueError, match="outside"):
            train([bad, bad], [Label.HATE, Label.SAFE], vocab)

    def test_count_mismatch_errors(self):
        _, vocab, vectors = separable_setup()
        with pytest.raises(ValueError, match="counts differ"):
            train(vectors, [Label.HATE], vocab)

    def test_bit_identical_for_same_seed(self):
        corpus = make_planted_corpus(40, 40, seed=3)
        a = train_corpus(corpus, TrainConfig(seed=42))
        b = train_corpus(corpus, TrainConfig(seed=42))
        assert np.array_equal(a.weights, b.weights)
        assert a.bias == b.bias

    def test_config_validation(self):
        with pytest.raises(ValueError):
            TrainConfig(C=0.0)
        with pytest.raises(ValueError):
            TrainConfig(tolerance=-1)
        with pytest.raises(ValueError):
            TrainConfig(max_iterations=0)


class TestPredict:
    def test_toy_prediction(self, toy_model):
        assert predict(toy_model, "aaa aaa").label is Label.HATE
        assert predict(toy_model, "bbb").label is Label.SAFE

    def test_empty_text_low_confidence(self, toy_model):
        pred = predict(toy_model, "")
        assert pred.low_confidence
        expected = Label.HATE if toy_model.bias > 0 else Label.SAFE
        assert pred.label is expected
        assert pred.score == toy_model.bias

    def test_pure_function(self, toy_model):
        a = predict(toy_model, "aaa bbb")
        b = predict(toy_model, "aaa bbb")
        assert a == b

    def test_score_zero_is_safe(self):
        vocab = Vocabulary(features=("aaa",))
        model = LinearModel(weights=np.zeros(1), bias=0.0, vocabulary=vocab)
        assert predict(model, "aaa").label is Label.SAFE

    def test_depends_only_on_normalized_text(self, toy_model):
        raw = "#AAA   @Somebody http://x.io/aaa"
        pred_raw = predict(toy_model, raw)
        pred_norm = predict(toy_model, normalize(raw))
        assert pred_raw.score == pred_norm.score
        assert pred_raw.label is pred_norm.label

    def test_explain_ranks_by_contribution_magnitude(self, toy_model):
        contribs = explain(toy_model, "aaa bbb", top_k=10)
        assert contribs
        magnitudes = [abs(c) for _, c in contribs]
        assert magnitudes == sorted(magnitudes, reverse=True)
        grams = {g for g, _ in contribs}
        assert "aaa" in grams


class TestModelIO:
    def test_roundtrip_scores_bit_identical(self, toy_model, tmp_path):
        path = tmp_path / "m.svm"
        save_model(toy_model, path)
        loaded = load_model(path)
        rng = random.Random(0)
        for _ in range(20):
            text = "".join(rng.choice("ab ") for _ in range(rng.randint(0, 30)))
            assert predict(loaded, text).score == predict(toy_model, text).score

    def test_roundtrip_fields(self, toy_model, tmp_path):
        path = tmp_path / "m.svm"
        save_model(toy_model, path)
        loaded = load_model(path)
        assert np.array_equal(loaded.weights, toy_model.weights)
        assert loaded.bias == toy_model.bias
        assert loaded.vocabulary.features == toy_model.vocabulary.features

    def test_file_layout(self, toy_model, tmp_path):
        path = tmp_path / "m.svm"
        save_model(toy_model, path)
        raw = path.read_bytes().decode("utf-8")
        lines = raw.split("\n")
        assert lines[0] == "TRIPWIRE-SVM v1"
        assert lines[1].startswith("bias ")
        assert lines[2] == f"features {toy_model.vocabulary.size}"
        assert "\r" not in raw

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "m.svm"
        path.write_text("SOMETHING-ELSE v1\nbias 0.0\nfeatures 0\n")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_version_mismatch_rejected(self, tmp_path):
        path = tmp_path / "m.svm"
        path.write_text("TRIPWIRE-SVM v2\nbias 0.0\nfeatures 0\n")
        with pytest.raises(ModelVersionError):
            load_model(path)

    def test_empty_file_is_parse_error(self, tmp_path):
        path = tmp_path / "m.svm"
        path.write_text("")
        with pytest.raises(ModelParseError):
            load_model(path)

    def test_truncated_file_reports_line(self, toy_model, tmp_path):
        path = tmp_path / "m.svm"
        save_model(toy_model, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ModelParseError) as err:
            load_model(path)
        assert err.value.line == len(lines)

    def test_malformed_weight_reports_line(self, tmp_path):
        path = tmp_path / "m.svm"
        path.write_text("TRIPWIRE-SVM v1\nbias 0.5\nfeatures 1\nabc\tnotafloat\n")
        with pytest.raises(ModelParseError) as err:
            load_model(path)
        assert err.value.line == 4

    def test_crlf_file_rejected_with_clear_error(self, toy_model, tmp_path):
        path = tmp_path / "m.svm"
        save_model(toy_model, path)
        crlf = tmp_path / "crlf.svm"
        crlf.write_bytes(path.read_bytes().replace(b"\n", b"\r\n"))
        with pytest.raises(ModelFormatError, match="LF line endings"):
            load_model(crlf)

    def test_out_of_order_features_rejected(self, tmp_path):
        path = tmp_path / "m.svm"
        path.write_text(
            "TRIPWIRE-SVM v1\nbias 0.0\nfeatures 2\nbbb\t1.0\naaa\t2.0\n"
        )
        with pytest.raises(ModelParseError, match="byte order"):
            load_model(path)


class TestTrainCorpus:
    def test_planted_corpus_training_accuracy(self):
        corpus = make_planted_corpus(60, 60, seed=5)
        model = train_corpus(corpus)
        hits = sum(
            predict(model, rec.text).label is rec.label for rec in corpus
        )
        assert hits / len(corpus) >= 0.98
