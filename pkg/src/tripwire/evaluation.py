"""Stratified k-fold cross-validation and metric arithmetic.

Macro averaging follows the two-stage scheme: precision and recall are
averaged over the two classes within a fold, then over folds; F1 is the
harmonic mean of the aggregate precision and recall. Per-fold confusion
matrices are kept for both orientations (HATE as positive and SAFE as
positive), which are each other's tp<->tn / fp<->fn swaps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import LinearModel, TrainConfig, predict, train
from .corpus import Corpus, Label
from .features import fit_vocabulary, vectorize_corpus


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def swapped(self) -> "ConfusionMatrix":
        """The same predictions with the other class treated as positive."""
        return ConfusionMatrix(tp=self.tn, tn=self.tp, fp=self.fn, fn=self.fp)


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False


def metrics(m: ConfusionMatrix) -> Metrics:
    """Precision/recall/F1 with every 0/0 defined as 0.0 and flagged."""
    degenerate = False
    if m.tp + m.fp > 0:
        precision = m.tp / (m.tp + m.fp)
    else:
        precision, degenerate = 0.0, True
    if m.tp + m.fn > 0:
        recall = m.tp / (m.tp + m.fn)
    else:
        recall, degenerate = 0.0, True
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = 0.0, True
    return Metrics(precision=precision, recall=recall, f1=f1, degenerate=degenerate)


def macro_metrics(folds: list[tuple[ConfusionMatrix, ConfusionMatrix]]) -> Metrics:
    """Average precision/recall over classes within folds, then over folds."""
    if not folds:
        raise ValueError("macro_metrics needs at least one fold")
    fold_p = []
    fold_r = []
    degenerate = False
    for hate_cm, safe_cm in folds:
        mh, ms = metrics(hate_cm), metrics(safe_cm)
        degenerate = degenerate or mh.degenerate or ms.degenerate
        fold_p.append((mh.precision + ms.precision) / 2)
        fold_r.append((mh.recall + ms.recall) / 2)
    precision = sum(fold_p) / len(fold_p)
    recall = sum(fold_r) / len(fold_r)
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = 0.0, True
    return Metrics(precision=precision, recall=recall, f1=f1, degenerate=degenerate)


@dataclass(frozen=True)
class FoldReport:
    fold: int
    hate: ConfusionMatrix
    safe: ConfusionMatrix
    metrics: Metrics  # class-averaged within this fold


@dataclass(frozen=True)
class LanguageMetrics:
    n: int
    metrics: Metrics


@dataclass(frozen=True)
class CVReport:
    k: int
    folds: tuple[FoldReport, ...]
    macro: Metrics
    per_language: dict[str, LanguageMetrics] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "folds": [
                {
                    "fold": f.fold,
                    "class_matrices": {
                        "HATE": vars(f.hate),
                        "SAFE": vars(f.safe),
                    },
                    "metrics": {
                        "precision": f.metrics.precision,
                        "recall": f.metrics.recall,
                        "f1": f.metrics.f1,
                    },
                }
                for f in self.folds
            ],
            "macro": {
                "precision": self.macro.precision,
                "recall": self.macro.recall,
                "f1": self.macro.f1,
            },
            "per_language": {
                lang: {
                    "n": lm.n,
                    "precision": lm.metrics.precision,
                    "recall": lm.metrics.recall,
                    "f1": lm.metrics.f1,
                }
                for lang, lm in sorted(self.per_language.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)

    def to_text_table(self) -> str:
        lines = []
        for f in self.folds:
            lines.append(f"TEST {f.fold}\tTP\tTN\tFP\tFN")
            lines.append(
                f"HATE\t{f.hate.tp}\t{f.hate.tn}\t{f.hate.fp}\t{f.hate.fn}"
            )
            lines.append(
                f"SAFE\t{f.safe.tp}\t{f.safe.tn}\t{f.safe.fp}\t{f.safe.fn}"
            )
            lines.append("")
        lines.append(
            "macro\tprecision {:.4f}\trecall {:.4f}\tf1 {:.4f}".format(
                self.macro.precision, self.macro.recall, self.macro.f1
            )
        )
        if self.per_language:
            lines.append("")
            lines.append("lang\tn\tprecision\trecall\tf1")
            for lang, lm in sorted(self.per_language.items()):
                lines.append(
                    f"{lang}\t{lm.n}\t{lm.metrics.precision:.4f}"
                    f"\t{lm.metrics.recall:.4f}\t{lm.metrics.f1:.4f}"
                )
        return "\n".join(lines)


def _matrices_from_predictions(
    truths: list[Label], preds: list[Label]
) -> tuple[ConfusionMatrix, ConfusionMatrix]:
    tp = tn = fp = fn = 0
    for truth, pred in zip(truths, preds):
        if truth is Label.HATE:
            if pred is Label.HATE:
                tp += 1
            else:
                fn += 1
        else:
            if pred is Label.HATE:
                fp += 1
            else:
                tn += 1
    hate = ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)
    return hate, hate.swapped()


def stratified_folds(
    corpus: Corpus, k: int, seed: int
) -> list[list[int]]:
    """Seeded per-class split into k validation index groups.

    Every record lands in exactly one group; within each class the group
    sizes differ by at most one, which keeps the class ratio of every
    fold within one record of the global ratio.
    """
    rng = np.random.RandomState(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in (Label.HATE, Label.SAFE):
        positions = [i for i, r in enumerate(corpus) if r.label is label]
        order = rng.permutation(len(positions))
        for chunk, part in enumerate(np.array_split(order, k)):
            folds[chunk].extend(positions[i] for i in part)
    return [sorted(f) for f in folds]


def cross_validate(
    corpus: Corpus,
    k: int,
    config: TrainConfig = TrainConfig(),
    min_df: int = 1,
) -> CVReport:
    """Stratified k-fold cross-validation with per-fold vocabulary refit.

    The vocabulary is fit on each fold's training portion only, so the
    held-out texts never leak features into training. Fold seeds derive
    from the fold index, making the whole run deterministic for a fixed
    config regardless of evaluation order.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    unlabeled = [r.id for r in corpus if r.label is Label.UNLABELED]
    if unlabeled:
        shown = ", ".join(str(i) for i in unlabeled[:10])
        more = "..." if len(unlabeled) > 10 else ""
        raise ValueError(f"unlabeled records present: ids {shown}{more}")
    n_hate = corpus.count(Label.HATE)
    n_safe = corpus.count(Label.SAFE)
    if k > min(n_hate, n_safe):
        raise ValueError(
            f"k={k} exceeds the smaller class count "
            f"(HATE={n_hate}, SAFE={n_safe})"
        )
    folds = stratified_folds(corpus, k, config.seed)
    records = corpus.records
    fold_reports: list[FoldReport] = []
    matrix_pairs: list[tuple[ConfusionMatrix, ConfusionMatrix]] = []
    lang_truths: dict[str, list[Label]] = {}
    lang_preds: dict[str, list[Label]] = {}
    for fold_idx, val_positions in enumerate(folds):
        val_set = set(val_positions)
        train_records = tuple(
            r for i, r in enumerate(records) if i not in val_set
        )
        train_corpus_ = Corpus(train_records)
        vocab = fit_vocabulary(train_corpus_, min_df=min_df)
        vectors = vectorize_corpus(train_corpus_, vocab)
        labels = [r.label for r in train_records]
        fold_config = TrainConfig(
            C=config.C,
            tolerance=config.tolerance,
            max_iterations=config.max_iterations,
            seed=config.seed + fold_idx,
        )
        model = train(vectors, labels, vocab, fold_config)
        truths: list[Label] = []
        preds: list[Label] = []
        for pos in val_positions:
            rec = records[pos]
            pred = predict(model, rec.text).label
            truths.append(rec.label)
            preds.append(pred)
            if rec.lang:
                lang_truths.setdefault(rec.lang, []).append(rec.label)
                lang_preds.setdefault(rec.lang, []).append(pred)
        hate_cm, safe_cm = _matrices_from_predictions(truths, preds)
        matrix_pairs.append((hate_cm, safe_cm))
        fold_reports.append(
            FoldReport(
                fold=fold_idx + 1,
                hate=hate_cm,
                safe=safe_cm,
                metrics=macro_metrics([(hate_cm, safe_cm)]),
            )
        )
    per_language = {}
    for lang in lang_truths:
        pair = _matrices_from_predictions(lang_truths[lang], lang_preds[lang])
        per_language[lang] = LanguageMetrics(
            n=len(lang_truths[lang]), metrics=macro_metrics([pair])
        )
    return CVReport(
        k=k,
        folds=tuple(fold_reports),
        macro=macro_metrics(matrix_pairs),
        per_language=per_language,
    )


@dataclass(frozen=True)
class DomainReport:
    accuracy: float
    flag_rate_hate: float | None  # fraction of true-HATE records flagged HATE
    flag_rate_safe: float | None  # fraction of true-SAFE records flagged HATE
    n_hate: int
    n_safe: int

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "flag_rate_hate": self.flag_rate_hate,
            "flag_rate_safe": self.flag_rate_safe,
            "n_hate": self.n_hate,
            "n_safe": self.n_safe,
        }


def cross_domain_eval(model: LinearModel, corpus: Corpus) -> DomainReport:
    """Score a labeled out-of-domain corpus with a fixed model."""
    if len(corpus) == 0:
        raise ValueError("cannot evaluate an empty corpus")
    unlabeled = [r.id for r in corpus if r.label is Label.UNLABELED]
    if unlabeled:
        shown = ", ".join(str(i) for i in unlabeled[:10])
        raise ValueError(f"unlabeled records present: ids {shown}")
    correct = 0
    flagged = {Label.HATE: 0, Label.SAFE: 0}
    totals = {Label.HATE: 0, Label.SAFE: 0}
    for rec in corpus:
        pred = predict(model, rec.text).label
        totals[rec.label] += 1
        if pred is rec.label:
            correct += 1
        if pred is Label.HATE:
            flagged[rec.label] += 1
    def rate(label):
        return flagged[label] / totals[label] if totals[label] else None
    return DomainReport(
        accuracy=correct / len(corpus),
        flag_rate_hate=rate(Label.HATE),
        flag_rate_safe=rate(Label.SAFE),
        n_hate=totals[Label.HATE],
        n_safe=totals[Label.SAFE],
    )
