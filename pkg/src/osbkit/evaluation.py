"""Confusion matrix with the per-class TP/TN/FP/FN decomposition, the four
summary metrics, and the repeated k-fold cross-validation harness.

The confusion matrix is indexed counts[predicted][actual] using 0-based class
indices (class code - 1). Normalization is always fit on the training folds
only and applied to the held-out fold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core_data import (
    BiomarkerVector,
    Dataset,
    OcdClass,
    make_folds,
    normalize_dataset,
    normalize_fit,
)

N_CLASSES = 3

# trainer(normalized training set, seed) -> predict(normalized biomarker vector) -> class
Trainer = Callable[[Dataset, int], Callable[[BiomarkerVector], OcdClass]]


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        a = np.asarray(self.counts)
        if a.shape != (N_CLASSES, N_CLASSES) or np.any(a < 0):
            raise EvaluationError("confusion matrix must be 3x3 with non-negative counts")

    @property
    def total(self) -> int:
        return int(np.sum(self.counts))

    def region_counts(self, c: OcdClass) -> tuple[int, int, int, int]:
        """(TP, TN, FP, FN) for one class: TP is the diagonal cell, FP the rest
        of the predicted row, FN the rest of the actual column, TN everything
        outside that row and column."""
        a = np.asarray(self.counts)
        i = int(c) - 1
        tp = int(a[i, i])
        fp = int(a[i].sum() - a[i, i])
        fn = int(a[:, i].sum() - a[i, i])
        tn = int(a.sum() - tp - fp - fn)
        return tp, tn, fp, fn


@dataclass(frozen=True)
class MetricsReport:
    overall_accuracy: float
    precision: float
    recall: float
    f1: float
    per_class: dict[OcdClass, tuple[int, int, int, int]]

    def as_dict(self) -> dict[str, float]:
        return {
            "overall_accuracy": self.overall_accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


def build_confusion(preds: Sequence[OcdClass], labels: Sequence[OcdClass]) -> ConfusionMatrix:
    if len(preds) != len(labels):
        raise EvaluationError(f"length mismatch: {len(preds)} predictions, {len(labels)} labels")
    if len(preds) == 0:
        raise EvaluationError("need at least one prediction")
    a = np.zeros((N_CLASSES, N_CLASSES), dtype=int)
    for p, y in zip(preds, labels):
        a[int(p) - 1, int(y) - 1] += 1
    return ConfusionMatrix(tuple(tuple(int(v) for v in row) for row in a))


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Overall accuracy is the class-macro mean of (TP+TN)/N; precision and
    recall are micro-averaged over pooled counts."""
    if cm.total == 0:
        raise EvaluationError("empty confusion matrix")
    per_class = {c: cm.region_counts(c) for c in OcdClass}
    n = cm.total
    overall = sum((tp + tn) / n for tp, tn, _, _ in per_class.values()) / N_CLASSES
    sum_tp = sum(tp for tp, _, _, _ in per_class.values())
    sum_fp = sum(fp for _, _, fp, _ in per_class.values())
    sum_fn = sum(fn for _, _, _, fn in per_class.values())
    precision = sum_tp / (sum_tp + sum_fp)
    recall = sum_tp / (sum_tp + sum_fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return MetricsReport(overall, precision, recall, f1, per_class)


@dataclass(frozen=True)
class RoundResult:
    round_index: int
    repeat: int
    fold: int
    metrics: MetricsReport


@dataclass(frozen=True)
class CrossValidationReport:
    mean: dict[str, float]
    rounds: tuple[RoundResult, ...]


def cross_validate(
    trainer: Trainer,
    data: Dataset,
    k: int = 3,
    repeats: int = 3,
    seed: int = 0,
    n1: float = 0.0,
    n2: float = 1.0,
) -> CrossValidationReport:
    """Repeated k-fold cross-validation with a full reshuffle per repeat.

    Every rotation fits normalization on its k-1 training folds, trains via the
    supplied trainer with a per-round derived seed, and evaluates on the
    held-out fold. The report carries the mean of each metric over all
    k * repeats rounds plus the per-round breakdown.
    """
    if k < 2 or repeats < 1:
        raise EvaluationError("need k >= 2 and repeats >= 1")
    counts = Dataset(data.samples).class_counts()
    shallow = [c.name for c in OcdClass if counts[c] < k]
    if shallow:
        raise EvaluationError(f"each class needs >= k samples; too few in: {', '.join(shallow)}")
    rounds = []
    round_index = 0
    for repeat in range(repeats):
        plan_seed = int(np.random.SeedSequence([seed, repeat]).generate_state(1)[0])
        plan = make_folds(len(data), k, plan_seed)
        for fold in range(k):
            test_idx = plan.folds[fold]
            train_idx = [i for j, f in enumerate(plan.folds) if j != fold for i in f]
            train_set = data.subset(train_idx)
            test_set = data.subset(test_idx)
            tc = train_set.class_counts()
            if any(tc[c] == 0 for c in OcdClass):
                raise EvaluationError(
                    f"round {round_index}: a class is absent from the training split"
                )
            params = normalize_fit(train_set, n1, n2)
            round_seed = int(
                np.random.SeedSequence([seed, repeat, fold]).generate_state(1)[0]
            )
            predict = trainer(normalize_dataset(params, train_set), round_seed)
            norm_test = normalize_dataset(params, test_set)
            preds = [predict(s.features) for s in norm_test]
            metrics = compute_metrics(build_confusion(preds, [s.label for s in test_set]))
            rounds.append(RoundResult(round_index, repeat, fold, metrics))
            round_index += 1
    keys = ("overall_accuracy", "precision", "recall", "f1")
    mean = {key: float(np.mean([r.metrics.as_dict()[key] for r in rounds])) for key in keys}
    return CrossValidationReport(mean=mean, rounds=tuple(rounds))


def metrics_csv(report: MetricsReport) -> str:
    return "metric,value\n" + "".join(
        f"{k},{v:.17g}\n" for k, v in report.as_dict().items()
    )


def rounds_csv(report: CrossValidationReport) -> str:
    out = ["round,repeat,fold,overall_accuracy,precision,recall,f1\n"]
    for r in report.rounds:
        d = r.metrics.as_dict()
        out.append(
            f"{r.round_index},{r.repeat},{r.fold},{d['overall_accuracy']:.17g},"
            f"{d['precision']:.17g},{d['recall']:.17g},{d['f1']:.17g}\n"
        )
    return "".join(out)
