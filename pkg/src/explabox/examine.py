"""Model performance metrics and correct/incorrect drill-down.

Every metric in the output tables carries a citation string from
METRIC_REFERENCES explaining where its definition comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bridge import PredictorHandle
from .ingest import Dataset

METRIC_REFERENCES = {
    "accuracy": "Fraction of instances whose predicted label equals the gold label.",
    "precision": "tp / (tp + fp) per label; Sokolova & Lapalme (2009), Information Processing & Management 45(4).",
    "recall": "tp / (tp + fn) per label; Sokolova & Lapalme (2009), Information Processing & Management 45(4).",
    "f1": "Harmonic mean of precision and recall; van Rijsbergen (1979), Information Retrieval.",
    "macro": "Unweighted mean of the per-label scores.",
    "weighted": "Mean of the per-label scores weighted by gold support.",
    "micro": "Scores from pooled true/false positive counts; equals accuracy for single-label classification.",
    "mae": "Mean absolute error between gold values and predicted scores.",
    "mse": "Mean squared error between gold values and predicted scores.",
    "rmse": "Square root of the mean squared error.",
    "r2": "Coefficient of determination, 1 - SS_res / SS_tot; Draper & Smith (1998), Applied Regression Analysis.",
}


class ExamineError(ValueError):
    """Bad inputs to a metric computation (empty, mismatched, wrong task)."""


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # indexed [gold][pred]
    n_unlabeled: int = 0

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    per_label: dict[str, LabelMetrics]
    macro: dict[str, float]
    micro: dict[str, float]
    weighted: dict[str, float]
    flags: tuple[str, ...]
    references: dict[str, str] = field(default_factory=lambda: dict(METRIC_REFERENCES))


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    mse: float
    rmse: float
    r2: float | None
    n: int
    flags: tuple[str, ...]
    references: dict[str, str] = field(default_factory=lambda: dict(METRIC_REFERENCES))


def argmax_label(labels: tuple[str, ...], probabilities) -> str:
    """Highest-probability label; ties go to the lowest label index."""
    return labels[int(np.argmax(np.asarray(probabilities)))]


def confusion(dataset: Dataset, split: str, handle: PredictorHandle) -> ConfusionMatrix:
    """Gold-by-predicted counts over the labeled instances of a split."""
    if dataset.task != "classification":
        raise ExamineError("confusion matrix requires a classification task")
    instances = dataset.split_instances(split)
    labeled = [i for i in instances if i.gold is not None]
    if not labeled:
        raise ExamineError(f"split {split!r} has no gold-labeled instances")
    index = {label: k for k, label in enumerate(dataset.labels)}
    preds = handle.argmax_labels([i.text for i in labeled])
    counts = [[0] * len(dataset.labels) for _ in dataset.labels]
    for instance, pred in zip(labeled, preds):
        counts[index[str(instance.gold)]][index[pred]] += 1
    return ConfusionMatrix(
        labels=dataset.labels,
        counts=tuple(tuple(row) for row in counts),
        n_unlabeled=len(instances) - len(labeled),
    )


def _safe_rate(numerator: int, denominator: int, flag: str, flags: list[str]) -> float:
    if denominator == 0:
        flags.append(flag)
        return 0.0
    return numerator / denominator


def classification_metrics(cm: ConfusionMatrix) -> ClassificationMetrics:
    total = cm.total
    if total == 0:
        raise ExamineError("empty confusion matrix")
    n = len(cm.labels)
    flags: list[str] = []
    per_label: dict[str, LabelMetrics] = {}
    tp_sum = 0
    for i, label in enumerate(cm.labels):
        tp = cm.counts[i][i]
        fp = sum(cm.counts[g][i] for g in range(n)) - tp
        fn = sum(cm.counts[i]) - tp
        tp_sum += tp
        precision = _safe_rate(tp, tp + fp, f"precision[{label}]: 0/0 -> 0", flags)
        recall = _safe_rate(tp, tp + fn, f"recall[{label}]: 0/0 -> 0", flags)
        if precision + recall == 0:
            flags.append(f"f1[{label}]: 0/0 -> 0")
            f1 = 0.0
        else:
            f1 = 2 * precision * recall / (precision + recall)
        per_label[label] = LabelMetrics(precision, recall, f1, support=tp + fn)

    accuracy = tp_sum / total
    macro = {
        metric: sum(getattr(per_label[label], metric) for label in cm.labels) / n
        for metric in ("precision", "recall", "f1")
    }
    weighted = {
        metric: sum(
            getattr(per_label[label], metric) * per_label[label].support for label in cm.labels
        )
        / total
        for metric in ("precision", "recall", "f1")
    }
    # single-label: pooled tp equals pooled tp+fp and tp+fn, so all micro scores = accuracy
    micro = {"precision": accuracy, "recall": accuracy, "f1": accuracy}
    return ClassificationMetrics(
        accuracy=accuracy,
        per_label=per_label,
        macro=macro,
        micro=micro,
        weighted=weighted,
        flags=tuple(flags),
    )


def regression_metrics(gold, pred) -> RegressionMetrics:
    gold = np.asarray(gold, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if gold.shape != pred.shape:
        raise ExamineError(f"length mismatch: {gold.shape} vs {pred.shape}")
    if gold.size == 0:
        raise ExamineError("no values to score")
    if not (np.isfinite(gold).all() and np.isfinite(pred).all()):
        raise ExamineError("non-finite values")
    err = pred - gold
    mae = float(np.abs(err).mean())
    mse = float((err**2).mean())
    flags: list[str] = []
    ss_tot = float(((gold - gold.mean()) ** 2).sum())
    if ss_tot == 0.0:
        flags.append("r2: undefined for constant gold")
        r2 = None
    else:
        r2 = 1.0 - float((err**2).sum()) / ss_tot
    return RegressionMetrics(
        mae=mae, mse=mse, rmse=math.sqrt(mse), r2=r2, n=int(gold.size), flags=tuple(flags)
    )


def drilldown(
    dataset: Dataset, split: str, handle: PredictorHandle, gold: str, pred: str
) -> list[str]:
    """Ids (in split order) of labeled instances falling in one confusion cell."""
    for label in (gold, pred):
        if label not in dataset.labels:
            raise ExamineError(f"unknown label {label!r}")
    labeled = [i for i in dataset.split_instances(split) if i.gold is not None]
    preds = handle.argmax_labels([i.text for i in labeled])
    return [i.id for i, p in zip(labeled, preds) if str(i.gold) == gold and p == pred]
