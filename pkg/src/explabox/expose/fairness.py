"""Group fairness metrics over a protected attribute.

Groups are the distinct values of one instance attribute within a split.
Classification reports rate-based gaps (demographic parity, equal
opportunity, equalized odds) against a designated positive label;
regression reports per-group losses plus a decile-grid KS statistic on the
prediction distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bridge import PredictorHandle
from ..ingest import Dataset
from .perturb import ExposeError


@dataclass(frozen=True)
class GroupStats:
    group: str
    n: int
    n_labeled: int
    positive_rate: float
    tpr: float | None
    fpr: float | None
    accuracy: float | None


@dataclass(frozen=True)
class ClassificationFairness:
    attribute: str
    positive_label: str
    groups: tuple[GroupStats, ...]
    demographic_parity_diff: float
    demographic_parity_ratio: float
    equal_opportunity_diff: float | None
    equalized_odds_diff: float | None
    excluded_groups: tuple[str, ...]
    n_missing_attribute: int
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class RegressionGroupStats:
    group: str
    n: int
    n_labeled: int
    mean_prediction: float
    loss: float | None


@dataclass(frozen=True)
class RegressionFairness:
    attribute: str
    loss_kind: str
    groups: tuple[RegressionGroupStats, ...]
    group_loss_max: float | None
    dp_ks_diff: float
    excluded_groups: tuple[str, ...]
    n_missing_attribute: int
    flags: tuple[str, ...] = ()


def _grouped(dataset: Dataset, split: str, attribute: str):
    instances = dataset.split_instances(split)
    groups: dict[str, list] = {}
    missing = 0
    for instance in instances:
        value = instance.attributes.get(attribute)
        if value is None:
            missing += 1
            continue
        groups.setdefault(value, []).append(instance)
    if not groups:
        raise ExposeError(f"attribute {attribute!r} missing on all instances of {split!r}")
    if len(groups) < 2:
        raise ExposeError(f"attribute {attribute!r} has fewer than 2 groups in {split!r}")
    return dict(sorted(groups.items())), missing


def fairness_classification(
    dataset: Dataset,
    split: str,
    handle: PredictorHandle,
    attribute: str,
    positive_label: str | None = None,
) -> ClassificationFairness:
    if dataset.task != "classification":
        raise ExposeError("classification fairness requires a classification task")
    flags: list[str] = []
    if positive_label is None:
        positive_label = dataset.labels[-1]
        flags.append(f"positive label defaulted to {positive_label!r}")
    elif positive_label not in dataset.labels:
        raise ExposeError(f"unknown positive label {positive_label!r}")

    groups, missing = _grouped(dataset, split, attribute)
    stats: list[GroupStats] = []
    for name, members in groups.items():
        preds = handle.argmax_labels([m.text for m in members])
        pred_pos = np.array([p == positive_label for p in preds])
        labeled = np.array([m.gold is not None for m in members])
        gold_pos = np.array([m.gold is not None and str(m.gold) == positive_label for m in members])
        n_labeled = int(labeled.sum())
        n_gold_pos = int(gold_pos.sum())
        n_gold_neg = n_labeled - n_gold_pos
        tpr = float(pred_pos[gold_pos].mean()) if n_gold_pos else None
        fpr = float(pred_pos[labeled & ~gold_pos].mean()) if n_gold_neg else None
        if n_labeled:
            correct = [
                p == str(m.gold) for m, p in zip(members, preds) if m.gold is not None
            ]
            accuracy = float(np.mean(correct))
        else:
            accuracy = None
        stats.append(
            GroupStats(
                group=name,
                n=len(members),
                n_labeled=n_labeled,
                positive_rate=float(pred_pos.mean()),
                tpr=tpr,
                fpr=fpr,
                accuracy=accuracy,
            )
        )

    rates = [g.positive_rate for g in stats]
    dp_diff = max(rates) - min(rates)
    if max(rates) == 0.0:
        dp_ratio = 1.0
        flags.append("demographic parity ratio 0/0 -> 1")
    else:
        dp_ratio = min(rates) / max(rates)

    tprs = [g.tpr for g in stats if g.tpr is not None]
    fprs = [g.fpr for g in stats if g.fpr is not None]
    eo_diff = max(tprs) - min(tprs) if len(tprs) >= 2 else None
    if len(tprs) >= 2 and len(fprs) >= 2:
        eodds_diff = max(max(tprs) - min(tprs), max(fprs) - min(fprs))
    else:
        eodds_diff = None
    if eo_diff is None:
        flags.append("equal opportunity undefined: fewer than 2 groups with gold positives")
    excluded = tuple(g.group for g in stats if g.n_labeled == 0)
    return ClassificationFairness(
        attribute=attribute,
        positive_label=positive_label,
        groups=tuple(stats),
        demographic_parity_diff=dp_diff,
        demographic_parity_ratio=dp_ratio,
        equal_opportunity_diff=eo_diff,
        equalized_odds_diff=eodds_diff,
        excluded_groups=excluded,
        n_missing_attribute=missing,
        flags=tuple(flags),
    )


def fairness_regression(
    dataset: Dataset,
    split: str,
    handle: PredictorHandle,
    attribute: str,
    loss: str = "mae",
) -> RegressionFairness:
    if dataset.task != "regression":
        raise ExposeError("regression fairness requires a regression task")
    if loss not in ("mae", "mse"):
        raise ExposeError(f"loss must be mae or mse, got {loss!r}")
    groups, missing = _grouped(dataset, split, attribute)

    all_preds: list[float] = []
    group_preds: dict[str, np.ndarray] = {}
    stats: list[RegressionGroupStats] = []
    for name, members in groups.items():
        preds = handle.predict_scores([m.text for m in members])
        group_preds[name] = preds
        all_preds.extend(float(p) for p in preds)
        golds = np.array([float(m.gold) for m in members if m.gold is not None])
        labeled_preds = np.array(
            [float(p) for m, p in zip(members, preds) if m.gold is not None]
        )
        if golds.size:
            err = labeled_preds - golds
            value = float(np.abs(err).mean()) if loss == "mae" else float((err**2).mean())
        else:
            value = None
        stats.append(
            RegressionGroupStats(
                group=name,
                n=len(members),
                n_labeled=int(golds.size),
                mean_prediction=float(preds.mean()),
                loss=value,
            )
        )

    losses = [g.loss for g in stats if g.loss is not None]
    flags: list[str] = []
    if not losses:
        flags.append("no gold values: group losses undefined")

    # demographic parity for regression: max KS gap between each group's
    # prediction CDF and the pooled CDF, evaluated on the pooled deciles
    pooled = np.asarray(all_preds)
    grid = np.quantile(pooled, np.linspace(0.1, 0.9, 9))
    ks = 0.0
    for preds in group_preds.values():
        for z in grid:
            gap = abs(float((preds <= z).mean()) - float((pooled <= z).mean()))
            ks = max(ks, gap)

    return RegressionFairness(
        attribute=attribute,
        loss_kind=loss,
        groups=tuple(stats),
        group_loss_max=max(losses) if losses else None,
        dp_ks_diff=ks,
        excluded_groups=tuple(g.group for g in stats if g.n_labeled == 0),
        n_missing_attribute=missing,
        flags=tuple(flags),
    )
