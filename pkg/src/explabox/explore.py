"""Descriptive statistics plus slicing/sorting over named splits."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .ingest import Dataset, IngestError


@dataclass(frozen=True)
class LengthSummary:
    min: float
    max: float
    mean: float
    median: float
    std: float


@dataclass(frozen=True)
class SplitStats:
    split: str
    n_instances: int
    label_counts: dict[str, int]
    char_length: LengthSummary
    token_length: LengthSummary
    vocabulary_size: int
    top_tokens: list[tuple[str, int]]


def _summary(values: list[int]) -> LengthSummary:
    arr = np.asarray(values, dtype=float)
    return LengthSummary(
        min=float(arr.min()),
        max=float(arr.max()),
        mean=float(arr.mean()),
        median=float(np.median(arr)),
        std=float(arr.std()),  # population std: no n=1 special case
    )


def describe(dataset: Dataset, split: str, k_top: int = 10) -> SplitStats:
    """Split-level statistics; order-independent by construction."""
    instances = dataset.split_instances(split)
    if not instances:
        raise IngestError(f"split {split!r} is empty")

    label_counts: Counter[str] = Counter()
    if dataset.task == "classification":
        label_counts.update(str(i.gold) for i in instances if i.gold is not None)

    token_lists = [dataset.tokenized(i.id).tokens for i in instances]
    token_freq: Counter[str] = Counter()
    for tokens in token_lists:
        token_freq.update(tokens)
    top = sorted(token_freq.items(), key=lambda kv: (-kv[1], kv[0]))[:k_top]

    return SplitStats(
        split=split,
        n_instances=len(instances),
        label_counts={label: label_counts[label] for label in sorted(label_counts)},
        char_length=_summary([len(i.text) for i in instances]),
        token_length=_summary([len(t) for t in token_lists]),
        vocabulary_size=len(token_freq),
        top_tokens=top,
    )


SORT_KEYS = ("char_len", "token_len", "id")


def sort_instances(
    dataset: Dataset, split: str, key: str = "id", descending: bool = False
) -> list[str]:
    """Stable sort of split ids by the given key; ties always break id-ascending."""
    if key not in SORT_KEYS:
        raise IngestError(f"unknown sort key {key!r} (expected one of {list(SORT_KEYS)})")
    ids = sorted(dataset.split_ids(split))
    if key == "id":
        return list(reversed(ids)) if descending else ids
    if key == "char_len":
        keyfunc = lambda iid: len(dataset.instances[iid].text)
    else:
        keyfunc = lambda iid: len(dataset.tokenized(iid).tokens)
    # stable sort keeps the id-ascending pre-order for equal keys, also when reversed
    return sorted(ids, key=keyfunc, reverse=descending)


@dataclass(frozen=True)
class Predicate:
    """Filter predicate: label equality, token containment or char-length range."""

    kind: str  # "label" | "contains-token" | "len-range"
    value: str | None = None
    lo: int | None = None
    hi: int | None = None


def filter_instances(dataset: Dataset, split: str, predicate: Predicate) -> list[str]:
    """Ids matching the predicate, in split order."""
    ids = dataset.split_ids(split)
    if predicate.kind == "label":
        if dataset.task == "classification" and predicate.value not in dataset.labels:
            raise IngestError(f"unknown label value {predicate.value!r}")
        return [
            iid
            for iid in ids
            if dataset.instances[iid].gold is not None
            and str(dataset.instances[iid].gold) == predicate.value
        ]
    if predicate.kind == "contains-token":
        return [iid for iid in ids if predicate.value in dataset.tokenized(iid).distinct_tokens]
    if predicate.kind == "len-range":
        lo = predicate.lo if predicate.lo is not None else 0
        hi = predicate.hi if predicate.hi is not None else float("inf")
        return [iid for iid in ids if lo <= len(dataset.instances[iid].text) <= hi]
    raise IngestError(f"unknown predicate kind {predicate.kind!r}")
