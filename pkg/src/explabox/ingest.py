"""Dataset loading, validation, named splits, tokenization and tf-idf vectors.

Everything downstream (statistics, metrics, explanations, tests) works on the
immutable :class:`Dataset` built here. Data comes from local CSV/TSV/JSONL
files described by a single JSON project manifest::

    {
      "task": "classification",
      "data": [
        {"path": "train.csv", "format": "csv", "split": "train",
         "text_field": "text", "label_field": "label",
         "id_field": "id", "attribute_fields": ["country"]}
      ],
      "labels": ["neg", "pos"],
      "seed": 0
    }

`labels` is optional; when absent the label space is the sorted set of gold
labels seen in the data.
"""

from __future__ import annotations

import csv
import json
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._util import content_hash

TASKS = ("classification", "regression")
FORMATS = ("csv", "tsv", "jsonl")


class IngestError(ValueError):
    """Manifest, file or schema problem found while loading data."""


class UnknownSplitError(IngestError):
    """A split name that the dataset does not define."""


@dataclass(frozen=True)
class Instance:
    """One text with optional gold label and string attributes."""

    id: str
    text: str
    gold: str | float | None = None
    attributes: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class TokenizedInstance:
    instance_id: str
    tokens: tuple[str, ...]
    distinct_tokens: tuple[str, ...]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on Unicode whitespace, strip edge punctuation.

    Deterministic and language-agnostic; empty text yields an empty list.
    """
    out: list[str] = []
    for piece in text.lower().split():
        start, end = 0, len(piece)
        while start < end and unicodedata.category(piece[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(piece[end - 1]).startswith("P"):
            end -= 1
        if start < end:
            out.append(piece[start:end])
    return out


def _distinct(tokens: Sequence[str]) -> tuple[str, ...]:
    # dict preserves first-occurrence order
    return tuple(dict.fromkeys(tokens))


def tokenized_instance(instance: Instance) -> TokenizedInstance:
    tokens = tuple(tokenize(instance.text))
    return TokenizedInstance(instance.id, tokens, _distinct(tokens))


@dataclass(frozen=True)
class Dataset:
    """Immutable corpus: instances keyed by id plus named ordered splits."""

    task: str
    instances: dict[str, Instance]
    splits: dict[str, tuple[str, ...]]
    labels: tuple[str, ...] = ()
    _token_cache: dict[str, TokenizedInstance] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise IngestError(f"unknown task {self.task!r}")
        if self.task == "classification" and not self.labels:
            raise IngestError("classification dataset needs a non-empty label list")
        for name, ids in self.splits.items():
            if len(set(ids)) != len(ids):
                raise IngestError(f"split {name!r} contains duplicate ids")
            for iid in ids:
                if iid not in self.instances:
                    raise IngestError(f"split {name!r} references unknown id {iid!r}")
        for instance in self.instances.values():
            self._check_gold(instance)

    def _check_gold(self, instance: Instance) -> None:
        if instance.gold is None:
            return
        if self.task == "classification":
            if instance.gold not in self.labels:
                raise IngestError(
                    f"instance {instance.id!r}: label {instance.gold!r} outside "
                    f"declared space {list(self.labels)}"
                )
        elif not math.isfinite(float(instance.gold)):
            raise IngestError(f"instance {instance.id!r}: non-finite gold value")

    def split_ids(self, name: str) -> tuple[str, ...]:
        try:
            return self.splits[name]
        except KeyError:
            raise UnknownSplitError(f"unknown split {name!r}") from None

    def split_instances(self, name: str) -> list[Instance]:
        return [self.instances[iid] for iid in self.split_ids(name)]

    def tokenized(self, instance_id: str) -> TokenizedInstance:
        cached = self._token_cache.get(instance_id)
        if cached is None:
            cached = tokenized_instance(self.instances[instance_id])
            self._token_cache[instance_id] = cached
        return cached

    def content_hash(self) -> str:
        """Stable hash over task, labels, instances and splits."""
        body = {
            "task": self.task,
            "labels": list(self.labels),
            "instances": [
                {
                    "id": i.id,
                    "text": i.text,
                    "gold": i.gold,
                    "attributes": dict(sorted(i.attributes.items())),
                }
                for i in sorted(self.instances.values(), key=lambda i: i.id)
            ],
            "splits": {k: list(v) for k, v in sorted(self.splits.items())},
        }
        raw = json.dumps(body, sort_keys=True, ensure_ascii=False).encode("utf-8")
        return content_hash(raw, digest_size=32)


def assign_split(dataset: Dataset, name: str, ids: Sequence[str]) -> Dataset:
    """Return a dataset with split `name` set to `ids` (replacing any old list)."""
    seen: set[str] = set()
    for iid in ids:
        if iid not in dataset.instances:
            raise IngestError(f"unknown id {iid!r}")
        if iid in seen:
            raise IngestError(f"duplicate id {iid!r} in split {name!r}")
        seen.add(iid)
    splits = dict(dataset.splits)
    splits[name] = tuple(ids)
    return Dataset(dataset.task, dict(dataset.instances), splits, dataset.labels)


# ---------------------------------------------------------------------------
# Manifest loading


def load_manifest(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise IngestError(f"manifest file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        try:
            manifest = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestError(f"manifest is not valid JSON: {exc}") from exc
    manifest.setdefault("_base_dir", str(path.parent))
    return manifest


def _iter_rows(path: Path, fmt: str) -> Iterable[Mapping[str, object]]:
    if fmt in ("csv", "tsv"):
        delim = "," if fmt == "csv" else "\t"
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh, delimiter=delim)
            if reader.fieldnames is None:
                return
            yield from reader
    elif fmt == "jsonl":
        with path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"{path}:{line_no}: invalid JSON line: {exc}") from exc
    else:
        raise IngestError(f"unknown format {fmt!r} (expected one of {list(FORMATS)})")


def _field(row: Mapping[str, object], name: str, path: Path) -> object:
    if name not in row:
        raise IngestError(f"{path}: missing column {name!r}")
    return row[name]


def _parse_gold(raw: object, task: str, path: Path) -> str | float | None:
    if raw is None:
        return None
    if isinstance(raw, str) and raw == "":
        return None
    if task == "classification":
        return str(raw)
    try:
        value = float(raw)  # type: ignore[arg-type]
    except (TypeError, ValueError):
        raise IngestError(f"{path}: non-numeric gold value {raw!r} for regression") from None
    if not math.isfinite(value):
        raise IngestError(f"{path}: non-finite gold value {raw!r}")
    return value


def load_dataset(manifest: Mapping[str, object] | str | Path) -> Dataset:
    """Build a validated Dataset from a project manifest (dict or file path)."""
    if isinstance(manifest, (str, Path)):
        manifest = load_manifest(manifest)
    task = manifest.get("task")
    if task not in TASKS:
        raise IngestError(f"manifest task must be one of {list(TASKS)}, got {task!r}")
    sources = manifest.get("data")
    if not isinstance(sources, list) or not sources:
        raise IngestError("manifest needs a non-empty 'data' list")
    base_dir = Path(str(manifest.get("_base_dir", ".")))

    instances: dict[str, Instance] = {}
    splits: dict[str, list[str]] = {}
    row_counters: dict[str, int] = {}

    for source in sources:
        path = Path(str(source["path"]))
        if not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            raise IngestError(f"data file not found: {path}")
        fmt = str(source.get("format", path.suffix.lstrip(".").lower()))
        split = str(source.get("split", "all"))
        text_field = str(source["text_field"])
        label_field = source.get("label_field")
        id_field = source.get("id_field")
        attribute_fields = [str(a) for a in source.get("attribute_fields", [])]

        split_rows = splits.setdefault(split, [])
        for row in _iter_rows(path, fmt):
            text = _field(row, text_field, path)
            if text is None:
                raise IngestError(f"{path}: null text value")
            gold = None
            if label_field is not None:
                gold = _parse_gold(_field(row, str(label_field), path), task, path)
            if id_field is not None:
                iid = str(_field(row, str(id_field), path))
            else:
                index = row_counters.get(split, 0)
                row_counters[split] = index + 1
                iid = f"{split}-{index}"
            if iid in instances:
                raise IngestError(f"duplicate id {iid!r}")
            attributes = {}
            for attr in attribute_fields:
                value = _field(row, attr, path)
                if value is not None:
                    attributes[attr] = str(value)
            instances[iid] = Instance(id=iid, text=str(text), gold=gold, attributes=attributes)
            split_rows.append(iid)

    if not instances:
        raise IngestError("empty dataset: no rows loaded")

    labels: tuple[str, ...] = ()
    if task == "classification":
        declared = manifest.get("labels")
        if declared:
            labels = tuple(str(label) for label in declared)
        else:
            labels = tuple(sorted({str(i.gold) for i in instances.values() if i.gold is not None}))
        if not labels:
            raise IngestError("classification dataset: declare 'labels' or provide gold labels")

    return Dataset(
        task=str(task),
        instances=instances,
        splits={k: tuple(v) for k, v in splits.items()},
        labels=labels,
    )


# ---------------------------------------------------------------------------
# tf-idf vectors


@dataclass(frozen=True)
class TfidfIndex:
    """Dense tf-idf rows for one split; rows are L2-normalized.

    tf is the raw count, idf = ln((1+N)/(1+df)) + 1. Documents with no
    tokens get a zero row and are listed in `degenerate`.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray
    row_ids: tuple[str, ...]
    vectors: np.ndarray
    degenerate: tuple[str, ...]

    def row(self, instance_id: str) -> np.ndarray:
        return self.vectors[self.row_ids.index(instance_id)]

    def rows(self, ids: Sequence[str]) -> np.ndarray:
        index = {iid: k for k, iid in enumerate(self.row_ids)}
        return self.vectors[[index[i] for i in ids]]


def build_tfidf(dataset: Dataset, split: str) -> TfidfIndex:
    ids = dataset.split_ids(split)
    if not ids:
        raise IngestError(f"split {split!r} is empty")
    docs = [dataset.tokenized(iid).tokens for iid in ids]
    vocab = sorted({tok for doc in docs for tok in doc})
    columns = {tok: j for j, tok in enumerate(vocab)}

    n_docs = len(docs)
    df = np.zeros(len(vocab))
    for doc in docs:
        for tok in set(doc):
            df[columns[tok]] += 1
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0

    vectors = np.zeros((n_docs, len(vocab)))
    degenerate = []
    for k, doc in enumerate(docs):
        for tok in doc:
            vectors[k, columns[tok]] += 1.0
        vectors[k] *= idf
        norm = np.linalg.norm(vectors[k])
        if norm > 0:
            vectors[k] /= norm
        else:
            degenerate.append(ids[k])
    return TfidfIndex(
        vocabulary=columns,
        idf=idf,
        row_ids=tuple(ids),
        vectors=vectors,
        degenerate=tuple(degenerate),
    )
