import json
import sys
from pathlib import Path

import pytest

from explabox.bridge import train_baseline, wrap_callable
from explabox.ingest import Dataset, Instance

STUB_DIR = Path(__file__).parent / "stubs"


def stub_command(name: str, *args: str) -> list[str]:
    return [sys.executable, str(STUB_DIR / name), *args]


@pytest.fixture
def tiny_dataset() -> Dataset:
    """Two-instance corpus behind the hand-computable baseline examples."""
    return Dataset(
        task="classification",
        instances={
            "t1": Instance("t1", "good", "pos"),
            "t2": Instance("t2", "bad", "neg"),
        },
        splits={"train": ("t1", "t2")},
        labels=("neg", "pos"),
    )


@pytest.fixture
def tiny_baseline(tiny_dataset):
    return train_baseline(tiny_dataset, "train")


def build_dataset(rows, task="classification", labels=None, split="test"):
    """rows: list of (id, text, gold) or (id, text, gold, attributes)."""
    instances = {}
    order = []
    for row in rows:
        iid, text, gold = row[0], row[1], row[2]
        attributes = row[3] if len(row) > 3 else {}
        instances[iid] = Instance(iid, text, gold, attributes)
        order.append(iid)
    if labels is None and task == "classification":
        labels = tuple(sorted({str(r[2]) for r in rows if r[2] is not None}))
    return Dataset(
        task=task,
        instances=instances,
        splits={split: tuple(order)},
        labels=tuple(labels) if labels else (),
    )


def fixed_classifier(outputs_by_text, labels=("neg", "pos")):
    """Handle that replays a fixed text -> probability-row mapping."""
    return wrap_callable(
        lambda texts: [outputs_by_text[t] for t in texts],
        task="classification",
        labels=tuple(labels),
        name=f"fixed-{len(outputs_by_text)}",
    )


def fixed_regressor(scores_by_text):
    return wrap_callable(
        lambda texts: [scores_by_text[t] for t in texts],
        task="regression",
        name=f"fixed-reg-{len(scores_by_text)}",
    )


def additive_regressor(coefficients: dict[str, float], intercept: float = 0.0):
    """Regression backend linear in distinct-token presence (whitespace tokens)."""

    def fn(texts):
        out = []
        for text in texts:
            present = set(text.split())
            out.append(intercept + sum(c for tok, c in coefficients.items() if tok in present))
        return out

    return wrap_callable(fn, task="regression", name=f"additive-{sorted(coefficients)}")


@pytest.fixture
def manifest_dir(tmp_path) -> Path:
    """Small CSV corpus + manifest with an attribute column, on disk."""
    (tmp_path / "train.csv").write_text(
        "text,label,country\n"
        "good movie,pos,US\n"
        "a good one,pos,NL\n"
        "bad film,neg,US\n"
        "really bad,neg,NL\n",
        encoding="utf-8",
    )
    (tmp_path / "test.csv").write_text(
        "text,label,country\n"
        "good stuff,pos,US\n"
        "bad vibes,neg,NL\n"
        "so good,pos,NL\n"
        "awful bad thing,neg,US\n",
        encoding="utf-8",
    )
    manifest = {
        "task": "classification",
        "data": [
            {
                "path": "train.csv",
                "format": "csv",
                "split": "train",
                "text_field": "text",
                "label_field": "label",
                "attribute_fields": ["country"],
            },
            {
                "path": "test.csv",
                "format": "csv",
                "split": "test",
                "text_field": "text",
                "label_field": "label",
                "attribute_fields": ["country"],
            },
        ],
        "seed": 0,
    }
    (tmp_path / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    return tmp_path
