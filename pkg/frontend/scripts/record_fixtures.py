#!/usr/bin/env python3
"""Record service responses as JSON fixtures for the UI contract tests.

Two sessions are recorded: the classification baseline over a small review
corpus (browse/explain/tests/fairness fixtures) and an additive regression
model (what-if fixtures, where exact Shapley weights equal the model's own
coefficients so delta signs are ground truth).

Run from the repo root: python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from explabox.bridge import train_baseline, wrap_callable
from explabox.ingest import Dataset, Instance
from explabox.service import create_app
from explabox.session import Session

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

ADDITIVE_COEFS = {"alpha": 0.5, "beta": 0.2, "gamma": -0.3}
ADDITIVE_INTERCEPT = 0.1


def classification_session() -> Session:
    rows = [
        ("train-0", "good movie", "pos", {"country": "US"}),
        ("train-1", "a good one", "pos", {"country": "NL"}),
        ("train-2", "bad film", "neg", {"country": "US"}),
        ("train-3", "really bad", "neg", {"country": "NL"}),
        ("test-0", "good stuff", "pos", {"country": "US"}),
        ("test-1", "bad vibes", "neg", {"country": "NL"}),
        ("test-2", "so good", "pos", {"country": "NL"}),
        ("test-3", "awful bad thing", "neg", {"country": "US"}),
    ]
    instances = {r[0]: Instance(r[0], r[1], r[2], r[3]) for r in rows}
    dataset = Dataset(
        task="classification",
        instances=instances,
        splits={
            "train": tuple(r[0] for r in rows[:4]),
            "test": tuple(r[0] for r in rows[4:]),
        },
        labels=("neg", "pos"),
    )
    handle = train_baseline(dataset, "train")
    return Session(dataset, handle, seed=0, manifest_hash="fixture-corpus")


def additive_session() -> Session:
    def score(texts):
        out = []
        for text in texts:
            present = set(text.split())
            out.append(ADDITIVE_INTERCEPT + sum(c for t, c in ADDITIVE_COEFS.items() if t in present))
        return out

    dataset = Dataset(
        task="regression",
        instances={"r0": Instance("r0", "alpha beta gamma", 0.4)},
        splits={"test": ("r0",)},
    )
    handle = wrap_callable(score, task="regression", name="additive-fixture")
    return Session(dataset, handle, seed=0, manifest_hash="additive-fixture")


def save(name: str, body: dict) -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    (FIXTURE_DIR / name).write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", "utf-8")
    print(f"recorded {name}")


def main() -> None:
    client = TestClient(create_app(classification_session()))
    save("meta.json", client.get("/api/v1/meta").json())
    save(
        "instances_page.json",
        client.get("/api/v1/instances", params={"split": "test", "offset": 0, "limit": 25}).json(),
    )
    save(
        "drilldown.json",
        client.get(
            "/api/v1/examine/drilldown", params={"split": "test", "gold": "pos", "pred": "pos"}
        ).json(),
    )
    save(
        "attribution_lime.json",
        client.post(
            "/api/v1/explain", json={"method": "lime", "instance_id": "test-0", "seed": 3}
        ).json(),
    )
    suite = [
        {"type": "inv", "split": "test", "perturber": {"kind": "typo", "rate": 0.3}},
        {
            "type": "mft",
            "template": {"pattern": "good {city}", "providers": {}, "expected": "pos"},
            "n": 3,
        },
        {"type": "fuzz"},
    ]
    save("suite_results.json", client.post("/api/v1/expose/run", json={"suite": suite, "seed": 5}).json())
    save(
        "fairness.json",
        client.get("/api/v1/expose/fairness", params={"split": "test", "attribute": "country"}).json(),
    )

    whatif = TestClient(create_app(additive_session()))
    original_text = "alpha beta gamma"
    edited_text = "beta gamma"  # the top-attributed token (alpha, +0.5) removed
    save(
        "whatif_original_predict.json",
        whatif.post("/api/v1/predict", json={"texts": [original_text]}).json(),
    )
    save(
        "whatif_edited_predict.json",
        whatif.post("/api/v1/predict", json={"texts": [edited_text]}).json(),
    )
    save(
        "whatif_original_explain.json",
        whatif.post(
            "/api/v1/explain", json={"method": "exact-shapley", "text": original_text, "seed": 0}
        ).json(),
    )
    save(
        "whatif_edited_explain.json",
        whatif.post(
            "/api/v1/explain", json={"method": "exact-shapley", "text": edited_text, "seed": 0}
        ).json(),
    )


if __name__ == "__main__":
    main()
