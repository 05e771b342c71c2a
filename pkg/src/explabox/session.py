"""Shared analysis engine: one loaded dataset + model, digestible builders.

The CLI and the HTTP service are both thin clients of this class. Every
builder returns a Digestible whose canonical bytes are cached by
(operation, canonicalized params, seed), so identical requests give
byte-identical replies within a session; determinism of the underlying
operations extends that across sessions.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

from . import __version__
from ._util import derive_seed
from .bridge import PredictorHandle, spawn_external, train_baseline
from .examine import (
    ExamineError,
    classification_metrics,
    confusion,
    drilldown,
    regression_metrics,
)
from .explore import describe
from .ingest import Dataset, IngestError, TfidfIndex, build_tfidf, load_dataset, load_manifest
from .explain import (
    LimeParams,
    ShapParams,
    exact_shapley,
    kernel_shap,
    lime,
    prototypes_by_label,
    token_frequency,
    token_information,
)
from .expose import (
    ExposeError,
    Perturber,
    fairness_classification,
    fairness_regression,
    run_inv,
    run_suite_entry,
    security_fuzz,
)
from .ingest import Instance
from .report import (
    Digestible,
    Provenance,
    Report,
    canonical_json,
    report_meta,
    sha256_hex,
    to_plain,
)

MODEL_CMD_ENV = "EXPLABOX_MODEL_CMD"
EXPLAIN_METHODS = ("lime", "kernelshap", "exact-shapley")
GLOBAL_KINDS = ("token-frequency", "token-information", "prototypes", "criticisms")


class SessionError(RuntimeError):
    """Session-level configuration problem (no model, bad manifest...)."""


class Session:
    """One dataset + one predictor + caches, shared by CLI and service."""

    def __init__(
        self,
        dataset: Dataset,
        handle: PredictorHandle | None,
        seed: int = 0,
        manifest_hash: str = "",
    ):
        self.dataset = dataset
        self.handle = handle
        self.seed = seed
        self.manifest_hash = manifest_hash
        self._tfidf: dict[str, TfidfIndex] = {}
        self._digestible_cache: dict[str, bytes] = {}
        self._lock = threading.Lock()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_manifest(
        cls,
        manifest_path: str | Path,
        model_cmd: str | None = None,
        seed: int | None = None,
    ) -> "Session":
        manifest = load_manifest(manifest_path)
        dataset = load_dataset(manifest)
        manifest_hash = sha256_hex(Path(manifest_path).read_bytes())
        if seed is None:
            seed = int(manifest.get("seed", 0))
        model_cmd = model_cmd or os.environ.get(MODEL_CMD_ENV)
        if model_cmd:
            handle = spawn_external(model_cmd, labels=dataset.labels or None)
            if handle.task != dataset.task:
                handle.close()
                raise SessionError(
                    f"model task {handle.task!r} does not match dataset task {dataset.task!r}"
                )
        elif dataset.task == "classification":
            train_split = "train" if "train" in dataset.splits else None
            if train_split is None:
                # fall back to every gold-labeled instance
                dataset = _with_all_split(dataset)
                train_split = "__all__"
            handle = train_baseline(dataset, train_split)
        else:
            handle = None  # regression needs an external model
        return cls(dataset, handle, seed=seed, manifest_hash=manifest_hash)

    def require_handle(self) -> PredictorHandle:
        if self.handle is None:
            raise SessionError(
                "no model available: pass --model-cmd or set " + MODEL_CMD_ENV
            )
        return self.handle

    def tfidf(self, split: str) -> TfidfIndex:
        with self._lock:
            if split not in self._tfidf:
                self._tfidf[split] = build_tfidf(self.dataset, split)
            return self._tfidf[split]

    # -- digestible plumbing -------------------------------------------------

    def _provenance(self, seed: int | None, params: dict) -> Provenance:
        return Provenance(
            seed=seed,
            params=params,
            model_id=self.handle.model_id if self.handle else None,
            dataset_hash=self.dataset.content_hash(),
            module_version=__version__,
        )

    def cached_digestible(self, operation: str, params: dict, seed: int | None, builder) -> bytes:
        """Canonical digestible bytes, memoized by (operation, params, seed)."""
        key_src = canonical_json({"op": operation, "params": params, "seed": seed})
        key = key_src.decode("utf-8")
        with self._lock:
            cached = self._digestible_cache.get(key)
        if cached is not None:
            return cached
        data = canonical_json(builder().to_dict())
        with self._lock:
            self._digestible_cache.setdefault(key, data)
            return self._digestible_cache[key]

    # -- explore / examine ---------------------------------------------------

    def stats_digestible(self, split: str, k_top: int = 10) -> Digestible:
        stats = describe(self.dataset, split, k_top)
        params = {"split": split, "k_top": k_top}
        return Digestible("split-stats", to_plain(stats), self._provenance(None, params))

    def metrics_digestible(self, split: str) -> Digestible:
        handle = self.require_handle()
        params = {"split": split}
        if self.dataset.task == "classification":
            cm = confusion(self.dataset, split, handle)
            table = classification_metrics(cm)
            payload = {
                "task": "classification",
                "split": split,
                "metrics": to_plain(table),
                "confusion": {
                    "labels": list(cm.labels),
                    "counts": [list(r) for r in cm.counts],
                    "n_unlabeled": cm.n_unlabeled,
                },
            }
        else:
            labeled = [
                i for i in self.dataset.split_instances(split) if i.gold is not None
            ]
            if not labeled:
                raise ExamineError(f"split {split!r} has no gold values")
            preds = handle.predict_scores([i.text for i in labeled])
            table = regression_metrics([float(i.gold) for i in labeled], preds)
            payload = {"task": "regression", "split": split, "metrics": to_plain(table)}
        return Digestible("metrics", payload, self._provenance(None, params))

    def confusion_digestible(self, split: str) -> Digestible:
        cm = confusion(self.dataset, split, self.require_handle())
        payload = {
            "split": split,
            "labels": list(cm.labels),
            "counts": [list(r) for r in cm.counts],
            "n_unlabeled": cm.n_unlabeled,
        }
        return Digestible("confusion", payload, self._provenance(None, {"split": split}))

    def drilldown_ids(self, split: str, gold: str, pred: str) -> dict:
        ids = drilldown(self.dataset, split, self.require_handle(), gold, pred)
        return {
            "split": split,
            "gold": gold,
            "pred": pred,
            "ids": ids,
            "texts": {iid: self.dataset.instances[iid].text for iid in ids},
        }

    # -- explain ---------------------------------------------------------------

    def _resolve_instance(self, instance_id: str | None, text: str | None) -> Instance:
        if instance_id is not None:
            if instance_id not in self.dataset.instances:
                raise IngestError(f"unknown instance id {instance_id!r}")
            return self.dataset.instances[instance_id]
        if text is None:
            raise ExposeError("explain needs an instance_id or raw text")
        return Instance(id=f"what-if-{sha256_hex(text.encode('utf-8'))[:12]}", text=text)

    def explain_digestible(
        self,
        method: str,
        instance_id: str | None = None,
        text: str | None = None,
        target_label: str | None = None,
        params: dict | None = None,
        seed: int | None = None,
    ) -> Digestible:
        handle = self.require_handle()
        seed = self.seed if seed is None else seed
        instance = self._resolve_instance(instance_id, text)
        params = params or {}
        if method == "lime":
            result = lime(instance, handle, target_label, LimeParams(**params), seed)
            top_k = result.params["top_k"]
        elif method == "kernelshap":
            result = kernel_shap(instance, handle, target_label, ShapParams(**params), seed)
            top_k = len(result.weights)
        elif method == "exact-shapley":
            result = exact_shapley(instance, handle, target_label, ShapParams(**params))
            top_k = len(result.weights)
        else:
            raise ExposeError(
                f"unknown explain method {method!r} (expected one of {list(EXPLAIN_METHODS)})"
            )
        payload = {
            "method": result.method,
            "instance_id": result.instance_id,
            "text": instance.text,
            "target_label": result.target_label,
            "base_value": result.base_value,
            "tokens": list(result.tokens),
            "rendered_weights": list(result.top_weights(top_k)),
            "weights_sum": float(sum(result.weights)),
            "params": result.params,
        }
        prov_params = {"method": method, "params": result.params, "instance_id": instance_id, "text": text, "target_label": target_label}
        return Digestible("attribution", payload, self._provenance(result.seed, prov_params))

    def global_digestible(self, kind: str, split: str, **options) -> Digestible:
        handle = self.require_handle()
        params = {"kind": kind, "split": split, **options}
        if kind == "token-frequency":
            summary = token_frequency(self.dataset, split, handle, k=int(options.get("k", 10)))
        elif kind == "token-information":
            summary = token_information(self.dataset, split, handle)
        elif kind == "prototypes":
            summary = prototypes_by_label(
                self.dataset, split, handle, self.tfidf(split),
                method="kmedoids", k=int(options.get("k", 3)), seed=self.seed,
            )
        elif kind == "criticisms":
            summary = prototypes_by_label(
                self.dataset, split, handle, self.tfidf(split),
                method="mmd", k=int(options.get("k", 3)), m_c=int(options.get("m_c", 2)),
                seed=self.seed,
            )
        else:
            raise ExposeError(
                f"unknown global summary {kind!r} (expected one of {list(GLOBAL_KINDS)})"
            )
        return Digestible("global-summary", to_plain(summary), self._provenance(self.seed, params))

    # -- expose ---------------------------------------------------------------

    def suite_digestibles(self, suite: list[dict], seed: int | None = None) -> list[Digestible]:
        handle = self.require_handle()
        seed = self.seed if seed is None else seed
        digestibles = []
        for index, entry in enumerate(suite):
            entry_seed = derive_seed(seed, "suite", index)
            if str(entry.get("type", "")).lower() == "fuzz":
                digestibles.append(self.fuzz_digestible())
                continue
            result = run_suite_entry(entry, self.dataset, handle, entry_seed)
            digestibles.append(
                Digestible(
                    "test-result",
                    to_plain(result),
                    self._provenance(entry_seed, {"entry": entry}),
                )
            )
        return digestibles

    def fuzz_digestible(self) -> Digestible:
        result = security_fuzz(self.require_handle())
        return Digestible(
            "fuzz-result",
            to_plain(result) | {"all_ok": result.all_ok},
            self._provenance(None, {"corpus": result.corpus_version}),
        )

    def fairness_digestible(
        self,
        split: str,
        attribute: str,
        positive_label: str | None = None,
        loss: str = "mae",
    ) -> Digestible:
        handle = self.require_handle()
        params = {"split": split, "attribute": attribute}
        if self.dataset.task == "classification":
            result = fairness_classification(self.dataset, split, handle, attribute, positive_label)
            params["positive_label"] = result.positive_label
        else:
            result = fairness_regression(self.dataset, split, handle, attribute, loss)
            params["loss"] = loss
        return Digestible("fairness-report", to_plain(result), self._provenance(None, params))

    # -- full report -----------------------------------------------------------

    def eval_split(self) -> str:
        if "test" in self.dataset.splits:
            return "test"
        return sorted(self.dataset.splits)[0]

    def full_report(self, created_at: str | None = None) -> Report:
        """All four analyses with defaults, in a deterministic order."""
        report = Report(report_meta(__version__, self.manifest_hash, self.seed, created_at))
        for split in sorted(self.dataset.splits):
            report.digestibles.append(self.stats_digestible(split))
        split = self.eval_split()
        if self.handle is not None:
            labeled = any(i.gold is not None for i in self.dataset.split_instances(split))
            if labeled:
                report.digestibles.append(self.metrics_digestible(split))
                if self.dataset.task == "classification":
                    report.digestibles.append(self.confusion_digestible(split))
            report.digestibles.append(self.global_digestible("token-frequency", split))
            if self.dataset.task == "classification":
                report.digestibles.append(self.global_digestible("token-information", split))
            report.digestibles.append(self.global_digestible("prototypes", split))
            report.digestibles.append(self.global_digestible("criticisms", split))
            first = self.dataset.split_instances(split)[0]
            report.digestibles.append(
                self.explain_digestible("lime", instance_id=first.id, seed=self.seed)
            )
            inv_instances = self.dataset.split_instances(split)[:32]
            inv = run_inv(
                inv_instances,
                Perturber("typo", rate=0.05, seed=derive_seed(self.seed, "report-inv")),
                self.handle,
                meta={"seed": self.seed},
            ) if self.dataset.task == "classification" else None
            if inv is not None:
                report.digestibles.append(
                    Digestible(
                        "test-result",
                        to_plain(inv),
                        self._provenance(self.seed, {"suite": "default-inv", "split": split}),
                    )
                )
            report.digestibles.append(self.fuzz_digestible())
            for attribute in self._fairness_attributes(split):
                report.digestibles.append(self.fairness_digestible(split, attribute))
        return report

    def _fairness_attributes(self, split: str) -> list[str]:
        keys: set[str] = set()
        for instance in self.dataset.split_instances(split):
            keys.update(instance.attributes)
        usable = []
        for key in sorted(keys):
            values = {
                i.attributes.get(key)
                for i in self.dataset.split_instances(split)
                if key in i.attributes
            }
            if len(values) >= 2:
                usable.append(key)
        return usable

    def meta(self) -> dict:
        return {
            "task": self.dataset.task,
            "labels": list(self.dataset.labels),
            "splits": {name: len(ids) for name, ids in sorted(self.dataset.splits.items())},
            "model_id": self.handle.model_id if self.handle else None,
            "model_kind": self.handle.kind if self.handle else None,
            "artifact_version": __version__,
            "seed": self.seed,
        }


def _with_all_split(dataset: Dataset) -> Dataset:
    from .ingest import assign_split

    labeled = [i.id for i in dataset.instances.values() if i.gold is not None]
    return assign_split(dataset, "__all__", sorted(labeled))
