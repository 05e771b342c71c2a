"""Behavioral test regimes: minimum functionality, invariance, direction.

A suite stores enough provenance (seed, perturber/template specs, texts)
that re-running it from the stored spec reproduces the verdicts exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..bridge import PredictorHandle
from ..ingest import Dataset, Instance
from .perturb import ExposeError, Perturber
from .templates import Template, expand_template

MAX_EXAMPLE_FAILURES = 10


@dataclass(frozen=True)
class CaseVerdict:
    case_id: str
    passed: bool
    original_text: str
    original_output: object
    variant_text: str | None = None
    variant_output: object | None = None
    expected: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class TestResult:
    kind: str  # MFT | INV | DIR
    n_cases: int
    n_failures: int
    failure_rate: float
    verdicts: tuple[CaseVerdict, ...]
    example_failures: tuple[CaseVerdict, ...]
    meta: dict = field(default_factory=dict)


def _result(kind: str, verdicts: list[CaseVerdict], meta: dict) -> TestResult:
    failures = [v for v in verdicts if not v.passed]
    return TestResult(
        kind=kind,
        n_cases=len(verdicts),
        n_failures=len(failures),
        failure_rate=len(failures) / len(verdicts),
        verdicts=tuple(verdicts),
        example_failures=tuple(failures[:MAX_EXAMPLE_FAILURES]),
        meta=meta,
    )


def _require_classification(handle: PredictorHandle, kind: str) -> None:
    if handle.task != "classification":
        raise ExposeError(f"{kind} tests require a classification model")


def run_mft(cases: list[Instance], handle: PredictorHandle, meta: dict | None = None) -> TestResult:
    """Minimum functionality: predicted label must equal the expected label."""
    if not cases:
        raise ExposeError("empty suite")
    _require_classification(handle, "MFT")
    missing = [c.id for c in cases if c.gold is None]
    if missing:
        raise ExposeError(f"MFT cases lack expected labels: {missing[:5]}")
    preds = handle.argmax_labels([c.text for c in cases])
    verdicts = [
        CaseVerdict(
            case_id=case.id,
            passed=pred == str(case.gold),
            original_text=case.text,
            original_output=pred,
            expected=str(case.gold),
        )
        for case, pred in zip(cases, preds)
    ]
    return _result("MFT", verdicts, meta or {})


def run_inv(
    instances: list[Instance],
    perturber: Perturber,
    handle: PredictorHandle,
    meta: dict | None = None,
) -> TestResult:
    """Invariance: the argmax label must survive the perturbation."""
    if not instances:
        raise ExposeError("empty suite")
    _require_classification(handle, "INV")
    variants = [perturber.apply(i.text) for i in instances]
    orig_preds = handle.argmax_labels([i.text for i in instances])
    var_preds = handle.argmax_labels(variants)
    verdicts = [
        CaseVerdict(
            case_id=instance.id,
            passed=orig == var,
            original_text=instance.text,
            original_output=orig,
            variant_text=variant,
            variant_output=var,
        )
        for instance, variant, orig, var in zip(instances, variants, orig_preds, var_preds)
    ]
    return _result("INV", verdicts, {**(meta or {}), "perturber": perturber.spec()})


def run_dir(
    instances: list[Instance],
    perturber: Perturber,
    handle: PredictorHandle,
    target_label: str,
    direction: str = "non-decrease",
    margin: float = 0.05,
    meta: dict | None = None,
) -> TestResult:
    """Directional expectation on the target label's probability."""
    if not instances:
        raise ExposeError("empty suite")
    _require_classification(handle, "DIR")
    if target_label not in handle.labels:
        raise ExposeError(f"unknown label {target_label!r}")
    if direction not in ("non-decrease", "non-increase"):
        raise ExposeError(f"direction must be non-decrease or non-increase, got {direction!r}")
    if margin < 0:
        raise ExposeError("margin must be >= 0")
    idx = handle.labels.index(target_label)
    variants = [perturber.apply(i.text) for i in instances]
    p_orig = handle.predict_matrix([i.text for i in instances])[:, idx]
    p_var = handle.predict_matrix(variants)[:, idx]
    verdicts = []
    for instance, variant, po, pv in zip(instances, variants, p_orig, p_var):
        delta = float(pv - po)
        passed = delta >= -margin if direction == "non-decrease" else delta <= margin
        verdicts.append(
            CaseVerdict(
                case_id=instance.id,
                passed=passed,
                original_text=instance.text,
                original_output=float(po),
                variant_text=variant,
                variant_output=float(pv),
                detail=f"delta={delta:+.6f}",
            )
        )
    meta = {
        **(meta or {}),
        "perturber": perturber.spec(),
        "target_label": target_label,
        "direction": direction,
        "margin": margin,
    }
    return _result("DIR", verdicts, meta)


# ---------------------------------------------------------------------------
# Suite spec files (JSON list of entries, shared by CLI and service)


def _source_instances(entry: dict, dataset: Dataset | None, seed: int) -> list[Instance]:
    if "template" in entry:
        template = Template(**entry["template"])
        return expand_template(template, int(entry.get("n", 20)), seed)
    if "split" in entry:
        if dataset is None:
            raise ExposeError("suite entry references a split but no dataset is loaded")
        instances = dataset.split_instances(str(entry["split"]))
        limit = entry.get("limit")
        return instances[: int(limit)] if limit is not None else instances
    raise ExposeError(f"suite entry needs 'template' or 'split': {entry!r}")


def run_suite_entry(
    entry: dict, dataset: Dataset | None, handle: PredictorHandle, seed: int
) -> TestResult:
    """Run one MFT/INV/DIR suite entry (fuzz entries are handled separately)."""
    etype = str(entry.get("type", "")).lower()
    if etype not in ("mft", "inv", "dir"):
        raise ExposeError(f"unknown suite entry type {entry.get('type')!r}")
    meta = {"seed": seed, "entry": entry}
    if etype == "mft":
        if "template" not in entry:
            raise ExposeError("MFT suite entries require a template")
        template = Template(**entry["template"])
        if template.expected is None and entry.get("expected") is not None:
            template = Template(template.pattern, template.providers, str(entry["expected"]))
        if template.expected is None:
            raise ExposeError("MFT template needs an expected label")
        cases = expand_template(template, int(entry.get("n", 20)), seed)
        return run_mft(cases, handle, meta)
    instances = _source_instances(entry, dataset, seed)
    perturber = Perturber(**{**entry.get("perturber", {}), "seed": seed})
    if etype == "inv":
        return run_inv(instances, perturber, handle, meta)
    return run_dir(
        instances,
        perturber,
        handle,
        target_label=str(entry["target_label"]),
        direction=str(entry.get("direction", "non-decrease")),
        margin=float(entry.get("margin", 0.05)),
        meta=meta,
    )
