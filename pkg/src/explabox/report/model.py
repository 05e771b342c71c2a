"""Digestibles and reports: self-describing, reproducible analysis outputs.

A digestible bundles one analysis payload with the provenance needed to
regenerate it (seed, params, model id, dataset hash, module version). A
report is an ordered list of digestibles plus metadata, hashed over its
canonical bytes; identical inputs and seed produce identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .canonical import canonical_json, sha256_hex, to_plain

REPORT_SCHEMA_VERSION = "report-v1"
REPORT_EXTENSION = ".explabox.json"
FIXED_EPOCH = "1970-01-01T00:00:00Z"

DIGESTIBLE_KINDS = (
    "split-stats",
    "metrics",
    "confusion",
    "attribution",
    "global-summary",
    "test-result",
    "fairness-report",
    "fuzz-result",
)


class ReportError(ValueError):
    """Malformed digestible or report."""


@dataclass(frozen=True)
class Provenance:
    seed: int | None
    params: dict
    model_id: str | None
    dataset_hash: str | None
    module_version: str

    def to_dict(self) -> dict:
        return to_plain(
            {
                "seed": self.seed,
                "params": self.params,
                "model_id": self.model_id,
                "dataset_hash": self.dataset_hash,
                "module_version": self.module_version,
            }
        )


@dataclass(frozen=True)
class Digestible:
    kind: str
    payload: dict
    provenance: Provenance

    def __post_init__(self) -> None:
        if self.kind not in DIGESTIBLE_KINDS:
            raise ReportError(f"unknown digestible kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": to_plain(self.payload),
            "provenance": self.provenance.to_dict(),
        }


@dataclass
class Report:
    meta: dict
    digestibles: list[Digestible] = field(default_factory=list)

    def to_dict(self) -> dict:
        """Full report dict, content_hash included."""
        body = {
            "meta": to_plain(self.meta),
            "digestibles": [d.to_dict() for d in self.digestibles],
        }
        body["content_hash"] = sha256_hex(canonical_json(body))
        return body

    def to_bytes(self) -> bytes:
        return canonical_json(self.to_dict())


def report_meta(
    artifact_version: str,
    manifest_hash: str,
    seed: int,
    created_at: str | None = None,
) -> dict:
    """Report metadata; timestamps default to a fixed epoch for byte-reproducibility."""
    return {
        "artifact_version": artifact_version,
        "manifest_hash": manifest_hash,
        "created_at": created_at or FIXED_EPOCH,
        "seed": seed,
        "report_schema": REPORT_SCHEMA_VERSION,
    }
