"""Report verification: schema validation plus content-hash recomputation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import jsonschema

from .canonical import CanonicalizationError, canonical_json, sha256_hex


@dataclass(frozen=True)
class VerifyResult:
    valid: bool
    recomputed_hash: str | None
    violations: tuple[str, ...]


def load_schema() -> dict:
    text = resources.files("explabox.report").joinpath("report-v1.schema.json").read_text("utf-8")
    return json.loads(text)


def verify_report(data: bytes) -> VerifyResult:
    """Parse, schema-check and re-hash report bytes. Violations are data, not errors."""
    violations: list[str] = []
    try:
        parsed = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        return VerifyResult(valid=False, recomputed_hash=None, violations=(f"not valid JSON: {exc}",))

    validator = jsonschema.Draft7Validator(load_schema())
    for error in sorted(validator.iter_errors(parsed), key=lambda e: list(e.absolute_path)):
        path = "/".join(str(p) for p in error.absolute_path) or "<root>"
        violations.append(f"schema: {path}: {error.message}")

    recomputed = None
    if isinstance(parsed, dict) and "content_hash" in parsed:
        stated = parsed["content_hash"]
        body = {k: v for k, v in parsed.items() if k != "content_hash"}
        try:
            recomputed = sha256_hex(canonical_json(body))
        except CanonicalizationError as exc:
            violations.append(f"cannot canonicalize report body: {exc}")
        if recomputed is not None and recomputed != stated:
            violations.append(
                f"content hash mismatch: stated {stated!r}, recomputed {recomputed!r}"
            )
    return VerifyResult(
        valid=not violations, recomputed_hash=recomputed, violations=tuple(violations)
    )
