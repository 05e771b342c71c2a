"""Canonical JSON: the byte-level substrate that makes reports hashable.

Rules: UTF-8, lexicographically sorted object keys, no insignificant
whitespace, shortest round-trip decimal rendering for floats (Python repr),
arrays keep their order, non-finite numbers are rejected.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, is_dataclass
from typing import Any


class CanonicalizationError(ValueError):
    """Value cannot be rendered canonically (non-finite number, bad key...)."""


def to_plain(value: Any) -> Any:
    """Recursively reduce a value to plain JSON types.

    Handles dataclasses, tuples, sets (sorted) and numpy scalars/arrays so
    payload builders can stay close to their natural types.
    """
    if is_dataclass(value) and not isinstance(value, type):
        return to_plain(asdict(value))
    if isinstance(value, dict):
        out = {}
        for key, item in value.items():
            if not isinstance(key, str):
                raise CanonicalizationError(f"non-string object key {key!r}")
            out[key] = to_plain(item)
        return out
    if isinstance(value, (list, tuple)):
        return [to_plain(item) for item in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_plain(item) for item in value)
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise CanonicalizationError(f"non-finite number {value!r}")
        return value
    # numpy scalars and arrays expose item()/tolist()
    if hasattr(value, "tolist"):
        return to_plain(value.tolist())
    if hasattr(value, "item"):
        return to_plain(value.item())
    raise CanonicalizationError(f"value of type {type(value).__name__} is not JSON-representable")


def canonical_json(value: Any) -> bytes:
    """Render a value as canonical UTF-8 JSON bytes."""
    plain = to_plain(value)
    try:
        text = json.dumps(
            plain, ensure_ascii=False, sort_keys=True, separators=(",", ":"), allow_nan=False
        )
    except ValueError as exc:
        raise CanonicalizationError(str(exc)) from exc
    return text.encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def canonical_hash(value: Any) -> str:
    """SHA-256 hex digest of the canonical rendering."""
    return sha256_hex(canonical_json(value))
