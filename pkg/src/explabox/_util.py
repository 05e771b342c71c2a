"""Shared helpers: content hashing and reproducible seed derivation."""

from __future__ import annotations

import hashlib


def content_hash(data: bytes, *, digest_size: int = 16) -> str:
    """Hex digest of a 128-bit content hash (used for cache keys and ids)."""
    return hashlib.blake2b(data, digest_size=digest_size).hexdigest()


def derive_seed(*parts: object) -> int:
    """Derive a child RNG seed from heterogeneous parts.

    Stable across processes and platforms, so parallel scheduling can never
    change which random stream an operation sees.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")
