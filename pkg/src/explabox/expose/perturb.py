"""Text perturbers for robustness testing.

Every perturber is a pure function of (text, seed): the typo perturber
derives its RNG stream from both, surface perturbers need no randomness.
"""

from __future__ import annotations

import string
import unicodedata
from dataclasses import dataclass

import numpy as np

from .._util import derive_seed


class ExposeError(ValueError):
    """Bad inputs to a sensitivity-testing operation."""


SURFACE_KINDS = ("case-upper", "case-lower", "punctuation-strip", "whitespace-pad")
TYPO_EDITS = ("swap", "delete", "insert", "duplicate")


def _apply_edit(chars: list[str], op: str, pos: int, letter: str) -> None:
    """One in-place character edit; positions must be valid for the op."""
    if op == "swap":
        chars[pos], chars[pos + 1] = chars[pos + 1], chars[pos]
    elif op == "delete":
        del chars[pos]
    elif op == "insert":
        chars.insert(pos, letter)
    elif op == "duplicate":
        chars.insert(pos, chars[pos])
    else:
        raise ExposeError(f"unknown edit {op!r}")


def perturb_typo(text: str, rate: float = 0.05, seed: int = 0) -> str:
    """Apply max(1, round(rate * len)) random character edits.

    Edits are drawn uniformly from swap/delete/insert/duplicate at uniform
    positions. Edits that would need a second character (delete on a single
    char, swap on length < 2) become inserts, so the result is never empty.
    """
    if not text:
        raise ExposeError("cannot perturb empty text")
    if not 0 < rate <= 1:
        raise ExposeError(f"rate must be in (0, 1], got {rate}")
    rng = np.random.default_rng(derive_seed(seed, "typo", text))
    chars = list(text)
    for _ in range(max(1, round(rate * len(text)))):
        op = TYPO_EDITS[int(rng.integers(len(TYPO_EDITS)))]
        if op == "delete" and len(chars) == 1:
            op = "insert"
        elif op == "swap" and len(chars) < 2:
            op = "insert"
        if op == "swap":
            pos = int(rng.integers(len(chars) - 1))
        elif op == "insert":
            pos = int(rng.integers(len(chars) + 1))
        else:
            pos = int(rng.integers(len(chars)))
        letter = string.ascii_lowercase[int(rng.integers(26))]
        _apply_edit(chars, op, pos, letter)
    return "".join(chars)


def perturb_surface(text: str, kind: str) -> str:
    """Deterministic surface-form change (case, punctuation, padding)."""
    if kind == "case-upper":
        return text.upper()
    if kind == "case-lower":
        return text.lower()
    if kind == "punctuation-strip":
        return "".join(c for c in text if not unicodedata.category(c).startswith("P"))
    if kind == "whitespace-pad":
        return f" {text} " if text else " "
    raise ExposeError(f"unknown perturbation kind {kind!r}")


@dataclass(frozen=True)
class Perturber:
    """Perturbation spec: a surface kind or 'typo' with a rate and seed."""

    kind: str
    rate: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind != "typo" and self.kind not in SURFACE_KINDS:
            raise ExposeError(f"unknown perturbation kind {self.kind!r}")

    def apply(self, text: str) -> str:
        if self.kind == "typo":
            return perturb_typo(text, self.rate, self.seed)
        return perturb_surface(text, self.kind)

    def spec(self) -> dict:
        if self.kind == "typo":
            return {"kind": self.kind, "rate": self.rate, "seed": self.seed}
        return {"kind": self.kind}
