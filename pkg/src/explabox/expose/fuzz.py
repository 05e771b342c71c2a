"""Security fuzzing: does any hostile-but-legal input crash or hang the model?

The corpus is fixed and versioned; its identifier is embedded in every
result so reports stay comparable across runs. Failures are data, never
exceptions: each corpus entry yields exactly one verdict and a crashed or
hung backend is restarted so the suite always completes.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..bridge import (
    BackendCrash,
    BackendReported,
    BackendTimeout,
    BridgeError,
    InvalidOutput,
    PredictorHandle,
)

FUZZ_CORPUS_VERSION = "fuzz-corpus-v1"


def fuzz_corpus() -> list[tuple[str, str]]:
    """(name, payload) pairs; order is part of the corpus version."""
    return [
        ("empty", ""),
        ("megabyte-repeat", "a" * 10**6),
        ("control-chars", "".join(chr(c) for c in range(0x20))),
        ("emoji-rtl", "\U0001f9ea\U0001f680 ‮override‬ \U0001f642"),
        ("long-single-token", "x" * 10**4),
        ("newline-flood", "\n" * 10**3),
        ("astral-codepoints", "\U00010000\U0001f4a9\U0002070e\U000e0041\U0010fffd"),
    ]


@dataclass(frozen=True)
class FuzzVerdict:
    name: str
    verdict: str  # ok | crash | timeout | invalid-output
    detail: str = ""


@dataclass(frozen=True)
class FuzzResult:
    corpus_version: str
    verdicts: tuple[FuzzVerdict, ...]
    counts: dict[str, int]

    @property
    def all_ok(self) -> bool:
        return all(v.verdict == "ok" for v in self.verdicts)


def security_fuzz(handle: PredictorHandle) -> FuzzResult:
    """Send each corpus entry individually; classify the outcome; never abort."""
    verdicts: list[FuzzVerdict] = []
    for name, payload in fuzz_corpus():
        try:
            handle.predict([payload])
            verdicts.append(FuzzVerdict(name, "ok"))
            continue
        except BackendCrash as exc:
            verdicts.append(FuzzVerdict(name, "crash", str(exc)))
        except BackendTimeout as exc:
            verdicts.append(FuzzVerdict(name, "timeout", str(exc)))
        except (InvalidOutput, BackendReported) as exc:
            verdicts.append(FuzzVerdict(name, "invalid-output", str(exc)))
            continue
        # crashed or hung: bring the backend back before the next entry
        try:
            handle.restart_backend()
        except BridgeError:
            pass  # dead for good; later entries will record crashes
    counts: dict[str, int] = {}
    for v in verdicts:
        counts[v.verdict] = counts.get(v.verdict, 0) + 1
    return FuzzResult(
        corpus_version=FUZZ_CORPUS_VERSION, verdicts=tuple(verdicts), counts=counts
    )
