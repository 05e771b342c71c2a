"""Uniform black-box prediction interface with batching and caching.

Backends come in three kinds:

* ``baseline`` — a built-in multinomial naive Bayes classifier, trained on a
  dataset split; closed-form and hand-checkable.
* ``external-process`` — any executable speaking the line protocol below on
  stdin/stdout (one JSON object per line, UTF-8):

    -> {"type": "handshake", "version": 1}
    <- {"type": "handshake", "task": "classification", "labels": ["neg", "pos"]}
    -> {"type": "predict", "id": 7, "texts": ["..."]}
    <- {"type": "prediction", "id": 7, "outputs": [[0.1, 0.9]]}
    <- {"type": "error", "id": 7, "message": "..."}   (per-request failure)

  Replies may interleave; ids disambiguate. Regression handshakes omit
  labels and predictions carry scalar outputs.
* ``callable`` — an in-process function, used for tests and demos.

All predictions are memoized by text, so for a fixed backend the handle is a
pure function of its input.
"""

from __future__ import annotations

import json
import math
import shlex
import subprocess
import threading
import time
from collections import Counter
from dataclasses import dataclass
from queue import Empty, Queue
from typing import Callable, Sequence

import numpy as np

from ._util import content_hash
from .ingest import Dataset, tokenize
from .report.canonical import canonical_json

DEFAULT_BATCH_SIZE = 64
DEFAULT_TIMEOUT = 10.0
PROBABILITY_TOLERANCE = 1e-6


class BridgeError(RuntimeError):
    """Base class for prediction-backend failures."""


class BackendCrash(BridgeError):
    """The backend process died."""


class BackendTimeout(BridgeError):
    """No reply within the per-batch timeout."""


class InvalidOutput(BridgeError):
    """Malformed backend output: wrong arity, non-finite, bad distribution."""


class BackendReported(BridgeError):
    """The backend replied with an explicit per-request error message."""


class HandshakeError(BridgeError):
    """Spawn or handshake failed, or metadata mismatches the manifest."""


@dataclass(frozen=True)
class PredictionBatch:
    texts: tuple[str, ...]
    outputs: tuple  # per text: tuple[float, ...] (classification) or float (regression)


def _validate_row(row: object, labels: tuple[str, ...]) -> tuple[float, ...]:
    if not isinstance(row, (list, tuple)) or len(row) != len(labels):
        raise InvalidOutput(
            f"expected probability vector of length {len(labels)}, got {row!r}"
        )
    values = []
    for p in row:
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p):
            raise InvalidOutput(f"non-finite or non-numeric probability {p!r}")
        if p < 0:
            raise InvalidOutput(f"negative probability {p!r}")
        values.append(float(p))
    total = sum(values)
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise InvalidOutput(f"probabilities sum to {total!r}, not 1")
    return tuple(values)


def _validate_scalar(value: object) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        raise InvalidOutput(f"non-finite or non-numeric score {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# Backends


class CallableBackend:
    """In-process backend around fn(texts) -> list of rows/scalars."""

    def __init__(self, fn: Callable[[Sequence[str]], Sequence]):
        self._fn = fn

    def infer(self, texts: Sequence[str]) -> list:
        return list(self._fn(texts))

    def alive(self) -> bool:
        return True

    def restart(self) -> None:
        pass

    def close(self) -> None:
        pass


class ExternalBackend:
    """Child process speaking the JSON-lines protocol."""

    def __init__(self, command: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT):
        self.command = command
        self.timeout = timeout
        self._next_id = 0
        self._pending: dict[int, dict] = {}
        self._spawn()

    def _spawn(self) -> None:
        argv = shlex.split(self.command) if isinstance(self.command, str) else list(self.command)
        try:
            self._proc = subprocess.Popen(
                argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
            )
        except OSError as exc:
            raise HandshakeError(f"cannot spawn backend {argv!r}: {exc}") from exc
        self._queue: Queue = Queue()
        self._pending = {}
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()

    def _read_loop(self) -> None:
        stdout = self._proc.stdout
        assert stdout is not None
        for line in stdout:
            line = line.strip()
            if not line:
                continue
            try:
                self._queue.put(json.loads(line))
            except json.JSONDecodeError:
                self._queue.put({"type": "garbage", "raw": line})

    def _send(self, message: dict) -> None:
        stdin = self._proc.stdin
        if stdin is None or self._proc.poll() is not None:
            raise BackendCrash("backend process is not running")
        try:
            stdin.write(json.dumps(message, ensure_ascii=False) + "\n")
            stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BackendCrash(f"backend pipe closed: {exc}") from exc

    def _wait_for(self, request_id: int | None, want_type: str) -> dict:
        """Collect replies until the one for `request_id` arrives."""
        if request_id in self._pending:
            return self._pending.pop(request_id)
        deadline = time.monotonic() + self.timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                if self._proc.poll() is not None:
                    raise BackendCrash("backend process exited")
                raise BackendTimeout(f"no reply within {self.timeout}s")
            try:
                message = self._queue.get(timeout=min(remaining, 0.05))
            except Empty:
                if self._proc.poll() is not None and self._queue.empty():
                    raise BackendCrash("backend process exited") from None
                continue
            mtype = message.get("type")
            mid = message.get("id")
            if request_id is not None and mid == request_id:
                return message
            if request_id is None and mtype == want_type:
                return message
            if mid is not None:
                self._pending[mid] = message

    def handshake(self) -> dict:
        self._send({"type": "handshake", "version": 1})
        try:
            reply = self._wait_for(None, "handshake")
        except BackendTimeout as exc:
            raise HandshakeError(f"handshake timeout: {exc}") from exc
        except BackendCrash as exc:
            raise HandshakeError(f"backend died during handshake: {exc}") from exc
        if reply.get("type") != "handshake" or "task" not in reply:
            raise HandshakeError(f"malformed handshake reply: {reply!r}")
        return reply

    def infer(self, texts: Sequence[str]) -> list:
        self._next_id += 1
        request_id = self._next_id
        self._send({"type": "predict", "id": request_id, "texts": list(texts)})
        reply = self._wait_for(request_id, "prediction")
        if reply.get("type") == "error":
            raise BackendReported(str(reply.get("message", "backend error")))
        if reply.get("type") != "prediction" or "outputs" not in reply:
            raise InvalidOutput(f"malformed reply: {reply!r}")
        outputs = reply["outputs"]
        if not isinstance(outputs, list) or len(outputs) != len(texts):
            raise InvalidOutput(
                f"expected {len(texts)} outputs, got {len(outputs) if isinstance(outputs, list) else outputs!r}"
            )
        return outputs

    def alive(self) -> bool:
        return self._proc.poll() is None

    def restart(self) -> None:
        self.close()
        self._spawn()
        self.handshake()

    def close(self) -> None:
        if self._proc.poll() is None:
            self._proc.kill()
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            pass


# ---------------------------------------------------------------------------
# Baseline model


@dataclass(frozen=True)
class BaselineModel:
    """Multinomial naive Bayes with Laplace smoothing over tokenize() tokens.

    Out-of-vocabulary tokens are dropped, so a text with no known tokens is
    scored by the class priors alone.
    """

    labels: tuple[str, ...]
    alpha: float
    prior_counts: dict[str, int]
    token_counts: dict[str, dict[str, int]]
    vocabulary: tuple[str, ...]

    def predict_proba(self, texts: Sequence[str]) -> list[list[float]]:
        vocab = set(self.vocabulary)
        vocab_size = len(self.vocabulary)
        total_docs = sum(self.prior_counts.values())
        totals = {
            label: sum(self.token_counts[label].values()) for label in self.labels
        }
        rows = []
        for text in texts:
            tokens = [t for t in tokenize(text) if t in vocab]
            log_scores = np.empty(len(self.labels))
            for idx, label in enumerate(self.labels):
                prior = self.prior_counts.get(label, 0) / total_docs
                if prior == 0.0:
                    log_scores[idx] = -np.inf
                    continue
                score = math.log(prior)
                denom = totals[label] + self.alpha * vocab_size
                counts = self.token_counts[label]
                for tok in tokens:
                    score += math.log((counts.get(tok, 0) + self.alpha) / denom)
                log_scores[idx] = score
            log_scores -= log_scores.max()
            probs = np.exp(log_scores)
            probs /= probs.sum()
            rows.append([float(p) for p in probs])
        return rows


# ---------------------------------------------------------------------------
# Predictor handle


class PredictorHandle:
    """Shared front door to a backend: batching, caching, validation.

    Thread-safe; concurrent predict calls are serialized per backend and the
    cache is internally synchronized.
    """

    def __init__(
        self,
        kind: str,
        task: str,
        backend,
        labels: tuple[str, ...] = (),
        model_id: str = "",
        batch_size: int = DEFAULT_BATCH_SIZE,
    ):
        self.kind = kind
        self.task = task
        self.labels = labels
        self.model_id = model_id
        self.batch_size = batch_size
        self.nondeterministic = False
        self._backend = backend
        self._cache: dict[str, object] = {}
        self._cache_lock = threading.Lock()
        self._backend_lock = threading.Lock()

    def _cache_key(self, text: str) -> str:
        return content_hash(text.encode("utf-8"))

    def predict(self, texts: Sequence[str]) -> PredictionBatch:
        """Predict every text, serving repeats from the cache."""
        texts = list(texts)
        keys = [self._cache_key(t) for t in texts]
        with self._cache_lock:
            missing: dict[str, str] = {}  # key -> text, first occurrence order
            for key, text in zip(keys, texts):
                if key not in self._cache and key not in missing:
                    missing[key] = text
        if missing:
            order = list(missing.items())
            with self._backend_lock:
                for start in range(0, len(order), self.batch_size):
                    chunk = order[start : start + self.batch_size]
                    raw = self._backend.infer([text for _, text in chunk])
                    if len(raw) != len(chunk):
                        raise InvalidOutput(
                            f"expected {len(chunk)} outputs, got {len(raw)}"
                        )
                    validated = [self._validate(value) for value in raw]
                    with self._cache_lock:
                        for (key, _), value in zip(chunk, validated):
                            previous = self._cache.setdefault(key, value)
                            if previous != value:
                                self.nondeterministic = True
        with self._cache_lock:
            outputs = tuple(self._cache[key] for key in keys)
        return PredictionBatch(texts=tuple(texts), outputs=outputs)

    def _validate(self, value: object):
        if self.task == "classification":
            return _validate_row(value, self.labels)
        return _validate_scalar(value)

    def predict_matrix(self, texts: Sequence[str]) -> np.ndarray:
        """Classification probabilities as an (n, |labels|) array."""
        return np.asarray(self.predict(texts).outputs, dtype=float)

    def predict_scores(self, texts: Sequence[str]) -> np.ndarray:
        """Regression scores as an (n,) array."""
        return np.asarray(self.predict(texts).outputs, dtype=float)

    def argmax_labels(self, texts: Sequence[str]) -> list[str]:
        """Predicted labels; probability ties go to the lowest label index."""
        matrix = self.predict_matrix(texts)
        return [self.labels[int(np.argmax(row))] for row in matrix]

    def health(self) -> dict:
        with self._cache_lock:
            size = len(self._cache)
        return {"alive": self._backend.alive(), "kind": self.kind, "cache_size": size}

    def restart_backend(self) -> None:
        with self._backend_lock:
            self._backend.restart()

    def close(self) -> None:
        self._backend.close()


def train_baseline(dataset: Dataset, split: str, alpha: float = 1.0) -> PredictorHandle:
    """Fit the naive Bayes baseline on the gold-labeled instances of a split."""
    if dataset.task != "classification":
        raise BridgeError("baseline model requires a classification task")
    instances = [i for i in dataset.split_instances(split) if i.gold is not None]
    if not instances:
        raise BridgeError(f"split {split!r} has no gold-labeled instances")
    prior_counts: Counter[str] = Counter()
    token_counts: dict[str, Counter[str]] = {label: Counter() for label in dataset.labels}
    vocabulary: set[str] = set()
    for instance in instances:
        label = str(instance.gold)
        prior_counts[label] += 1
        for tok in tokenize(instance.text):
            token_counts[label][tok] += 1
            vocabulary.add(tok)
    model = BaselineModel(
        labels=dataset.labels,
        alpha=alpha,
        prior_counts={label: prior_counts.get(label, 0) for label in dataset.labels},
        token_counts={label: dict(sorted(token_counts[label].items())) for label in dataset.labels},
        vocabulary=tuple(sorted(vocabulary)),
    )
    model_id = content_hash(
        canonical_json(
            {
                "kind": "baseline",
                "labels": model.labels,
                "alpha": model.alpha,
                "priors": model.prior_counts,
                "token_counts": model.token_counts,
            }
        )
    )
    return PredictorHandle(
        kind="baseline",
        task="classification",
        backend=CallableBackend(model.predict_proba),
        labels=dataset.labels,
        model_id=model_id,
    )


def wrap_callable(
    fn: Callable[[Sequence[str]], Sequence],
    task: str,
    labels: tuple[str, ...] = (),
    name: str = "callable",
) -> PredictorHandle:
    """In-process backend for tests and demos (same validation/caching path)."""
    model_id = content_hash(canonical_json({"kind": "callable", "name": name, "labels": labels}))
    return PredictorHandle(
        kind="callable", task=task, backend=CallableBackend(fn), labels=labels, model_id=model_id
    )


def spawn_external(
    command: str | Sequence[str],
    labels: Sequence[str] | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> PredictorHandle:
    """Spawn an external model process and handshake task/label metadata.

    `labels`, when given (e.g. from the manifest), must match the handshake
    label list exactly.
    """
    backend = ExternalBackend(command, timeout=timeout)
    try:
        reply = backend.handshake()
    except HandshakeError:
        backend.close()
        raise
    task = str(reply["task"])
    if task not in ("classification", "regression"):
        backend.close()
        raise HandshakeError(f"unknown task {task!r} in handshake")
    got_labels = tuple(str(x) for x in reply.get("labels", []))
    if task == "classification" and not got_labels:
        backend.close()
        raise HandshakeError("classification handshake must carry labels")
    if labels is not None and list(labels) != list(got_labels):
        backend.close()
        raise HandshakeError(
            f"handshake labels {list(got_labels)} do not match expected {list(labels)}"
        )
    model_id = content_hash(
        canonical_json(
            {
                "kind": "external",
                "command": command if isinstance(command, str) else list(command),
                "task": task,
                "labels": got_labels,
            }
        )
    )
    return PredictorHandle(
        kind="external-process",
        task=task,
        backend=backend,
        labels=got_labels,
        model_id=model_id,
        batch_size=batch_size,
    )


def probe_health(handle: PredictorHandle) -> dict:
    """Liveness status: {alive, kind, cache_size}. Never raises."""
    return handle.health()
