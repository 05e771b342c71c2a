"""Local feature attributions: LIME, exact Shapley values, KernelSHAP.

All three share the same interpretable representation (a binary presence
vector over the instance's distinct tokens) and the same value function
(model output on the text rendered from a mask). Attributions are
deterministic given (instance, params, seed).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
import numpy as np

from .._util import derive_seed
from ..bridge import PredictorHandle
from ..examine import argmax_label
from ..ingest import Instance, tokenized_instance
from .components import (
    ComponentError,
    enumerate_masks,
    proximity_weights,
    render_mask,
    sample_masks,
    shapley_kernel_weight,
    wls_solve,
)


class AttributionError(ValueError):
    """Instance or parameters unusable for the requested method."""


@dataclass(frozen=True)
class LimeParams:
    n_samples: int = 5000
    kernel_width: float = 25.0
    distance_scale: float = 100.0
    ridge_strength: float = 1.0
    top_k: int = 10
    exhaustive: bool = False  # enumerate all 2^d masks instead of sampling

    def __post_init__(self) -> None:
        if self.n_samples < 1 or self.kernel_width <= 0 or self.ridge_strength < 0:
            raise AttributionError(f"invalid LIME parameters: {self}")


@dataclass(frozen=True)
class ShapParams:
    exact_threshold: int = 12
    n_samples: int = 2048
    regularization: float = 1e-10

    def __post_init__(self) -> None:
        if self.exact_threshold < 1 or self.n_samples < 1 or self.regularization < 0:
            raise AttributionError(f"invalid SHAP parameters: {self}")


@dataclass(frozen=True)
class AttributionResult:
    method: str
    instance_id: str
    target_label: str | None
    base_value: float
    weights: tuple[float, ...]
    tokens: tuple[str, ...]
    params: dict
    seed: int | None

    def top_weights(self, k: int) -> tuple[float, ...]:
        """Weights with everything outside the top-k by magnitude zeroed."""
        order = sorted(range(len(self.weights)), key=lambda i: (-abs(self.weights[i]), i))
        keep = set(order[:k])
        return tuple(w if i in keep else 0.0 for i, w in enumerate(self.weights))


def _prepare(instance: Instance, handle: PredictorHandle, target_label: str | None):
    tokenized = tokenized_instance(instance)
    if not tokenized.distinct_tokens:
        raise AttributionError(f"instance {instance.id!r} has no tokens to attribute")
    if handle.task == "classification":
        if target_label is None:
            target_label = argmax_label(
                handle.labels, handle.predict_matrix([instance.text])[0]
            )
        if target_label not in handle.labels:
            raise AttributionError(f"unknown target label {target_label!r}")
        target_index = handle.labels.index(target_label)

        def evaluate(texts: list[str]) -> np.ndarray:
            return handle.predict_matrix(texts)[:, target_index]

    else:
        target_label = None

        def evaluate(texts: list[str]) -> np.ndarray:
            return handle.predict_scores(texts)

    def value_of_masks(masks: np.ndarray) -> np.ndarray:
        texts = [render_mask(tokenized.tokens, tokenized.distinct_tokens, m) for m in masks]
        return evaluate(texts)

    return tokenized, target_label, value_of_masks


def lime(
    instance: Instance,
    handle: PredictorHandle,
    target_label: str | None = None,
    params: LimeParams = LimeParams(),
    seed: int = 0,
) -> AttributionResult:
    """Ridge surrogate on proximity-weighted mask perturbations."""
    tokenized, target_label, value_of = _prepare(instance, handle, target_label)
    d = len(tokenized.distinct_tokens)
    if params.exhaustive:
        masks = enumerate_masks(d)
    else:
        masks = sample_masks(d, params.n_samples, derive_seed(seed, instance.id, "lime"))
    y = value_of(masks)
    pi = proximity_weights(masks, params.kernel_width, params.distance_scale)
    design = np.hstack([np.ones((masks.shape[0], 1)), masks.astype(float)])
    beta = wls_solve(design, y, pi, ridge=params.ridge_strength, intercept_col=0)
    return AttributionResult(
        method="lime",
        instance_id=instance.id,
        target_label=target_label,
        base_value=float(beta[0]),
        weights=tuple(float(b) for b in beta[1:]),
        tokens=tokenized.distinct_tokens,
        params=asdict(params),
        seed=seed,
    )


def shapley_from_value_table(values: np.ndarray, d: int) -> tuple[float, np.ndarray]:
    """Exact Shapley values from a table of v(S) for every bitmask S.

    values[m] is the payoff of the coalition encoded by bitmask m (bit i set
    means token i present). Returns (base_value, phi).
    """
    if values.shape[0] != 2**d:
        raise ComponentError(f"value table must have 2^{d} entries")
    fact = [math.factorial(k) for k in range(d + 1)]
    phi = np.zeros(d)
    for m in range(2**d):
        s = bin(m).count("1")
        for i in range(d):
            bit = 1 << i
            if m & bit:
                continue
            weight = fact[s] * fact[d - s - 1] / fact[d]
            phi[i] += weight * (values[m | bit] - values[m])
    return float(values[0]), phi


def exact_shapley(
    instance: Instance,
    handle: PredictorHandle,
    target_label: str | None = None,
    params: ShapParams = ShapParams(),
) -> AttributionResult:
    """Exact Shapley values by full coalition enumeration (d <= exact_threshold)."""
    tokenized, target_label, value_of = _prepare(instance, handle, target_label)
    d = len(tokenized.distinct_tokens)
    if d > params.exact_threshold:
        raise AttributionError(
            f"{d} tokens exceed the exact enumeration threshold {params.exact_threshold}"
        )
    masks = enumerate_masks(d)
    values = value_of(masks)
    base, phi = shapley_from_value_table(values, d)
    return AttributionResult(
        method="exact-shapley",
        instance_id=instance.id,
        target_label=target_label,
        base_value=base,
        weights=tuple(float(p) for p in phi),
        tokens=tokenized.distinct_tokens,
        params=asdict(params),
        seed=None,
    )


def _sampled_coalitions(d: int, n: int, seed: int) -> np.ndarray:
    """Masks drawn with size probability proportional to the Shapley kernel mass.

    P(size s) ~ (d-1)/(s(d-s)) and subsets uniform within a size, which makes
    each mask's probability proportional to its kernel weight; the WLS then
    uses unit weights.
    """
    rng = np.random.default_rng(seed)
    sizes = np.arange(1, d)
    size_probs = (d - 1) / (sizes * (d - sizes))
    size_probs = size_probs / size_probs.sum()
    masks = np.zeros((n, d), dtype=np.int8)
    for i in range(n):
        s = int(rng.choice(sizes, p=size_probs))
        masks[i, rng.choice(d, size=s, replace=False)] = 1
    return masks


def kernel_shap(
    instance: Instance,
    handle: PredictorHandle,
    target_label: str | None = None,
    params: ShapParams = ShapParams(),
    seed: int = 0,
) -> AttributionResult:
    """Shapley-kernel weighted least squares on coalition masks.

    The efficiency constraint (base + sum(phi) = v(full)) is enforced by
    eliminating the last coefficient, not by a Lagrange term.
    """
    tokenized, target_label, value_of = _prepare(instance, handle, target_label)
    d = len(tokenized.distinct_tokens)
    if d < 2:
        raise AttributionError("KernelSHAP needs at least 2 distinct tokens")
    if d <= params.exact_threshold:
        masks = enumerate_masks(d, include_empty=False, include_full=False)
        weights = np.array([shapley_kernel_weight(d, int(m.sum())) for m in masks])
    else:
        if params.n_samples < d + 2:
            raise AttributionError("need at least d + 2 samples for the sampled path")
        masks = _sampled_coalitions(
            d, params.n_samples, derive_seed(seed, instance.id, "kernelshap")
        )
        weights = np.ones(masks.shape[0])

    v_empty = float(value_of(np.zeros((1, d), dtype=np.int8))[0])
    v_full = float(value_of(np.ones((1, d), dtype=np.int8))[0])
    y = value_of(masks)

    # eliminate phi_{d-1} via sum(phi) = v(full) - v(empty)
    z_last = masks[:, d - 1].astype(float)
    targets = y - v_empty - z_last * (v_full - v_empty)
    design = masks[:, : d - 1].astype(float) - z_last[:, None]
    head = wls_solve(design, targets, weights, ridge=0.0, jitter=params.regularization)
    phi = np.append(head, (v_full - v_empty) - head.sum())
    return AttributionResult(
        method="kernelshap",
        instance_id=instance.id,
        target_label=target_label,
        base_value=v_empty,
        weights=tuple(float(p) for p in phi),
        tokens=tokenized.distinct_tokens,
        params=asdict(params),
        seed=seed,
    )
