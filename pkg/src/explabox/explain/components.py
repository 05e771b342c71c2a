"""Generic building blocks for perturbation-based explanations.

Local explanation methods here decompose into three replaceable steps:
sample binary masks over an instance's distinct tokens, weight each mask
(proximity kernel or Shapley kernel), and fit a weighted least-squares
surrogate whose coefficients are the attributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class ComponentError(ValueError):
    """Bad inputs to a sampling/weighting/solver component."""


@dataclass(frozen=True)
class MaskSample:
    """One perturbation: which distinct tokens are kept, the resulting text, its weight."""

    mask: tuple[int, ...]
    rendered_text: str
    weight: float


def render_mask(tokens: Sequence[str], distinct_tokens: Sequence[str], mask) -> str:
    """Drop all occurrences of masked-out distinct tokens; keep original order."""
    keep = {tok for tok, bit in zip(distinct_tokens, mask) if bit}
    return " ".join(tok for tok in tokens if tok in keep)


def sample_masks(d: int, n: int, seed: int) -> np.ndarray:
    """n binary masks of length d; row 0 is all-ones.

    Each subsequent row removes s ~ Uniform{1..d} tokens chosen uniformly.
    """
    if d < 1:
        raise ComponentError("mask dimension must be >= 1")
    if n < 1:
        raise ComponentError("need at least one sample")
    rng = np.random.default_rng(seed)
    masks = np.ones((n, d), dtype=np.int8)
    for i in range(1, n):
        s = int(rng.integers(1, d + 1))
        masks[i, rng.choice(d, size=s, replace=False)] = 0
    return masks


def enumerate_masks(d: int, include_empty: bool = True, include_full: bool = True) -> np.ndarray:
    """All 2^d masks in integer order; bit j of row r is (r >> j) & 1."""
    if d < 1:
        raise ComponentError("mask dimension must be >= 1")
    rows = np.arange(2**d)
    masks = ((rows[:, None] >> np.arange(d)) & 1).astype(np.int8)
    if not include_empty:
        masks = masks[masks.sum(axis=1) > 0]
    if not include_full:
        masks = masks[masks.sum(axis=1) < d]
    return masks


def cosine_distance_to_full(masks: np.ndarray) -> np.ndarray:
    """Cosine distance between each binary mask and the all-ones vector.

    For a mask keeping k of d tokens this is 1 - sqrt(k/d); the all-zero
    mask gets distance 1 by convention.
    """
    d = masks.shape[1]
    kept = masks.sum(axis=1)
    return np.where(kept == 0, 1.0, 1.0 - np.sqrt(kept / d))


def proximity_weights(masks: np.ndarray, kernel_width: float, distance_scale: float) -> np.ndarray:
    """Exponential proximity kernel exp(-(scale * d_cos)^2 / width^2)."""
    if kernel_width <= 0:
        raise ComponentError("kernel width must be positive")
    scaled = distance_scale * cosine_distance_to_full(masks)
    return np.exp(-(scaled**2) / kernel_width**2)


def shapley_kernel_weight(d: int, s: int) -> float:
    """Shapley kernel weight for a coalition of size s out of d players."""
    if s <= 0 or s >= d:
        raise ComponentError(f"Shapley kernel undefined for s={s}, d={d}")
    return (d - 1) / (math.comb(d, s) * s * (d - s))


def wls_solve(
    design: np.ndarray,
    targets: np.ndarray,
    weights: np.ndarray,
    ridge: float = 0.0,
    *,
    intercept_col: int | None = None,
    jitter: float = 0.0,
) -> np.ndarray:
    """Weighted least squares via normal equations.

    Minimizes sum_i w_i (y_i - x_i . beta)^2 + ridge * ||beta||^2, where the
    `intercept_col` coefficient (if any) is exempt from the ridge penalty.
    `jitter` is an extra diagonal term for numerical conditioning.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(targets, dtype=float)
    w = np.asarray(weights, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or y.shape[0] != w.shape[0]:
        raise ComponentError(
            f"dimension mismatch: design {X.shape}, targets {y.shape}, weights {w.shape}"
        )
    if (w < 0).any():
        raise ComponentError("negative sample weights")
    if not (w > 0).any():
        raise ComponentError("all sample weights are zero")
    A = X.T @ (X * w[:, None])
    penalty = np.full(X.shape[1], ridge, dtype=float)
    if intercept_col is not None:
        penalty[intercept_col] = 0.0
    A[np.diag_indices_from(A)] += penalty + jitter
    b = X.T @ (w * y)
    return np.linalg.solve(A, b)
