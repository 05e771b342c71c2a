"""Global model summaries: token statistics and prototype selection.

Prototypes come from two selectors: PAM k-medoids (BUILD + best-improvement
SWAP on cosine distances) and greedy MMD maximization with witness-function
criticisms. Both run on L2-normalized tf-idf rows and break all ties by
instance id, so results are deterministic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..bridge import PredictorHandle
from ..ingest import Dataset, IngestError, TfidfIndex


class SummaryError(ValueError):
    """Bad inputs to a global summary (empty split, k too large...)."""


@dataclass(frozen=True)
class GlobalSummary:
    kind: str  # token-frequency | token-information | prototypes | prototypes-criticisms
    per_label: dict[str, object]
    overall: object | None = None
    meta: dict = field(default_factory=dict)


def _labels_for(
    dataset: Dataset, split: str, handle: PredictorHandle | None
) -> list[tuple[str, str | None]]:
    """(instance_id, label) pairs; model-predicted labels when a handle is given."""
    instances = dataset.split_instances(split)
    if not instances:
        raise SummaryError(f"split {split!r} is empty")
    if handle is not None:
        preds = handle.argmax_labels([i.text for i in instances])
        return [(i.id, p) for i, p in zip(instances, preds)]
    return [(i.id, None if i.gold is None else str(i.gold)) for i in instances]


def token_frequency(
    dataset: Dataset, split: str, handle: PredictorHandle | None = None, k: int = 10
) -> GlobalSummary:
    """Top-k tokens per label group by document frequency; ties lexicographic."""
    pairs = _labels_for(dataset, split, handle)
    per_label_counts: dict[str, Counter[str]] = {}
    for iid, label in pairs:
        if label is None:
            continue
        counter = per_label_counts.setdefault(label, Counter())
        counter.update(set(dataset.tokenized(iid).distinct_tokens))
    per_label = {
        label: sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
        for label, counter in sorted(per_label_counts.items())
    }
    return GlobalSummary(
        kind="token-frequency",
        per_label=per_label,
        meta={"k": k, "label_source": "predicted" if handle is not None else "gold"},
    )


def token_information(dataset: Dataset, split: str, handle: PredictorHandle) -> GlobalSummary:
    """Plug-in mutual information (bits) between token presence and predicted label."""
    if dataset.task != "classification":
        raise SummaryError("token information requires a classification task")
    pairs = _labels_for(dataset, split, handle)
    n = len(pairs)
    label_counts = Counter(label for _, label in pairs)
    presence: dict[str, Counter[str]] = {}
    for iid, label in pairs:
        for tok in dataset.tokenized(iid).distinct_tokens:
            presence.setdefault(tok, Counter())[label] += 1

    def mutual_information(token: str) -> float:
        info = 0.0
        present_by_label = presence[token]
        n_present = sum(present_by_label.values())
        for label, n_label in label_counts.items():
            for present, joint in (
                (True, present_by_label.get(label, 0)),
                (False, n_label - present_by_label.get(label, 0)),
            ):
                if joint == 0:
                    continue  # 0 log 0 = 0
                p_joint = joint / n
                p_t = (n_present if present else n - n_present) / n
                p_y = n_label / n
                info += p_joint * math.log2(p_joint / (p_t * p_y))
        return info

    ranked = sorted(
        ((tok, mutual_information(tok)) for tok in presence),
        key=lambda kv: (-kv[1], kv[0]),
    )
    return GlobalSummary(
        kind="token-information",
        per_label={},
        overall=ranked,
        meta={"unit": "bits", "label_source": "predicted"},
    )


# ---------------------------------------------------------------------------
# PAM k-medoids


@dataclass(frozen=True)
class PamResult:
    medoid_ids: tuple[str, ...]
    cost: float
    swap_costs: tuple[float, ...]  # total cost after each applied swap


def _cosine_distances(vectors: np.ndarray) -> np.ndarray:
    # rows are L2-normalized (or zero); clip fp noise
    return np.clip(1.0 - vectors @ vectors.T, 0.0, None)


def pam_kmedoids(vectors: np.ndarray, ids: Sequence[str], k: int) -> PamResult:
    """Partitioning Around Medoids with greedy BUILD and best-improvement SWAP.

    Candidates are scanned in id order, so equal-cost ties resolve to the
    lowest id. SWAP stops when no exchange improves total cost by > 1e-12.
    """
    n = len(ids)
    if n == 0:
        raise SummaryError("no instances to cluster")
    if not 1 <= k <= n:
        raise SummaryError(f"k={k} outside [1, {n}]")
    dist = _cosine_distances(np.asarray(vectors, dtype=float))
    order = sorted(range(n), key=lambda i: ids[i])

    # BUILD: greedily add the point that most lowers total distance to nearest medoid
    nearest = np.full(n, np.inf)
    medoids: list[int] = []
    for _ in range(k):
        best_j, best_cost = -1, np.inf
        for j in order:
            if j in medoids:
                continue
            cost = float(np.minimum(nearest, dist[:, j]).sum())
            if cost < best_cost:
                best_j, best_cost = j, cost
        medoids.append(best_j)
        nearest = np.minimum(nearest, dist[:, best_j])

    # SWAP: apply the single best improving (medoid, candidate) exchange, repeat
    def total_cost(members: list[int]) -> float:
        return float(dist[:, members].min(axis=1).sum())

    cost = total_cost(medoids)
    swap_costs: list[float] = []
    while True:
        best_swap, best_cost = None, cost
        for m_pos, medoid in enumerate(medoids):
            for h in order:
                if h in medoids:
                    continue
                trial = medoids.copy()
                trial[m_pos] = h
                trial_cost = total_cost(trial)
                if trial_cost < best_cost - 1e-12:
                    best_swap, best_cost = (m_pos, h), trial_cost
        if best_swap is None:
            break
        medoids[best_swap[0]] = best_swap[1]
        cost = best_cost
        swap_costs.append(cost)

    return PamResult(
        medoid_ids=tuple(sorted(ids[m] for m in medoids)),
        cost=cost,
        swap_costs=tuple(swap_costs),
    )


def kmedoids_prototypes(
    tfidf: TfidfIndex, ids: Sequence[str], k: int, seed: int = 0
) -> GlobalSummary:
    """K-medoids prototypes for one id group. Deterministic; seed kept for provenance."""
    result = pam_kmedoids(tfidf.rows(ids), list(ids), k)
    return GlobalSummary(
        kind="prototypes",
        per_label={},
        overall={"medoids": list(result.medoid_ids), "cost": result.cost},
        meta={"method": "kmedoids", "k": k, "seed": seed, "distance": "cosine"},
    )


# ---------------------------------------------------------------------------
# MMD-critic


@dataclass(frozen=True)
class MmdResult:
    prototype_ids: tuple[str, ...]  # selection order
    criticism_ids: tuple[str, ...]
    objective_trace: tuple[float, ...]  # J(S) after each greedy addition
    gamma: float
    witness: dict[str, float]


def rbf_kernel_matrix(vectors: np.ndarray) -> tuple[np.ndarray, float]:
    """RBF kernel with the median heuristic: gamma = 1/(2 med^2), fallback 1.0."""
    diffs = vectors[:, None, :] - vectors[None, :, :]
    sq = (diffs**2).sum(axis=2)
    n = vectors.shape[0]
    if n >= 2:
        upper = np.sqrt(sq[np.triu_indices(n, k=1)])
        med = float(np.median(upper))
    else:
        med = 0.0
    gamma = 1.0 / (2.0 * med**2) if med > 0 else 1.0
    return np.exp(-gamma * sq), gamma


def mmd_objective(kernel: np.ndarray, selected: Sequence[int]) -> float:
    """J(S) = 2/(n|S|) sum_i,j k(x_i, x_j) - 1/|S|^2 sum_{j,j' in S} k(x_j, x_j')."""
    n = kernel.shape[0]
    m = len(selected)
    sel = list(selected)
    return float(
        2.0 / (n * m) * kernel[:, sel].sum() - kernel[np.ix_(sel, sel)].sum() / m**2
    )


def greedy_mmd(vectors: np.ndarray, ids: Sequence[str], m_p: int, m_c: int) -> MmdResult:
    """Greedy prototypes by MMD-objective maximization, criticisms by |witness|."""
    n = len(ids)
    if m_p < 1:
        raise SummaryError("need at least one prototype")
    if m_p + m_c > n:
        raise SummaryError(f"m_p + m_c = {m_p + m_c} exceeds the {n} available instances")
    kernel, gamma = rbf_kernel_matrix(np.asarray(vectors, dtype=float))
    order = sorted(range(n), key=lambda i: ids[i])

    selected: list[int] = []
    trace: list[float] = []
    for _ in range(m_p):
        best_j, best_obj = -1, -np.inf
        for j in order:
            if j in selected:
                continue
            obj = mmd_objective(kernel, selected + [j])
            if obj > best_obj:
                best_j, best_obj = j, obj
        selected.append(best_j)
        trace.append(best_obj)

    witness = kernel.mean(axis=0) - kernel[selected, :].mean(axis=0)
    critics = [i for i in order if i not in selected]
    critics.sort(key=lambda i: (-abs(witness[i]), ids[i]))
    return MmdResult(
        prototype_ids=tuple(ids[i] for i in selected),
        criticism_ids=tuple(ids[i] for i in critics[:m_c]),
        objective_trace=tuple(trace),
        gamma=gamma,
        witness={ids[i]: float(witness[i]) for i in range(n)},
    )


def mmd_critic(
    tfidf: TfidfIndex, ids: Sequence[str], m_p: int, m_c: int, seed: int = 0
) -> GlobalSummary:
    """MMD prototypes + criticisms for one id group (witness-only, no regularizer)."""
    result = greedy_mmd(tfidf.rows(ids), list(ids), m_p, m_c)
    return GlobalSummary(
        kind="prototypes-criticisms",
        per_label={},
        overall={
            "prototypes": list(result.prototype_ids),
            "criticisms": list(result.criticism_ids),
            "objective_trace": list(result.objective_trace),
            "gamma": result.gamma,
        },
        meta={"method": "mmd-critic", "m_p": m_p, "m_c": m_c, "seed": seed, "regularizer": "none"},
    )


def prototypes_by_label(
    dataset: Dataset,
    split: str,
    handle: PredictorHandle,
    tfidf: TfidfIndex,
    method: str = "kmedoids",
    k: int = 3,
    m_c: int = 2,
    seed: int = 0,
) -> GlobalSummary:
    """Run a prototype selector globally and per model-predicted label group.

    k (and the criticism count) is clamped to each group's size; groups too
    small to summarize are skipped and listed in the metadata.
    """
    ids = list(dataset.split_ids(split))
    if not ids:
        raise IngestError(f"split {split!r} is empty")
    groups: dict[str, list[str]] = {}
    if dataset.task == "classification":
        for iid, label in zip(ids, handle.argmax_labels([dataset.instances[i].text for i in ids])):
            groups.setdefault(label, []).append(iid)

    def run(group_ids: list[str]):
        if method == "kmedoids":
            return kmedoids_prototypes(tfidf, group_ids, min(k, len(group_ids)), seed).overall
        m_p_eff = min(k, len(group_ids))
        m_c_eff = min(m_c, len(group_ids) - m_p_eff)
        return mmd_critic(tfidf, group_ids, m_p_eff, m_c_eff, seed).overall

    skipped = sorted(label for label, members in groups.items() if not members)
    per_label = {label: run(members) for label, members in sorted(groups.items()) if members}
    kind = "prototypes" if method == "kmedoids" else "prototypes-criticisms"
    return GlobalSummary(
        kind=kind,
        per_label=per_label,
        overall=run(ids),
        meta={
            "method": method,
            "k": k,
            "m_c": m_c,
            "seed": seed,
            "label_source": "predicted",
            "skipped_groups": skipped,
        },
    )
