"""Global summary tests.

K-medoids is checked against exhaustive medoid-set search; the MMD greedy
chain is re-scored step by step with an independent objective evaluation.
"""

import itertools

import numpy as np
import pytest

from explabox.explain.summaries import (
    SummaryError,
    greedy_mmd,
    kmedoids_prototypes,
    mmd_critic,
    mmd_objective,
    pam_kmedoids,
    prototypes_by_label,
    rbf_kernel_matrix,
    token_frequency,
    token_information,
)
from explabox.ingest import build_tfidf

from conftest import build_dataset, fixed_classifier


@pytest.fixture
def two_cluster():
    """6 docs in 2 well-separated token clusters."""
    ds = build_dataset(
        [
            ("i0", "apple banana", "x"),
            ("i1", "apple banana cherry", "x"),
            ("i2", "banana cherry", "x"),
            ("i3", "dog cat", "x"),
            ("i4", "dog cat bird", "x"),
            ("i5", "cat bird", "x"),
        ]
    )
    return ds, build_tfidf(ds, "test")


class TestTokenFrequency:
    def test_gold_label_counting(self):
        ds = build_dataset([("i1", "a b", "pos"), ("i2", "a", "neg")])
        summary = token_frequency(ds, "test")
        assert summary.per_label["pos"] == [("a", 1), ("b", 1)]
        assert summary.per_label["neg"] == [("a", 1)]

    def test_k_truncates(self):
        ds = build_dataset([("i1", "a b c", "pos")])
        summary = token_frequency(ds, "test", k=1)
        assert summary.per_label["pos"] == [("a", 1)]

    def test_predicted_labels_with_handle(self):
        ds = build_dataset([("i1", "a b", "pos"), ("i2", "a", "pos")])
        handle = fixed_classifier({"a b": [1.0, 0.0], "a": [0.0, 1.0]})
        summary = token_frequency(ds, "test", handle)
        assert summary.per_label["neg"] == [("a", 1), ("b", 1)]
        assert summary.per_label["pos"] == [("a", 1)]
        assert summary.meta["label_source"] == "predicted"


class TestTokenInformation:
    def test_separable_fixture_one_bit(self):
        ds = build_dataset([("i1", "good", "pos"), ("i2", "bad", "neg")])
        handle = fixed_classifier({"good": [0.0, 1.0], "bad": [1.0, 0.0]})
        summary = token_information(ds, "test", handle)
        scores = dict(summary.overall)
        assert scores["good"] == pytest.approx(1.0)
        assert scores["bad"] == pytest.approx(1.0)

    def test_always_present_token_zero(self):
        ds = build_dataset([("i1", "z good", "pos"), ("i2", "z bad", "neg")])
        handle = fixed_classifier({"z good": [0.0, 1.0], "z bad": [1.0, 0.0]})
        scores = dict(token_information(ds, "test", handle).overall)
        assert abs(scores["z"]) < 1e-12

    def test_absent_tokens_not_in_output(self):
        ds = build_dataset([("i1", "good", "pos"), ("i2", "bad", "neg")])
        handle = fixed_classifier({"good": [0.0, 1.0], "bad": [1.0, 0.0]})
        assert "zebra" not in dict(token_information(ds, "test", handle).overall)

    def test_ties_rank_lexicographically(self):
        ds = build_dataset([("i1", "good", "pos"), ("i2", "bad", "neg")])
        handle = fixed_classifier({"good": [0.0, 1.0], "bad": [1.0, 0.0]})
        tokens = [t for t, _ in token_information(ds, "test", handle).overall]
        assert tokens == ["bad", "good"]


class TestKMedoids:
    def test_identical_vectors_tie_to_lowest_id(self):
        vectors = np.tile(np.array([1.0, 0.0]), (3, 1))
        result = pam_kmedoids(vectors, ["c", "a", "b"], 1)
        assert result.medoid_ids == ("a",)
        assert result.cost == pytest.approx(0.0)

    def test_k_equals_n_zero_cost(self, two_cluster):
        ds, tfidf = two_cluster
        ids = list(ds.split_ids("test"))
        result = pam_kmedoids(tfidf.vectors, ids, len(ids))
        assert result.cost == pytest.approx(0.0)
        assert set(result.medoid_ids) == set(ids)

    def test_matches_exhaustive_search(self, two_cluster):
        ds, tfidf = two_cluster
        ids = list(ds.split_ids("test"))
        result = pam_kmedoids(tfidf.vectors, ids, 2)
        dist = np.clip(1.0 - tfidf.vectors @ tfidf.vectors.T, 0.0, None)
        brute_cost = min(
            dist[:, pair].min(axis=1).sum() for pair in itertools.combinations(range(6), 2)
        )
        assert result.cost == pytest.approx(brute_cost)
        # one medoid per cluster
        assert any(m in result.medoid_ids for m in ("i0", "i1", "i2"))
        assert any(m in result.medoid_ids for m in ("i3", "i4", "i5"))

    def test_swap_never_increases_cost(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(12, 4))
        vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
        result = pam_kmedoids(vectors, [f"p{k:02d}" for k in range(12)], 3)
        costs = list(result.swap_costs)
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))

    def test_k_bounds(self, two_cluster):
        ds, tfidf = two_cluster
        ids = list(ds.split_ids("test"))
        with pytest.raises(SummaryError):
            pam_kmedoids(tfidf.vectors, ids, 7)
        with pytest.raises(SummaryError):
            pam_kmedoids(tfidf.vectors, ids, 0)

    def test_summary_wrapper(self, two_cluster):
        ds, tfidf = two_cluster
        summary = kmedoids_prototypes(tfidf, list(ds.split_ids("test")), 2)
        assert summary.kind == "prototypes"
        assert len(summary.overall["medoids"]) == 2


class TestMmdCritic:
    def test_first_prototype_matches_bruteforce(self):
        rng = np.random.default_rng(17)
        vectors = rng.normal(size=(40, 3))
        ids = [f"p{k:02d}" for k in range(40)]
        result = greedy_mmd(vectors, ids, 4, 2)
        kernel, _ = rbf_kernel_matrix(vectors)
        best = min(range(40), key=lambda j: (-mmd_objective(kernel, [j]), ids[j]))
        assert result.prototype_ids[0] == ids[best]

    def test_objective_trace_nondecreasing(self):
        rng = np.random.default_rng(23)
        vectors = rng.normal(size=(60, 5))
        result = greedy_mmd(vectors, [f"p{k:02d}" for k in range(60)], 8, 0)
        trace = result.objective_trace
        assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))
        # independent re-evaluation of each prefix
        kernel, _ = rbf_kernel_matrix(vectors)
        ids = [f"p{k:02d}" for k in range(60)]
        index = {iid: k for k, iid in enumerate(ids)}
        for step in range(len(trace)):
            prefix = [index[iid] for iid in result.prototype_ids[: step + 1]]
            assert trace[step] == pytest.approx(mmd_objective(kernel, prefix))

    def test_identical_points_criticisms_tie_by_id(self):
        vectors = np.ones((5, 2))
        result = greedy_mmd(vectors, ["e", "d", "c", "b", "a"], 2, 2)
        assert all(abs(w) < 1e-12 for w in result.witness.values())
        assert result.criticism_ids == tuple(sorted(result.criticism_ids))

    def test_budget_bound(self):
        vectors = np.ones((3, 2))
        with pytest.raises(SummaryError, match="exceeds"):
            greedy_mmd(vectors, ["a", "b", "c"], 2, 2)

    def test_gamma_median_heuristic_and_fallback(self):
        rng = np.random.default_rng(2)
        vectors = rng.normal(size=(10, 2))
        _, gamma = rbf_kernel_matrix(vectors)
        sq = ((vectors[:, None, :] - vectors[None, :, :]) ** 2).sum(axis=2)
        med = np.median(np.sqrt(sq[np.triu_indices(10, k=1)]))
        assert gamma == pytest.approx(1.0 / (2 * med**2))
        _, fallback = rbf_kernel_matrix(np.ones((4, 2)))
        assert fallback == 1.0

    def test_summary_wrapper_flags_no_regularizer(self, two_cluster):
        ds, tfidf = two_cluster
        summary = mmd_critic(tfidf, list(ds.split_ids("test")), 2, 1)
        assert summary.kind == "prototypes-criticisms"
        assert summary.meta["regularizer"] == "none"


class TestPrototypesByLabel:
    def test_groups_and_global(self, two_cluster):
        ds, tfidf = two_cluster
        tokens_to_probs = {
            iid: [1.0, 0.0] if "apple" in ds.instances[iid].text or "banana" in ds.instances[iid].text else [0.0, 1.0]
            for iid in ds.split_ids("test")
        }
        handle = fixed_classifier(
            {ds.instances[iid].text: row for iid, row in tokens_to_probs.items()},
            labels=("fruitish", "animalish"),
        )
        summary = prototypes_by_label(ds, "test", handle, tfidf, method="kmedoids", k=2)
        assert set(summary.per_label) == {"fruitish", "animalish"}
        assert len(summary.overall["medoids"]) == 2
        # k clamps to group size
        tiny = prototypes_by_label(ds, "test", handle, tfidf, method="kmedoids", k=5)
        assert len(tiny.per_label["fruitish"]["medoids"]) == 3
