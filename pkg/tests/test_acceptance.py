"""Acceptance suite: one test per exit criterion, each at its stated tolerance.

Every test prints a [PASS] line on success (visible with -s), so the suite
doubles as a runnable audit checklist. Oracles are independent of the code
paths they check: permutation averages for Shapley, exhaustive search for
k-medoids, single-element objective scans for MMD.
"""

import itertools
import math

import numpy as np
import pytest

from explabox.bridge import (
    BackendCrash,
    BackendReported,
    BackendTimeout,
    InvalidOutput,
    spawn_external,
    train_baseline,
)
from explabox.cli import run
from explabox.examine import ConfusionMatrix, classification_metrics
from explabox.explain import (
    exact_shapley,
    kernel_shap,
    lime,
    LimeParams,
    mmd_objective,
    pam_kmedoids,
    rbf_kernel_matrix,
    shapley_from_value_table,
)
from explabox.explain.components import enumerate_masks, render_mask
from explabox.explain.summaries import greedy_mmd, token_information
from explabox.expose import Perturber, fairness_classification, fairness_regression, fuzz_corpus, run_inv, security_fuzz
from explabox.ingest import Instance, build_tfidf, tokenized_instance

from conftest import (
    additive_regressor,
    build_dataset,
    fixed_classifier,
    fixed_regressor,
    stub_command,
)


def ok(line: str) -> None:
    print(f"[PASS] {line}")


# ---------------------------------------------------------------------------
# Shared fixtures


@pytest.fixture(scope="module")
def review_baseline():
    """Baseline with a non-trivial vocabulary for random-instance criteria."""
    rows = [
        ("d0", "great nice fine movie", "pos"),
        ("d1", "okay good lovely plot", "pos"),
        ("d2", "nice good warm story", "pos"),
        ("d3", "terrible awful bad film", "neg"),
        ("d4", "bad dull horrid scenes", "neg"),
        ("d5", "awful weak dull acting", "neg"),
    ]
    ds = build_dataset(rows, split="train")
    return train_baseline(ds, "train")


TOKEN_POOL = [
    "great", "nice", "fine", "okay", "good", "lovely", "warm", "story",
    "terrible", "awful", "bad", "dull", "horrid", "weak", "plot", "film",
    "zestful", "quaint", "murky", "brisk",  # out-of-vocabulary fillers
]


def random_instances(rng, count, d_choices):
    instances = []
    for k in range(count):
        d = int(rng.choice(d_choices))
        tokens = rng.choice(TOKEN_POOL, size=d, replace=False)
        instances.append(Instance(f"rand-{k}", " ".join(tokens)))
    return instances


def value_table(instance, handle, target_label):
    """v(S) for every bitmask, via the same rendering the methods use."""
    tok = tokenized_instance(instance)
    d = len(tok.distinct_tokens)
    masks = enumerate_masks(d)
    texts = [render_mask(tok.tokens, tok.distinct_tokens, m) for m in masks]
    idx = handle.labels.index(target_label)
    return handle.predict_matrix(texts)[:, idx], d


def permutation_shapley(values, d):
    phi = np.zeros(d)
    for perm in itertools.permutations(range(d)):
        mask = 0
        for i in perm:
            phi[i] += values[mask | (1 << i)] - values[mask]
            mask |= 1 << i
    return phi / math.factorial(d)


# ---------------------------------------------------------------------------
# Criteria


class TestShapleyOracleEquivalence:
    def test_kernel_shap_matches_exact_on_50_random_instances(self, review_baseline):
        rng = np.random.default_rng(2024)
        for instance in random_instances(rng, 50, range(2, 11)):
            exact = exact_shapley(instance, review_baseline, "pos")
            kernel = kernel_shap(instance, review_baseline, "pos", seed=0)
            diff = np.max(np.abs(np.array(exact.weights) - np.array(kernel.weights)))
            assert diff <= 1e-6, f"{instance.text}: max coordinate gap {diff}"
        ok("Shapley oracle equivalence: kernelshap == exact_shapley (1e-6) on 50 random instances, d in 2..10")

    def test_exact_matches_permutation_average_for_small_d(self, review_baseline):
        rng = np.random.default_rng(7)
        for instance in random_instances(rng, 12, range(2, 7)):
            values, d = value_table(instance, review_baseline, "pos")
            _, phi = shapley_from_value_table(values, d)
            oracle = permutation_shapley(values, d)
            assert np.max(np.abs(phi - oracle)) <= 1e-9
            result = exact_shapley(instance, review_baseline, "pos")
            assert np.max(np.abs(np.array(result.weights) - oracle)) <= 1e-9
        ok("Shapley oracle equivalence: exact_shapley == permutation average (1e-9) for d <= 6")


class TestShapleyAxioms:
    def test_axioms_on_constructed_value_functions(self):
        rng = np.random.default_rng(11)
        for d in range(2, 9):
            masks = np.arange(2**d)
            sizes = np.array([bin(m).count("1") for m in masks])

            # additive: v(S) = c0 + sum of per-token increments
            coefs = rng.uniform(-1, 1, size=d)
            additive = 0.3 + np.array(
                [sum(coefs[i] for i in range(d) if m >> i & 1) for m in masks]
            )
            base, phi = shapley_from_value_table(additive, d)
            assert abs(base + phi.sum() - additive[-1]) <= 1e-8  # efficiency
            assert np.max(np.abs(phi - coefs)) <= 1e-8

            # symmetric: v depends only on |S|
            symmetric = np.sqrt(sizes.astype(float))
            _, phi_sym = shapley_from_value_table(symmetric, d)
            assert np.ptp(phi_sym) <= 1e-8

            # dummy: token d-1 never changes v
            reduced = rng.uniform(size=2 ** (d - 1))
            dummy = np.array([reduced[m & ((1 << (d - 1)) - 1)] for m in masks])
            base_d, phi_dummy = shapley_from_value_table(dummy, d)
            assert abs(phi_dummy[d - 1]) <= 1e-8
            assert abs(base_d + phi_dummy.sum() - dummy[-1]) <= 1e-8
        ok("Shapley axioms: efficiency, symmetry, dummy (1e-8) for d in 2..8")


class TestLimeRecovery:
    def test_enumerated_masks_recover_coefficients(self):
        rng = np.random.default_rng(3)
        for d in range(2, 7):
            coefs = {f"tok{i}": float(c) for i, c in enumerate(rng.uniform(-0.5, 0.5, size=d))}
            handle = additive_regressor(coefs, intercept=0.25)
            instance = Instance("add", " ".join(coefs))
            result = lime(instance, handle, params=LimeParams(ridge_strength=0.0, exhaustive=True))
            expected = [coefs[t] for t in result.tokens]
            assert np.max(np.abs(np.array(result.weights) - expected)) <= 1e-8
            assert abs(result.base_value - 0.25) <= 1e-8
        ok("LIME recovery: enumerated masks + ridge 0 match additive coefficients (1e-8)")

    def test_default_sampling_preserves_ranking(self):
        for d, seed in ((2, 0), (3, 1), (4, 2), (5, 3)):
            coefs = {f"t{i}": 0.5 - 0.08 * i for i in range(d)}
            handle = additive_regressor(coefs, intercept=0.1)
            instance = Instance("rank", " ".join(coefs))
            result = lime(instance, handle, seed=seed)  # defaults: n=5000, ridge 1.0
            order = [result.tokens[i] for i in np.argsort(result.weights)[::-1]]
            assert order == sorted(coefs, key=coefs.get, reverse=True)
        ok("LIME recovery: default sampling (n=5000, fixed seed) preserves coefficient ranking for d <= 5")


class TestMmdCritic:
    def test_greedy_objective_nondecreasing_on_random_data(self):
        for seed in (0, 1, 2):
            rng = np.random.default_rng(seed)
            vectors = rng.normal(size=(100, 6))
            ids = [f"p{k:03d}" for k in range(100)]
            result = greedy_mmd(vectors, ids, m_p=10, m_c=5)
            trace = result.objective_trace
            assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:])), trace
        ok("MMD-critic: greedy prototype objective nondecreasing on 100-point random datasets")

    def test_first_prototype_matches_bruteforce(self):
        for n in (50, 120, 200):
            rng = np.random.default_rng(n)
            vectors = rng.normal(size=(n, 5))
            ids = [f"p{k:03d}" for k in range(n)]
            result = greedy_mmd(vectors, ids, m_p=3, m_c=2)
            kernel, _ = rbf_kernel_matrix(vectors)
            brute = min(range(n), key=lambda j: (-mmd_objective(kernel, [j]), ids[j]))
            assert result.prototype_ids[0] == ids[brute]
        ok("MMD-critic: first prototype equals brute-force argmax of the single-element objective (n <= 200)")


class TestKMedoids:
    def test_pam_equals_exhaustive_on_two_cluster_fixture(self):
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
        tfidf = build_tfidf(ds, "test")
        ids = list(ds.split_ids("test"))
        result = pam_kmedoids(tfidf.vectors, ids, 2)
        dist = np.clip(1.0 - tfidf.vectors @ tfidf.vectors.T, 0.0, None)
        brute_cost, brute_sets = np.inf, []
        for pair in itertools.combinations(range(6), 2):
            cost = dist[:, pair].min(axis=1).sum()
            if cost < brute_cost - 1e-12:
                brute_cost, brute_sets = cost, [pair]
            elif abs(cost - brute_cost) <= 1e-12:
                brute_sets.append(pair)
        assert result.cost == pytest.approx(brute_cost, abs=1e-12)
        assert tuple(sorted(result.medoid_ids)) in {
            tuple(sorted(ids[i] for i in pair)) for pair in brute_sets
        }
        ok("K-medoids: PAM equals exhaustive search over all C(6,2) medoid pairs")

    def test_swap_phase_never_increases_cost(self):
        for seed in (1, 2, 3, 4):
            rng = np.random.default_rng(seed)
            vectors = rng.normal(size=(15, 4))
            vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
            result = pam_kmedoids(vectors, [f"q{k:02d}" for k in range(15)], 4)
            costs = list(result.swap_costs)
            assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))
        ok("K-medoids: SWAP phase never increases cost (asserted per iteration)")


class TestMetricsFixtures:
    def test_hand_counted_confusion(self):
        table = classification_metrics(ConfusionMatrix(("A", "B"), ((1, 1), (0, 1))))
        assert table.accuracy == 2 / 3
        assert table.per_label["A"].precision == 1.0
        assert table.per_label["A"].recall == 0.5
        assert table.per_label["A"].f1 == 2 / 3
        ok("Metrics: confusion [[1,1],[0,1]] gives accuracy 2/3, P(A)=1.0, R(A)=0.5, F1(A)=2/3 exactly")

    def test_micro_f1_equals_accuracy_on_random_fixtures(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            n_labels = int(rng.integers(2, 6))
            counts = rng.integers(0, 10, size=(n_labels, n_labels))
            if counts.sum() == 0:
                counts[0][0] = 1
            cm = ConfusionMatrix(
                tuple(f"L{i}" for i in range(n_labels)),
                tuple(tuple(int(c) for c in row) for row in counts),
            )
            table = classification_metrics(cm)
            assert table.micro["f1"] == pytest.approx(table.accuracy, abs=0)
        ok("Metrics: micro-F1 == accuracy on 20 random gold/pred fixtures")


class TestTokenInformation:
    def test_separable_two_document_fixture(self):
        ds = build_dataset([("i1", "good", "pos"), ("i2", "bad", "neg")])
        handle = fixed_classifier({"good": [0.0, 1.0], "bad": [1.0, 0.0]})
        scores = dict(token_information(ds, "test", handle).overall)
        assert scores["good"] == 1.0
        ok("Token information: separable two-document fixture yields exactly 1.0 bit")

    def test_always_present_token_zero(self):
        ds = build_dataset([("i1", "z good", "pos"), ("i2", "z bad", "neg")])
        handle = fixed_classifier({"z good": [0.0, 1.0], "z bad": [1.0, 0.0]})
        scores = dict(token_information(ds, "test", handle).overall)
        assert abs(scores["z"]) <= 1e-12
        ok("Token information: always-present token yields 0 within 1e-12")


class TestFairnessFixtures:
    def test_hand_counted_dp(self):
        rows, probs = [], {}
        plan = [("g1", 1), ("g1", 1), ("g1", 0), ("g1", 0), ("g2", 1), ("g2", 0), ("g2", 0), ("g2", 0)]
        for k, (group, positive) in enumerate(plan):
            text = f"case {k}"
            rows.append((f"c{k}", text, "pos" if positive else "neg", {"grp": group}))
            probs[text] = [0.0, 1.0] if positive else [1.0, 0.0]
        ds = build_dataset(rows, labels=("neg", "pos"))
        report = fairness_classification(ds, "test", fixed_classifier(probs), "grp")
        assert report.demographic_parity_diff == 0.25
        assert report.demographic_parity_ratio == 0.5
        ok("Fairness: DP diff 0.25 and DP ratio 0.5 on the hand-counted fixture")

    def test_group_symmetric_predictions_zero_diffs(self):
        rows, probs = [], {}
        for group in ("a", "b", "c"):
            for k, positive in enumerate([1, 1, 0]):
                text = f"{group} case {k}"
                rows.append((f"{group}{k}", text, "pos" if positive else "neg", {"grp": group}))
                probs[text] = [0.0, 1.0] if positive else [1.0, 0.0]
        ds = build_dataset(rows, labels=("neg", "pos"))
        report = fairness_classification(ds, "test", fixed_classifier(probs), "grp")
        assert report.demographic_parity_diff == 0.0
        assert report.equal_opportunity_diff == 0.0
        assert report.equalized_odds_diff == 0.0
        ok("Fairness: all diffs 0 under group-symmetric predictions and golds")

    def test_regression_ks_fixture(self):
        rows, scores = [], {}
        for k, (group, value) in enumerate([("A", 0.0), ("A", 0.0), ("B", 1.0), ("B", 1.0)]):
            text = f"r {k}"
            rows.append((f"r{k}", text, value, {"grp": group}))
            scores[text] = value
        ds = build_dataset(rows, task="regression")
        report = fairness_regression(ds, "test", fixed_regressor(scores), "grp")
        assert report.dp_ks_diff == 0.5
        ok("Fairness: regression dp_ks_diff 0.5 on the {0,0} vs {1,1} fixture")


class TestRobustnessSecurity:
    def test_inv_detects_failure_on_typo_sensitive_baseline(self, tiny_baseline):
        instances = [
            Instance(f"i{k}", text)
            for k, text in enumerate(["good", "good thing", "a good one", "so good", "good good"])
        ]
        result = run_inv(instances, Perturber("typo", rate=0.2, seed=11), tiny_baseline)
        assert result.n_failures >= 1
        ok("Robustness: INV suite detects >= 1 failure on the typo-sensitive baseline")

    def test_fuzz_baseline_all_ok(self, tiny_baseline):
        result = security_fuzz(tiny_baseline)
        assert result.all_ok
        assert len(result.verdicts) == len(fuzz_corpus())
        ok("Security: fuzz corpus all-ok against the built-in baseline")

    def test_fuzz_crashing_stub_records_one_crash_and_completes(self):
        handle = spawn_external(stub_command("crashing_backend.py"), timeout=5.0)
        try:
            result = security_fuzz(handle)
        finally:
            handle.close()
        crashes = [v for v in result.verdicts if v.verdict == "crash"]
        assert len(crashes) == 1
        assert crashes[0].name == "empty"
        assert len(result.verdicts) == len(fuzz_corpus())
        ok("Security: crashing stub yields exactly one crash verdict and the corpus completes")


class TestReproducibility:
    def test_report_byte_identical_and_verifiable(self, manifest_dir, tmp_path, capsys):
        base = ["report", "--manifest", str(manifest_dir / "manifest.json"), "--seed", "5"]
        out1, out2 = tmp_path / "r1.explabox.json", tmp_path / "r2.explabox.json"
        assert run(base + ["-o", str(out1)]) == 0
        assert run(base + ["-o", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

        assert run(["verify", str(out1)]) == 0
        tampered = bytearray(out1.read_bytes())
        tampered[tampered.index(b'"digestibles"') + 20] ^= 0x01
        bad = tmp_path / "bad.explabox.json"
        bad.write_bytes(bytes(tampered))
        assert run(["verify", str(bad)]) == 3
        capsys.readouterr()
        ok("Reproducibility: report runs byte-identical; verify exits 0 untampered / 3 tampered")


class TestProtocolConformance:
    def test_reference_stub_conformance(self):
        handle = spawn_external(stub_command("reference_backend.py"), labels=["neg", "pos"], timeout=1.5)
        try:
            assert handle.labels == ("neg", "pos")  # handshake
            row = handle.predict(["good news"]).outputs[0]  # prediction
            assert abs(sum(row) - 1.0) <= 1e-6
            with pytest.raises(BackendReported):
                handle.predict(["__error__"])
            with pytest.raises(InvalidOutput):
                handle.predict(["__wrong_arity__", "extra"])
            with pytest.raises(BackendTimeout):
                handle.predict(["__hang__"])
            handle.restart_backend()
            with pytest.raises(BackendCrash):
                handle.predict(["__crash__"])
        finally:
            handle.close()
        ok("Protocol conformance: handshake/prediction/error/wrong-arity/timeout/crash all classified as specified")
