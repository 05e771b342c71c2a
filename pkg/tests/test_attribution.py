"""LIME / Shapley attribution tests.

The Shapley oracle here is an independent brute force: the average marginal
contribution over every permutation of the token order.
"""

import itertools
import math

import numpy as np
import pytest

from explabox.explain import (
    AttributionError,
    LimeParams,
    ShapParams,
    exact_shapley,
    kernel_shap,
    lime,
    shapley_from_value_table,
)
from explabox.ingest import Instance
from explabox.report import canonical_json, to_plain

from conftest import additive_regressor


def permutation_shapley(values: np.ndarray, d: int) -> np.ndarray:
    """Average marginal contribution over all d! orders (independent oracle)."""
    phi = np.zeros(d)
    for perm in itertools.permutations(range(d)):
        mask = 0
        for i in perm:
            phi[i] += values[mask | (1 << i)] - values[mask]
            mask |= 1 << i
    return phi / math.factorial(d)


class TestShapleyFromTable:
    def test_matches_permutation_oracle_random_tables(self):
        rng = np.random.default_rng(5)
        for d in (2, 3, 4, 5):
            values = rng.random(2**d)
            base, phi = shapley_from_value_table(values, d)
            assert base == values[0]
            assert phi == pytest.approx(permutation_shapley(values, d), abs=1e-12)

    def test_symmetric_value_function(self):
        # v depends only on |S| -> equal phi
        d = 4
        values = np.array([math.sqrt(bin(m).count("1")) for m in range(2**d)])
        _, phi = shapley_from_value_table(values, d)
        assert np.ptp(phi) < 1e-12

    def test_dummy_token_gets_zero(self):
        # token 2 never changes v
        d = 3
        values = np.array([float(bin(m & 0b011).count("1")) for m in range(2**d)])
        _, phi = shapley_from_value_table(values, d)
        assert abs(phi[2]) < 1e-12


class TestExactShapley:
    def test_additive_model_recovers_increments(self):
        handle = additive_regressor({"alpha": 0.5, "beta": 0.2}, intercept=0.1)
        result = exact_shapley(Instance("i", "alpha beta"), handle)
        assert result.base_value == pytest.approx(0.1)
        assert result.weights == pytest.approx((0.5, 0.2))

    def test_efficiency(self):
        handle = additive_regressor({"a": 0.3, "b": -0.4, "c": 0.2}, intercept=0.5)
        result = exact_shapley(Instance("i", "a b c"), handle)
        v_full = 0.5 + 0.3 - 0.4 + 0.2
        assert result.base_value + sum(result.weights) == pytest.approx(v_full, abs=1e-8)

    def test_threshold_enforced(self):
        handle = additive_regressor({f"t{k}": 0.1 for k in range(4)})
        text = " ".join(f"t{k}" for k in range(4))
        with pytest.raises(AttributionError, match="threshold"):
            exact_shapley(Instance("i", text), handle, params=ShapParams(exact_threshold=3))

    def test_empty_instance_rejected(self):
        handle = additive_regressor({"a": 1.0})
        with pytest.raises(AttributionError, match="no tokens"):
            exact_shapley(Instance("i", "..."), handle)


class TestKernelShap:
    def test_matches_exact_on_enumerated_path(self, tiny_baseline):
        instance = Instance("i", "good bad meh")
        exact = exact_shapley(instance, tiny_baseline, "pos")
        kernel = kernel_shap(instance, tiny_baseline, "pos", seed=0)
        assert kernel.weights == pytest.approx(exact.weights, abs=1e-6)
        assert kernel.base_value == pytest.approx(exact.base_value, abs=1e-9)

    def test_constraint_exact(self, tiny_baseline):
        instance = Instance("i", "good bad")
        result = kernel_shap(instance, tiny_baseline, "pos")
        v_full = tiny_baseline.predict_matrix(["good bad"])[0][1]
        assert result.base_value + sum(result.weights) - v_full == pytest.approx(0.0, abs=1e-8)

    def test_needs_two_tokens(self, tiny_baseline):
        with pytest.raises(AttributionError, match="at least 2"):
            kernel_shap(Instance("i", "good good"), tiny_baseline, "pos")

    def test_sampled_path_close_to_exact(self):
        coefs = {f"t{k}": 0.05 * (k + 1) for k in range(14)}  # d=14 > threshold 12
        handle = additive_regressor(coefs, intercept=0.2)
        text = " ".join(coefs)
        result = kernel_shap(Instance("i", text), handle, seed=0, params=ShapParams(n_samples=4096))
        # additive model: phi should equal the coefficients
        expected = [coefs[t] for t in result.tokens]
        assert result.weights == pytest.approx(expected, abs=5e-3)
        assert result.base_value + sum(result.weights) == pytest.approx(
            0.2 + sum(coefs.values()), abs=1e-8
        )

    def test_seeded_determinism(self):
        coefs = {f"t{k}": 0.05 * (k + 1) for k in range(14)}
        handle = additive_regressor(coefs)
        text = " ".join(coefs)
        a = kernel_shap(Instance("i", text), handle, seed=9)
        b = kernel_shap(Instance("i", text), handle, seed=9)
        assert a == b


class TestLime:
    def test_additive_recovery_enumerated(self):
        handle = additive_regressor({"alpha": 0.5, "beta": 0.2}, intercept=0.1)
        result = lime(
            Instance("i", "alpha beta"),
            handle,
            params=LimeParams(ridge_strength=0.0, exhaustive=True),
        )
        assert result.base_value == pytest.approx(0.1, abs=1e-8)
        assert result.weights == pytest.approx((0.5, 0.2), abs=1e-8)

    def test_ranking_matches_model_with_default_sampling(self):
        coefs = {"aa": 0.40, "bb": 0.25, "cc": 0.15, "dd": 0.10, "ee": 0.05}
        handle = additive_regressor(coefs, intercept=0.1)
        result = lime(Instance("i", "aa bb cc dd ee"), handle, seed=13)
        got_order = [result.tokens[i] for i in np.argsort(result.weights)[::-1]]
        assert got_order == ["aa", "bb", "cc", "dd", "ee"]

    def test_byte_identical_for_fixed_seed(self, tiny_baseline):
        a = lime(Instance("i9", "good bad day"), tiny_baseline, "pos", seed=21)
        b = lime(Instance("i9", "good bad day"), tiny_baseline, "pos", seed=21)
        assert a == b
        assert canonical_json(to_plain(a)) == canonical_json(to_plain(b))

    def test_target_label_defaults_to_argmax(self, tiny_baseline):
        result = lime(Instance("i", "good stuff"), tiny_baseline, seed=1)
        assert result.target_label == "pos"

    def test_top_weights_zeroing(self):
        handle = additive_regressor({"a": 0.5, "b": 0.3, "c": 0.1}, intercept=0.0)
        result = lime(
            Instance("i", "a b c"), handle, params=LimeParams(ridge_strength=0.0, exhaustive=True)
        )
        rendered = result.top_weights(2)
        assert rendered[0] != 0.0 and rendered[1] != 0.0
        assert rendered[2] == 0.0
        # raw result keeps all weights
        assert result.weights[2] == pytest.approx(0.1, abs=1e-8)

    def test_empty_token_set_rejected(self, tiny_baseline):
        with pytest.raises(AttributionError, match="no tokens"):
            lime(Instance("i", "!!!"), tiny_baseline, "pos")
