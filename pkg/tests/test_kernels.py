"""Reference/compiled backend agreement on the hot kernels."""

import numpy as np
import pytest

from cpgame import _kernels_py
from cpgame.rng import derive_rng

compiled = pytest.importorskip("cpgame._kernels")

BACKENDS = (_kernels_py, compiled)


def random_problem(seed, n=8, k=20):
    rng = derive_rng(77, seed)
    deltas = rng.normal(0.0, 2.0, (k, n))
    deltas -= deltas.mean(axis=1, keepdims=True)
    baseline = rng.uniform(4.0, 9.0, n)
    opponent = rng.uniform(0.0, 60.0, n)
    prices = rng.uniform(0.0, 4.0, n)
    return deltas, baseline, opponent, prices


class TestGreedyFill:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches(self, seed):
        rng = derive_rng(78, seed)
        n = int(rng.integers(1, 12))
        headroom = rng.uniform(0.0, 5.0, n)
        order = rng.permutation(n).astype(np.int64)
        amount = float(rng.uniform(0.0, headroom.sum() * 1.2))
        a_ref, left_ref = _kernels_py.greedy_fill(amount, order, headroom)
        a_c, left_c = compiled.greedy_fill(amount, order, headroom)
        assert np.allclose(a_ref, a_c, atol=1e-12)
        assert left_ref == pytest.approx(left_c, abs=1e-12)


class TestTotalCostsBatch:
    @pytest.mark.parametrize("seed", range(10))
    def test_matches(self, seed):
        deltas, baseline, opponent, prices = random_problem(seed)
        ref = _kernels_py.total_costs_batch(deltas, baseline, opponent, prices, 321.0, 1e-6)
        fast = compiled.total_costs_batch(deltas, baseline, opponent, prices, 321.0, 1e-6)
        assert np.allclose(ref, fast, rtol=1e-12, atol=1e-9)

    def test_degenerate_raises_in_both(self):
        zeros = np.zeros((1, 2))
        for kernel in BACKENDS:
            with pytest.raises(ValueError):
                kernel.total_costs_batch(zeros, np.zeros(2), np.zeros(2), np.zeros(2), 1.0, 1e-6)


class TestExpectedTotalCostsBatch:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches(self, seed):
        deltas, baseline, opponent, prices = random_problem(seed)
        rng = derive_rng(79, seed)
        profiles = opponent[None, :] + rng.uniform(0.0, 10.0, (7, opponent.shape[0]))
        weights = rng.random(7)
        weights /= weights.sum()
        ref = _kernels_py.expected_total_costs_batch(
            deltas, baseline, profiles, weights, prices, 321.0, 1e-6
        )
        fast = compiled.expected_total_costs_batch(
            deltas, baseline, profiles, weights, prices, 321.0, 1e-6
        )
        assert np.allclose(ref, fast, rtol=1e-12, atol=1e-9)


class TestContinuousSearch:
    @pytest.mark.parametrize("seed", range(20))
    def test_matches(self, seed):
        rng = derive_rng(80, seed)
        n = int(rng.integers(3, 10))
        opponent = rng.uniform(0.0, 50.0, n)
        prices = rng.uniform(0.0, 4.0, n)
        h = int(rng.integers(0, n - 1))
        lower = float(rng.uniform(0.0, 2.0))
        upper = lower + float(rng.uniform(3.0, 10.0))
        frozen = rng.uniform(lower, upper, h)
        energy = float(rng.uniform(lower * n, upper * n * 0.8))
        residual = energy - frozen.sum()
        if not (lower * (n - h) <= residual <= upper * (n - h)):
            pytest.skip("infeasible draw")
        args = (opponent, prices, frozen, lower, upper, energy, 41, 200.0, 1e-6, None)
        x_ref, c_ref = _kernels_py.continuous_search(*args)
        x_c, c_c = compiled.continuous_search(*args)
        assert (x_ref is None) == (x_c is None)
        if x_ref is not None:
            assert np.allclose(x_ref, x_c, atol=1e-9)
            assert c_ref == pytest.approx(c_c, rel=1e-12)

    def test_initial_candidate_kept_on_tie(self):
        opponent = np.full(2, 10.0)
        prices = np.zeros(2)
        initial = np.array([5.0, 5.0])
        for kernel in BACKENDS:
            x, cost = kernel.continuous_search(
                opponent, prices, np.empty(0), 0.0, 10.0, 10.0, 101, 100.0, 1e-6, initial
            )
            assert np.array_equal(x, initial)
