import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from convexdom.core import Belief, Order, StateLevels, mlr_compare
from convexdom.densities import Gaussian, Uniform
from convexdom.errors import CoverageWarning, OutOfSupport, ZeroNormalizer
from convexdom.filtering import (
    FilterState,
    GridDensity,
    conditional_mean,
    filter_sequence,
    filter_update,
    grid_filter_update,
    predict,
    two_timescale_likelihood,
    update_with_likelihood,
)
from convexdom.fixtures import EX1, EX3, GLOBAL, GLOBAL_P, WOM_B2, word_of_mouth_sensor1
from convexdom.orders import check_tp2

from conftest import beliefs, stochastic_matrices, tp2_matrices

TP2_FIXTURES = [EX1[0], EX1[1], EX3[0], EX3[1], GLOBAL[0], GLOBAL[1], word_of_mouth_sensor1(), WOM_B2]


class TestFilterUpdate:
    def test_noninformative(self):
        B = np.full((3, 4), 0.25)
        P = np.array(EX1[0])
        post, sigma = filter_update([0.2, 0.3, 0.5], 2, P, B)
        assert np.allclose(post.weights, predict([0.2, 0.3, 0.5], P))
        assert sigma == pytest.approx(0.25)

    def test_perfect_observation(self):
        post, sigma = filter_update([0.5, 0.5], 0, None, np.eye(2))
        assert post.weights.tolist() == [1.0, 0.0]
        assert sigma == 0.5

    def test_hand_computed(self):
        post, sigma = filter_update([0.5, 0.5], 0, None, EX3[0])
        assert np.allclose(post.weights, [0.8, 0.2])
        assert sigma == pytest.approx(0.5)

    def test_zero_normalizer(self):
        with pytest.raises(ZeroNormalizer):
            filter_update([1.0, 0.0], 1, None, np.eye(2))

    @given(stochastic_matrices(rows=(3, 3)), st.integers(2, 3).flatmap(beliefs))
    def test_output_is_belief_and_sigmas_sum_to_one(self, B, pi):
        n = B.shape[0]
        pi = np.resize(pi, n)
        pi = pi / pi.sum()
        total = 0.0
        for y in range(B.shape[1]):
            post, s = filter_update(pi, y, None, B)
            assert isinstance(post, Belief)
            total += s
        assert total == pytest.approx(1.0, abs=1e-12)


class TestSequence:
    def test_empty(self):
        fs = filter_sequence([0.3, 0.7], [], None, EX3[0])
        assert fs.log_normalizer == 0.0
        assert np.allclose(fs.belief.weights, [0.3, 0.7])

    def test_fold(self):
        P = np.array(GLOBAL_P)
        b1, s1 = filter_update([0.4, 0.6], 1, P, GLOBAL[0])
        b2, s2 = filter_update(b1, 0, P, GLOBAL[0])
        fs = filter_sequence([0.4, 0.6], [1, 0], P, GLOBAL[0])
        assert np.allclose(fs.belief.weights, b2.weights)
        assert fs.log_normalizer == pytest.approx(np.log(s1) + np.log(s2))

    def test_long_sequence_no_underflow(self):
        fs = filter_sequence([0.5, 0.5], [0, 1] * 400, None, GLOBAL[1])
        assert np.isfinite(fs.log_normalizer) and fs.log_normalizer < -500

    def test_failing_step_index(self):
        with pytest.raises(ZeroNormalizer) as err:
            filter_sequence([1.0, 0.0, 0.0], [0, 0, 2], None, EX1[0])
        assert err.value.step == 2

    @given(tp2_matrices(rows=(3, 3)), st.integers(1, 6))
    def test_repeats_push_belief_up(self, B, reps):
        top = B.shape[1] - 1
        a = filter_sequence(Belief.uniform(3), [top] * reps, None, B).belief
        b = filter_sequence(Belief.uniform(3), [top] * (reps + 1), None, B).belief
        assert mlr_compare(b, a, 1e-12) in (Order.GE, Order.EQ)


class TestConditionalMean:
    def test_values(self):
        assert conditional_mean(Belief([0.8, 0.2]), StateLevels([0.0, 1.0])) == pytest.approx(0.2)
        assert conditional_mean(Belief([0.0, 0.0, 1.0]), [1.0, 5.0, 9.0]) == 9.0
        assert conditional_mean(FilterState(Belief([0.5, 0.5])), [0.0, 2.0]) == 1.0

    def test_martingale_identity(self, rng):
        worst = 0.0
        for _ in range(1000):
            n, m = rng.integers(2, 5), rng.integers(2, 5)
            B = rng.dirichlet(np.ones(m), size=n)
            pi = rng.dirichlet(np.ones(n))
            g = np.sort(rng.normal(size=n))
            acc = 0.0
            for y in range(m):
                try:
                    post, s = filter_update(pi, y, None, B)
                except ZeroNormalizer:
                    continue
                acc += conditional_mean(post, g) * s
            worst = max(worst, abs(acc - g @ pi))
        assert worst <= 1e-12

    @pytest.mark.parametrize("B", TP2_FIXTURES)
    def test_mlr_monotone_in_observation(self, B, rng):
        assert check_tp2(B).holds
        B = np.asarray(B)
        n = B.shape[0]
        for _ in range(50):
            pi = rng.dirichlet(np.ones(n))
            posts = []
            for y in range(B.shape[1]):
                try:
                    posts.append(filter_update(pi, y, None, B)[0])
                except ZeroNormalizer:
                    posts.append(None)
            live = [p for p in posts if p is not None]
            for lo, hi in zip(live, live[1:]):
                assert mlr_compare(hi, lo, 1e-12) in (Order.GE, Order.EQ)
                assert conditional_mean(hi, np.arange(n)) >= conditional_mean(lo, np.arange(n)) - 1e-12


class TestTwoTimescale:
    def test_single(self):
        assert np.allclose(two_timescale_likelihood(EX3[0], [1]), np.asarray(EX3[0])[:, 1])

    def test_repeated(self):
        B = np.asarray(EX3[0])
        assert np.allclose(two_timescale_likelihood(B, [1, 1]), B[:, 1] ** 2)

    def test_symmetric_cancellation(self):
        lik = two_timescale_likelihood(EX3[0], [0, 1])
        assert np.allclose(lik, [0.16, 0.16])
        b = Belief([0.3, 0.7])
        post, _ = update_with_likelihood(b, lik)
        assert np.allclose(post.weights, b.weights)

    def test_empty(self):
        with pytest.raises(OutOfSupport):
            two_timescale_likelihood(EX3[0], [])


def conjugate(prior_var, noise_var, y, prior_mean=0.0):
    v = 1 / (1 / prior_var + 1 / noise_var)
    return v * (prior_mean / prior_var + y / noise_var), v


class TestGridFilter:
    @pytest.mark.parametrize("y", [0.0, 0.7, -1.3])
    def test_conjugate_gaussian(self, y):
        grid = np.linspace(-8, 8, 2001)
        prior = GridDensity.from_values(grid, stats.norm.pdf(grid))
        post, sigma = grid_filter_update(prior, y, Gaussian(1.0))
        m, v = conjugate(1.0, 1.0, y)
        assert abs(post.mean() - m) <= 1e-6
        assert abs(post.variance() - v) <= 1e-6
        assert sigma == pytest.approx(stats.norm.pdf(y, scale=np.sqrt(2.0)), rel=1e-6)

    def test_flat_prior_mode(self):
        prior = GridDensity.uniform(-10, 10, 2001)
        post, _ = grid_filter_update(prior, 1.5, Gaussian(0.8))
        assert post.grid[np.argmax(post.values)] == pytest.approx(1.5)

    def test_random_walk_transition(self):
        grid = np.linspace(-10, 10, 2001)
        q = 0.5
        K = stats.norm.pdf(grid[None, :], loc=grid[:, None], scale=q)
        prior = GridDensity.from_values(grid, stats.norm.pdf(grid))
        post, _ = grid_filter_update(prior, 0.4, Gaussian(1.0), transition=K)
        m, v = conjugate(1.0 + q**2, 1.0, 0.4)
        assert abs(post.mean() - m) <= 1e-6
        assert abs(post.variance() - v) <= 1e-6

    def test_zero_normalizer(self):
        prior = GridDensity.uniform(0, 1, 101)
        with pytest.raises(ZeroNormalizer):
            grid_filter_update(prior, 5.0, Uniform(1.0))

    def test_coverage_warning(self):
        prior = GridDensity.uniform(-1, 1, 101)
        with pytest.warns(CoverageWarning):
            grid_filter_update(prior, 0.0, Gaussian(1e-4))
        with warnings.catch_warnings():
            warnings.simplefilter("error", CoverageWarning)
            grid_filter_update(prior, 0.0, Gaussian(0.5))
