"""Core closed forms and divergences against independent oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from perfdyn.core import (
    DiscreteDistribution,
    GaussianSpec,
    SensitivityParams,
    WeightedNormSpec,
    chi2_exact_discrete,
    chi2_gaussian_shared_cov,
    chi2_gaussian_textbook,
    chi2_monte_carlo,
    gaussian_weighted_exp_mean,
    gaussian_weighted_exp_sq_mean,
    geometric_triangular_inverse_apply,
    jordan_chain_matrix,
    mixed_power_bound_check,
    spawn,
    triangular_solve_apply,
    w1_gaussian_bound,
    weighted_norm_sq,
)
from perfdyn.errors import (
    DegenerateSupportError,
    InvalidInputError,
    RegimeViolationError,
    UnsupportedModeError,
)


class TestWeightedNorm:
    def test_identical_functions_zero(self):
        ref = DiscreteDistribution(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))
        spec = WeightedNormSpec(ref, mode="exact")
        f = lambda x: 2.0 * x[:, 0]
        assert weighted_norm_sq(f, f, spec) == 0.0

    def test_constant_functions_reduce_to_parameter_gap(self):
        rng = spawn(1, 0)
        atoms = rng.normal(size=(5, 3))
        ref = DiscreteDistribution(atoms, rng.dirichlet(np.ones(5)))
        spec = WeightedNormSpec(ref, mode="exact")
        ta, tb = np.array([1.0, -2.0]), np.array([0.5, 1.0])
        f_a = lambda x: np.tile(ta, (len(x), 1))
        f_b = lambda x: np.tile(tb, (len(x), 1))
        assert weighted_norm_sq(f_a, f_b, spec) == pytest.approx(
            float(np.sum((ta - tb) ** 2)), abs=1e-15)

    def test_two_atom_weighted_sum(self):
        # oracle: 0.5 * 1^2 + 0.5 * 3^2 = 5.0
        ref = DiscreteDistribution(np.array([[0.0], [1.0]]), np.array([0.5, 0.5]))
        spec = WeightedNormSpec(ref, mode="exact")
        gaps = {0.0: 1.0, 1.0: 3.0}
        f_a = lambda x: np.array([gaps[v] for v in x[:, 0]])
        f_b = lambda x: np.zeros(len(x))
        assert weighted_norm_sq(f_a, f_b, spec) == pytest.approx(5.0, abs=1e-15)

    def test_exact_mode_needs_discrete_support(self):
        spec = WeightedNormSpec(GaussianSpec([0.0], 1.0), mode="exact")
        with pytest.raises(UnsupportedModeError):
            weighted_norm_sq(lambda x: x, lambda x: x, spec)

    def test_monte_carlo_matches_exact_on_discrete(self):
        rng = spawn(2, 0)
        ref = DiscreteDistribution(rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
        f_a = lambda x: x @ np.array([1.0, 2.0])
        f_b = lambda x: x @ np.array([-1.0, 0.5])
        exact = weighted_norm_sq(f_a, f_b, WeightedNormSpec(ref, mode="exact"))
        mc = weighted_norm_sq(f_a, f_b, WeightedNormSpec(ref, mode="monte_carlo",
                                                         n_samples=200_000), rng=spawn(2, 1))
        assert mc == pytest.approx(exact, rel=0.02)

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_symmetry(self, seed):
        rng = spawn(seed, 3)
        ref = DiscreteDistribution(rng.normal(size=(4, 2)), rng.dirichlet(np.ones(4)))
        spec = WeightedNormSpec(ref, mode="exact")
        wa, wb = rng.normal(size=2), rng.normal(size=2)
        f_a = lambda x: x @ wa
        f_b = lambda x: x @ wb
        assert weighted_norm_sq(f_a, f_b, spec) == pytest.approx(
            weighted_norm_sq(f_b, f_a, spec), abs=1e-12)

    def test_monte_carlo_sample_count_validated(self):
        ref = DiscreteDistribution(np.zeros((1, 1)), np.ones(1))
        with pytest.raises(InvalidInputError):
            WeightedNormSpec(ref, mode="monte_carlo", n_samples=0)


class TestSharedCovChi2:
    def test_identical_means_zero(self):
        res = chi2_gaussian_shared_cov([1.0, 2.0], [1.0, 2.0], 1.0)
        assert res.value == 0.0 and res.bound == 0.0

    def test_scalar_case(self):
        # q = 1 / 0.5 = 2: value 1 - e^-1, bound 1.0
        res = chi2_gaussian_shared_cov([1.0], [0.0], 0.5)
        assert res.value == pytest.approx(1.0 - math.exp(-1.0), abs=1e-15)
        assert res.bound == pytest.approx(1.0, abs=1e-15)

    def test_bound_dominates_value(self):
        rng = spawn(3, 0)
        for _ in range(100):
            d = int(rng.integers(1, 5))
            a = rng.normal(size=(d, d))
            cov = a @ a.T + 0.1 * np.eye(d)
            res = chi2_gaussian_shared_cov(rng.normal(size=d), rng.normal(size=d), cov)
            assert res.value <= res.bound + 1e-12

    def test_non_spd_covariance_rejected(self):
        with pytest.raises(InvalidInputError):
            chi2_gaussian_shared_cov([0.0, 0.0], [1.0, 0.0],
                                     np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestChi2Discrete:
    def test_identical_zero(self):
        p = np.array([0.3, 0.7])
        assert chi2_exact_discrete(p, p) == 0.0

    def test_hand_sum(self):
        # (0.1^2 / 0.5) * 2 = 0.04
        assert chi2_exact_discrete([0.6, 0.4], [0.5, 0.5]) == pytest.approx(0.04, abs=1e-15)

    def test_degenerate_support(self):
        with pytest.raises(DegenerateSupportError):
            chi2_exact_discrete([0.5, 0.5], [1.0, 0.0])


class TestChi2MonteCarlo:
    def test_matches_gaussian_closed_form(self):
        mu = 0.6
        sampler = lambda rng, n: mu + rng.standard_normal((n, 1))
        p_dens = lambda z: np.exp(-0.5 * (z[:, 0] - mu) ** 2) / math.sqrt(2 * math.pi)
        q_dens = lambda z: np.exp(-0.5 * z[:, 0] ** 2) / math.sqrt(2 * math.pi)
        est = chi2_monte_carlo(sampler, p_dens, q_dens, 1_000_000, spawn(4, 0))
        oracle = chi2_gaussian_textbook([mu], [0.0], 1.0)  # e^(mu^2) - 1
        assert est == pytest.approx(oracle, rel=0.02)

    def test_zero_reference_density_raises(self):
        sampler = lambda rng, n: rng.standard_normal((n, 1))
        with pytest.raises(DegenerateSupportError):
            chi2_monte_carlo(sampler, lambda z: np.ones(len(z)),
                             lambda z: np.zeros(len(z)), 100, spawn(4, 1))


class TestW1Bound:
    def test_identical_zero(self):
        g = GaussianSpec([1.0, 2.0], 2.0)
        assert w1_gaussian_bound(g, g) == 0.0

    def test_equal_covariance_mean_gap(self):
        # trace term vanishes: sqrt(3^2 + 4^2) = 5
        a = GaussianSpec([3.0, 4.0], 1.5)
        b = GaussianSpec([0.0, 0.0], 1.5)
        assert w1_gaussian_bound(a, b) == pytest.approx(5.0, abs=1e-12)

    def test_scalar_variance_gap(self):
        # variances 1 and 4: 1 + 4 - 2*sqrt(4) = 1
        a = GaussianSpec([0.0], 1.0)
        b = GaussianSpec([0.0], 4.0)
        assert w1_gaussian_bound(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_full_matrix_matches_isotropic(self):
        a_full = GaussianSpec([1.0, 0.0], 2.0 * np.eye(2))
        b_full = GaussianSpec([0.0, 0.0], 0.5 * np.eye(2))
        a_iso = GaussianSpec([1.0, 0.0], 2.0)
        b_iso = GaussianSpec([0.0, 0.0], 0.5)
        assert w1_gaussian_bound(a_full, b_full) == pytest.approx(
            w1_gaussian_bound(a_iso, b_iso), abs=1e-10)


class TestGaussianWeightedExpMean:
    def test_zero_mean_gives_zero(self):
        assert np.allclose(gaussian_weighted_exp_mean([0.0, 0.0], 1.3), 0.0)

    def test_monte_carlo_oracle(self):
        closed = gaussian_weighted_exp_mean([0.5], 0.5)
        rng = spawn(5, 0)
        x = 0.5 + math.sqrt(0.5) * rng.standard_normal(1_000_000)
        mc = np.mean(x * np.exp(-x**2 / (2.0 * math.e)))
        assert closed[0] == pytest.approx(mc, rel=0.01)

    def test_quadrature_oracle(self):
        mu, s2 = -0.8, 1.7
        closed = gaussian_weighted_exp_mean([mu], s2)
        f = lambda t: (t * np.exp(-t**2 / (2 * math.e))
                       * np.exp(-((t - mu) ** 2) / (2 * s2)) / math.sqrt(2 * math.pi * s2))
        quad, _ = integrate.quad(f, -30, 30)
        assert closed[0] == pytest.approx(quad, rel=1e-9)

    def test_output_parallel_to_mean(self):
        rng = spawn(5, 1)
        for _ in range(50):
            d = int(rng.integers(1, 5))
            mu = rng.normal(size=d)
            s2 = float(rng.uniform(0.1, 3.0))
            out = gaussian_weighted_exp_mean(mu, s2)
            cross = out - (out @ mu) / (mu @ mu) * mu
            assert np.linalg.norm(cross) < 1e-12

    def test_squared_weight_second_moment_oracle(self):
        mu, s2 = np.array([0.4, -0.3]), 0.9
        closed = gaussian_weighted_exp_sq_mean(mu, s2)
        rng = spawn(5, 2)
        x = mu + math.sqrt(s2) * rng.standard_normal((1_000_000, 2))
        n2 = np.sum(x**2, axis=1)
        assert closed == pytest.approx(float(np.mean(n2 * np.exp(-n2 / math.e))), rel=0.02)

    def test_nonpositive_variance_rejected(self):
        with pytest.raises(InvalidInputError):
            gaussian_weighted_exp_mean([1.0], 0.0)


class TestChainMatrix:
    def test_d1(self):
        assert np.array_equal(jordan_chain_matrix(1), [[1.0]])

    def test_d3_rows(self):
        expected = np.array([[1, 0, 0], [1, 1, 0], [0, 1, 1]], dtype=float)
        assert np.array_equal(jordan_chain_matrix(3), expected)

    def test_first_basis_vector_gains_one_coordinate(self):
        a = jordan_chain_matrix(4)
        e1 = np.array([1.0, 0.0, 0.0, 0.0])
        assert np.array_equal(a @ e1, [1.0, 1.0, 0.0, 0.0])

    def test_span_growth(self):
        a = jordan_chain_matrix(6)
        v = np.array([1.0, 2.0, 0.0, 0.0, 0.0, 0.0])  # span of first two
        assert np.all((a @ v)[3:] == 0.0)


class TestTriangularInverse:
    def test_unit_ratio_case(self):
        # b/c - 1 = 1 so every entry is 1/(c L) = 1
        assert np.allclose(geometric_triangular_inverse_apply(2.0, 1.0, 3), [1.0, 1.0, 1.0])

    def test_matches_forward_substitution(self):
        rng = spawn(6, 0)
        for _ in range(50):
            d = int(rng.integers(1, 65))
            c = float(rng.uniform(0.1, 2.0))
            b = c * float(rng.uniform(2.0, 6.0))
            scale = float(rng.uniform(0.5, 3.0))
            closed = geometric_triangular_inverse_apply(b, c, d, scale)
            direct = triangular_solve_apply(b, c, d, scale)
            assert np.max(np.abs(closed - direct)) < 1e-10

    def test_tail_sum_geometric_floor(self):
        # sum_{i>t} v_i >= K (c/b)^t for d = 2T, t <= T, K independent of t
        b, c, T = 5.0, 1.245, 16
        v = geometric_triangular_inverse_apply(b, c, 2 * T)
        ratio = c / b
        tail_over_rate = [v[t:].sum() / ratio**t for t in range(T + 1)]
        K = min(tail_over_rate)
        assert K > 0
        assert all(v[t:].sum() >= K * ratio**t - 1e-15 for t in range(T + 1))

    def test_regime_violation(self):
        with pytest.raises(RegimeViolationError):
            geometric_triangular_inverse_apply(1.5, 1.0, 3)

    def test_zero_c_rejected(self):
        with pytest.raises(InvalidInputError):
            geometric_triangular_inverse_apply(2.0, 0.0, 3)


class TestMixedPowers:
    def test_even_t_holds(self):
        assert mixed_power_bound_check(0.7, 2.1, 8)

    def test_odd_boundary_equality(self):
        # b = 4a, t = 3: 16 <= 2 * 4^(3/2) = 16
        assert mixed_power_bound_check(1.0, 4.0, 3)

    @given(st.floats(min_value=0.01, max_value=50.0),
           st.floats(min_value=0.001, max_value=4.0),
           st.integers(min_value=0, max_value=200))
    @settings(max_examples=1000, deadline=None)
    def test_random_regime(self, a, b_over_a, t):
        assert mixed_power_bound_check(a, b_over_a * a, t)

    def test_regime_precondition(self):
        with pytest.raises(InvalidInputError):
            mixed_power_bound_check(1.0, 4.5, 2)


class TestCombinationInequalities:
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1),
           st.floats(min_value=0.0, max_value=1.0),
           st.floats(min_value=0.05, max_value=5.0))
    @settings(max_examples=300, deadline=None)
    def test_convex_combination_bound(self, seed, alpha, a):
        rng = spawn(seed, 7)
        k = int(rng.integers(2, 8))
        p1, p2 = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        q = np.maximum(rng.dirichlet(np.ones(k)), 1e-3)
        q /= q.sum()
        lhs = chi2_exact_discrete(alpha * p1 + (1 - alpha) * p2, q)
        rhs = ((1 + a) * alpha**2 * chi2_exact_discrete(p1, q)
               + (1 + 1 / a) * (1 - alpha) ** 2 * chi2_exact_discrete(p2, q))
        assert lhs <= rhs + 1e-10

    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=300, deadline=None)
    def test_average_of_pairs_bound(self, seed):
        rng = spawn(seed, 8)
        k = int(rng.integers(2, 8))
        a1, a2 = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        b1 = np.maximum(rng.dirichlet(np.ones(k)), 1e-3)
        b1 /= b1.sum()
        b2 = np.maximum(rng.dirichlet(np.ones(k)), 1e-3)
        b2 /= b2.sum()
        lhs = chi2_exact_discrete(0.5 * (a1 + a2), 0.5 * (b1 + b2))
        assert lhs <= chi2_exact_discrete(a1, b1) + chi2_exact_discrete(a2, b2) + 1e-10


class TestTypes:
    def test_gaussian_rejects_nonfinite_mean(self):
        with pytest.raises(InvalidInputError):
            GaussianSpec([np.nan], 1.0)

    def test_gaussian_rejects_negative_variance(self):
        with pytest.raises(InvalidInputError):
            GaussianSpec([0.0], -1.0)

    def test_sensitivity_params_validation(self):
        with pytest.raises(InvalidInputError):
            SensitivityParams(epsilon=-0.1)
        with pytest.raises(InvalidInputError):
            SensitivityParams(epsilon=1.0, C=0.5)
        p = SensitivityParams(epsilon=2.49, beta=1.0, gamma=5.0)
        assert p.parameter_rate == pytest.approx(0.498)

    def test_discrete_distribution_probs_validated(self):
        with pytest.raises(InvalidInputError):
            DiscreteDistribution(np.zeros((2, 1)), np.array([0.7, 0.7]))

    def test_spawn_reproducible(self):
        a = spawn(9, 1, 2).standard_normal(5)
        b = spawn(9, 1, 2).standard_normal(5)
        c = spawn(9, 1, 3).standard_normal(5)
        assert np.array_equal(a, b) and not np.array_equal(a, c)
