"""Analytic problem constructions: exact update maps, stable points,
span growth, sensitivity certificates, and rate curves."""

import math

import numpy as np
import pytest

from perfdyn.core import SensitivityParams, spawn
from perfdyn.errors import (
    InvalidInputError,
    RegimeViolationError,
    UnsupportedDimensionError,
    UnsupportedModeError,
)
from perfdyn.instances import (
    ARM_TWO_SNAPSHOT_CONSTANT,
    MofakhamiLowerBoundInstance,
    MofakhamiTightnessInstance,
    NegativeFeedbackInstance,
    PerdomoLowerBoundInstance,
    PerdomoTightnessInstance,
    censored_gaussian_mean,
    censored_gaussian_sq_mean,
    mofakhami_lowerbound_update,
    mofakhami_tightness_update,
    perdomo_lowerbound_update,
    perdomo_tightness_update,
    rate_curve,
)
from perfdyn.minimizers import Method, run_dynamics

FIG2 = dict(epsilon=2.49, beta=1.0, gamma=5.0)


class TestPerdomoTightness:
    def test_figure_parameters_update(self):
        inst = PerdomoTightnessInstance(**FIG2)
        assert perdomo_tightness_update(inst, [1.0])[0] == pytest.approx(0.498, abs=1e-15)

    def test_zero_is_fixed(self):
        inst = PerdomoTightnessInstance(**FIG2)
        assert perdomo_tightness_update(inst, [0.0])[0] == 0.0

    def test_empirical_mode_within_clt_band(self):
        from perfdyn.minimizers import EmpiricalMode, rrm_step

        inst = PerdomoTightnessInstance(**FIG2)
        n = 100_000
        out = rrm_step(np.array([1.0]), inst, inst.loss, inst.feasible,
                       mode=EmpiricalMode(n), rng=spawn(41, 0))
        se = (inst.beta / inst.gamma) * math.sqrt(inst.sigma_sq / n)
        assert abs(out[0] - 0.498) <= 3 * se

    def test_w1_certificate(self):
        inst = PerdomoTightnessInstance(**FIG2)
        cert = inst.sensitivity_certificate(spawn(41, 1), 100)
        assert cert.holds and cert.framework == "perdomo"

    def test_exact_map_is_linear_at_machine_precision(self):
        inst = PerdomoTightnessInstance(**FIG2)
        rng = spawn(41, 2)
        for _ in range(50):
            theta = rng.normal(size=1) * 10
            assert perdomo_tightness_update(inst, theta)[0] == pytest.approx(
                inst.rate * theta[0], rel=1e-14)


class TestPerdomoLowerBound:
    def test_stable_point_is_fixed(self):
        inst = PerdomoLowerBoundInstance(**FIG2, horizon=20)
        ps = inst.stable_point()
        assert np.linalg.norm(perdomo_lowerbound_update(inst, ps) - ps) < 1e-12

    def test_span_growth_from_first_basis_vector(self):
        inst = PerdomoLowerBoundInstance(**FIG2, horizon=10)
        theta = inst.theta0
        for t in range(8):
            theta = perdomo_lowerbound_update(inst, theta)
            assert np.all(theta[t + 2:] == 0.0), f"span leaked at t={t}"
            assert theta[t + 1] != 0.0

    def test_closed_form_entries_match_matrix_solve(self):
        inst = PerdomoLowerBoundInstance(**FIG2, horizon=12)
        closed = inst.stable_point_closed_form()
        m = (inst.gamma / inst.beta) * np.eye(inst.d) - 0.5 * inst.epsilon * inst.chain
        direct = np.linalg.solve(m, inst.theta0)
        assert np.max(np.abs(closed - direct)) < 1e-12

    def test_closed_form_regime_violation_falls_back(self):
        inst = PerdomoLowerBoundInstance(epsilon=1.5, beta=1.0, gamma=1.0, horizon=4)
        with pytest.raises(RegimeViolationError):
            inst.stable_point_closed_form()
        ps = inst.stable_point()  # direct solve fallback
        assert np.linalg.norm(inst.update(ps) - ps) < 1e-10

    def test_distance_floor_with_figure_parameters(self):
        inst = PerdomoLowerBoundInstance(**FIG2, horizon=20)
        K = inst.lower_bound_constant()
        trace = run_dynamics(inst, Method("rrm"), T=20, runs=1, seed=42, workers=1)[0]
        floor = K * inst.rate_lower ** np.arange(21)
        assert np.all(trace.dist_to_ps >= floor - 1e-15)

    def test_w1_certificate(self):
        inst = PerdomoLowerBoundInstance(**FIG2, horizon=6)
        cert = inst.sensitivity_certificate(spawn(42, 1), 100)
        assert cert.holds


class TestMofakhamiTightness:
    def test_zero_maps_to_zero(self):
        inst = MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0)
        assert mofakhami_tightness_update(inst, [0.0])[0] == 0.0

    def test_update_dominates_linear_rate_inside_ball(self):
        inst = MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0)
        rng = spawn(43, 0)
        for _ in range(50):
            theta = float(rng.uniform(0.0, inst.radius))
            out = mofakhami_tightness_update(inst, [theta])[0]
            assert out >= min(inst.rate * theta, inst.radius) - 1e-12

    def test_expanding_regime_pins_at_boundary(self):
        inst = MofakhamiTightnessInstance(epsilon=1.44, M=1.0, gamma=1.0)
        assert inst.rate > 1.0
        trace = run_dynamics(inst, Method("rrm"), T=100, runs=1, seed=43, workers=1)[0]
        assert np.all(trace.dist_to_ps >= 0.5 * inst.radius)

    def test_scalar_only(self):
        inst = MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0)
        with pytest.raises(UnsupportedDimensionError):
            inst.induced(np.array([0.1, 0.2]))
        with pytest.raises(UnsupportedDimensionError):
            MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0,
                                       theta0=np.array([0.01, 0.01]))

    def test_exact_mode_only(self):
        inst = MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0)
        with pytest.raises(UnsupportedModeError):
            inst.loss.argmin_samples(np.zeros((3, 1)), None, inst.feasible)

    def test_chi2_certificate(self):
        inst = MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0)
        cert = inst.sensitivity_certificate(spawn(43, 1), 100)
        assert cert.holds and cert.framework == "mofakhami"

    def test_initial_point_must_be_feasible(self):
        with pytest.raises(InvalidInputError):
            MofakhamiTightnessInstance(epsilon=0.64, M=1.0, gamma=1.0, theta0=[1.0])


@pytest.fixture(scope="module")
def mlb_instance():
    return MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0,
                                       delta=0.01, horizon=10)


@pytest.fixture(scope="module")
def nf_instance():
    return NegativeFeedbackInstance(epsilon=1.02**2)


class TestMofakhamiLowerBound:
    @pytest.fixture
    def inst(self, mlb_instance):
        return mlb_instance

    def test_stable_point_is_fixed(self, inst):
        ps = inst.stable_point()
        assert np.linalg.norm(mofakhami_lowerbound_update(inst, ps) - ps) < 1e-9

    def test_update_at_origin_has_positive_first_coordinate(self, inst):
        out = mofakhami_lowerbound_update(inst, np.zeros(inst.d))
        assert out[0] > 0.0
        assert np.all(out[1:] == 0.0)

    def test_span_growth(self, inst):
        theta = inst.theta0
        for t in range(6):
            theta = mofakhami_lowerbound_update(inst, theta)
            assert np.all(theta[t + 2:] == 0.0)

    def test_measured_ratio_respects_solved_tail_ratio(self, inst):
        g = inst.fixed_point_tail_ratio()
        trace = run_dynamics(inst, Method("rrm"), T=inst.horizon, runs=1,
                             seed=44, workers=1)[0]
        ratios = trace.dist_to_ps[1:] / trace.dist_to_ps[:-1]
        assert np.min(ratios) >= 0.95 * g

    def test_quoted_floor_constant_overstates_true_tail_ratio(self, inst):
        # the quoted delta->0 constant drops the exponential-mean
        # normalization, whose per-dimension suppression compounds: the
        # solved tail ratio sits well below it and the gap widens with d
        assert inst.claimed_arm_lower_constant() > 3 * inst.fixed_point_tail_ratio()
        wider = MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0,
                                            delta=0.01, horizon=20)
        assert wider.claimed_arm_lower_constant() > 20 * wider.fixed_point_tail_ratio()

    def test_projection_radius_requires_large_offset_scale(self):
        with pytest.raises(InvalidInputError):
            MofakhamiLowerBoundInstance(epsilon=0.81, M=1.0, gamma=1.0,
                                        delta=0.01, horizon=4, L=1.0)

    def test_contractive_rate_required(self):
        with pytest.raises(InvalidInputError):
            MofakhamiLowerBoundInstance(epsilon=4.0, M=1.0, gamma=1.0,
                                        delta=0.01, horizon=4)

    def test_chi2_certificate(self, inst):
        cert = inst.sensitivity_certificate(spawn(44, 1), 100)
        assert cert.holds

    def test_empirical_mode_agrees_with_exact(self, inst):
        from perfdyn.minimizers import EmpiricalMode, rrm_step

        exact = rrm_step(inst.theta0, inst, inst.loss, inst.feasible)
        emp = rrm_step(inst.theta0, inst, inst.loss, inst.feasible,
                       mode=EmpiricalMode(400_000), rng=spawn(44, 2))
        assert np.linalg.norm(emp - exact) < 5e-3


class TestNegativeFeedback:
    @pytest.fixture
    def inst(self, nf_instance):
        return nf_instance

    def test_censored_mean_oracle(self):
        rng = spawn(45, 0)
        for _ in range(10):
            mu = float(rng.uniform(-2, 2))
            sig = float(rng.uniform(0.3, 2.0))
            w = float(rng.uniform(0.5, 2.0))
            x = mu + sig * rng.standard_normal(400_000)
            clipped = np.clip(x, -w, w)
            assert censored_gaussian_mean(mu, sig, w) == pytest.approx(
                float(clipped.mean()), abs=4 * w / math.sqrt(400_000))
            assert censored_gaussian_sq_mean(mu, sig, w) == pytest.approx(
                float((clipped**2).mean()), abs=4 * w**2 / math.sqrt(400_000))

    def test_step_slope_below_two_snapshot_constant(self, inst):
        assert inst.step_slope < ARM_TWO_SNAPSHOT_CONSTANT * inst.rate

    def test_origin_is_stable(self, inst):
        assert inst.update(np.zeros(1))[0] == 0.0

    def test_update_pushes_opposite(self, inst):
        out = inst.update(np.array([0.01]))
        assert out[0] < 0.0

    def test_chi2_certificate(self, inst):
        cert = inst.sensitivity_certificate(spawn(45, 1), 100)
        assert cert.holds

    def test_empirical_mode_agrees_with_exact(self, inst):
        from perfdyn.minimizers import EmpiricalMode, rrm_step

        exact = rrm_step(inst.theta0, inst, inst.loss, inst.feasible)
        emp = rrm_step(inst.theta0, inst, inst.loss, inst.feasible,
                       mode=EmpiricalMode(400_000), rng=spawn(45, 2))
        assert abs(emp[0] - exact[0]) < 5e-3


class TestRateCurves:
    def test_parameter_rate_power(self):
        params = SensitivityParams(epsilon=0.5, beta=1.0, gamma=1.0)
        curve = rate_curve("perdomo_upper", params, 5)
        assert curve[3] == pytest.approx(0.125, abs=1e-15)
        assert curve[0] == 1.0

    def test_snapshot_floor_with_figure_parameters(self):
        params = SensitivityParams(**FIG2)
        curve = rate_curve("perdomo_arm_lower", params, 4)
        assert np.allclose(curve, 0.249 ** np.arange(5))

    def test_two_snapshot_constant_value(self):
        assert ARM_TWO_SNAPSHOT_CONSTANT == pytest.approx(0.9659258263, abs=1e-9)
        # its reciprocal bounds the convergent regime
        assert 1.0 / ARM_TWO_SNAPSHOT_CONSTANT == pytest.approx(1.035, abs=2e-3)

    def test_prediction_rate_curves(self):
        params = SensitivityParams(epsilon=0.81, M=1.0, gamma=1.0)
        up = rate_curve("mofakhami_upper", params, 3)
        assert up[2] == pytest.approx(0.81, abs=1e-12)
        low = rate_curve("mofakhami_lower", params, 2)
        assert low[1] == pytest.approx(0.9 / (1.0 / math.e + 2.0), abs=1e-12)
        arm = rate_curve("arm_upper", params, 4)
        assert arm[2] == pytest.approx(ARM_TWO_SNAPSHOT_CONSTANT * 0.9, abs=1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(InvalidInputError):
            rate_curve("nope", SensitivityParams(epsilon=1.0), 3)
