"""Loss shift, performative risk and overlay checks."""

import numpy as np
import pytest

from perfdyn.core import spawn
from perfdyn.errors import InvalidInputError
from perfdyn.instances import PerdomoTightnessInstance
from perfdyn.metrics import MetricRow, loss_shift, overlay_check, performative_risk


@pytest.fixture
def unit_instance():
    # epsilon = beta = gamma = sigma^2 = 1
    return PerdomoTightnessInstance(epsilon=1.0, beta=1.0, gamma=1.0, sigma_sq=1.0)


class TestLossShift:
    def test_equal_distributions_zero(self, unit_instance):
        d = unit_instance.induced(np.array([0.7]))
        assert loss_shift(unit_instance.loss, np.array([0.7]), d, d) == 0.0

    def test_stable_point_zero(self, unit_instance):
        ps = unit_instance.stable_point()
        d = unit_instance.induced(ps)
        assert loss_shift(unit_instance.loss, ps, d, d) == 0.0

    def test_quadratic_gaussian_hand_value(self, unit_instance):
        # model at 0.5, distributions N(0.5, 1) and N(1, 1):
        # E(theta - z)^2 = (theta - mu)^2 + sigma^2, halved by gamma/2 = 1/2:
        # |0.5*(0 + 1) - 0.5*(0.25 + 1)| = 0.125
        theta = np.array([0.5])
        d_now = unit_instance.induced(theta)            # N(0.5, 1)
        d_prev = unit_instance.induced(np.array([1.0]))  # N(1, 1)
        assert loss_shift(unit_instance.loss, theta, d_now, d_prev) == pytest.approx(
            0.125, abs=1e-15)

    def test_symmetric_under_swap(self, unit_instance):
        theta = np.array([0.3])
        a = unit_instance.induced(np.array([0.3]))
        b = unit_instance.induced(np.array([0.9]))
        assert loss_shift(unit_instance.loss, theta, a, b) == pytest.approx(
            loss_shift(unit_instance.loss, theta, b, a), abs=1e-15)

    def test_sampled_estimate_concentrates(self, unit_instance):
        theta = np.array([0.5])
        a = unit_instance.induced(theta)
        b = unit_instance.induced(np.array([1.0]))
        exact = loss_shift(unit_instance.loss, theta, a, b)

        def spread(n):
            vals = [loss_shift(unit_instance.loss, theta, a, b, n=n, rng=spawn(71, s, n))
                    for s in range(50)]
            return float(np.std(vals))

        ratio = spread(4000) / spread(1000)
        assert ratio == pytest.approx(0.5, rel=1.0)
        assert ratio < 1.0
        est = loss_shift(unit_instance.loss, theta, a, b, n=100_000, rng=spawn(71, 99))
        assert est == pytest.approx(exact, abs=0.05)


class TestPerformativeRisk:
    def test_quadratic_second_moment(self, unit_instance):
        # at the origin the risk is beta^2 sigma^2 / (2 gamma) = 0.5
        theta = np.zeros(1)
        val = performative_risk(unit_instance.loss, theta, unit_instance.induced(theta))
        assert val == pytest.approx(0.5, abs=1e-15)

    def test_sampled_within_clt_band(self, unit_instance):
        theta = np.zeros(1)
        dist = unit_instance.induced(theta)
        exact = performative_risk(unit_instance.loss, theta, dist)
        n = 100_000
        est = performative_risk(unit_instance.loss, theta, dist, n=n, rng=spawn(72, 0))
        # var of (1/2) z^2 for standard normal: (1/4) * 2 = 1/2
        se = np.sqrt(0.5 / n)
        assert abs(est - exact) < 3 * se


class TestOverlay:
    def test_trace_equal_to_curve_passes_both_directions(self):
        curve = 0.5 ** np.arange(10)
        for direction in ("lower", "upper"):
            rep = overlay_check(curve, curve, direction, 0.9)
            assert rep.passed

    def test_lower_check_flags_decay_below_curve(self):
        curve = 0.5 ** np.arange(10)
        trace = curve.copy()
        trace[7] *= 0.5
        rep = overlay_check(trace, curve, "lower", 0.9)
        assert not rep.passed and rep.worst_iteration == 7

    def test_upper_check_with_tight_slack(self):
        curve = 0.498 ** np.arange(20)
        rep = overlay_check(curve, curve, "upper", 1.0 - 1e-9)
        assert rep.passed and rep.worst_ratio == pytest.approx(1.0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            overlay_check(np.ones(3), np.ones(4), "lower", 0.9)

    def test_direction_validated(self):
        with pytest.raises(InvalidInputError):
            overlay_check(np.ones(3), np.ones(3), "sideways", 0.9)


class TestMetricRow:
    def test_nonnegativity_enforced(self):
        with pytest.raises(InvalidInputError):
            MetricRow(t=0, delta_r=-0.1, perf_risk=1.0)
        row = MetricRow(t=3, delta_r=0.1, perf_risk=-2.0, dist_to_ps=0.5)
        assert row.t == 3
