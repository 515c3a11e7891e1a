import math

import numpy as np
import pytest

from mopd.diagnostics import (
    GapEstimate,
    ParetoReference,
    c0_bound,
    feasibility,
    gap_lower_bound,
    kkt_pair,
    kkt_residual,
    lyapunov,
    objective_gap,
    rate_slope,
    theta_bound,
)
from mopd.problems import make_bk1, make_witting, pareto_reference

SQRT2 = math.sqrt(2.0)


class TestFeasibility:
    def test_on_and_off_the_constraint(self):
        p = make_bk1()
        assert feasibility(p, np.array([3.0, 2.0])) == 0.0
        assert feasibility(p, np.zeros(2)) == pytest.approx(1.0)


class TestKktResidual:
    def test_zero_at_stationary_points(self):
        # on the segment between the two unconstrained optima the hull of the
        # gradients contains -A^T xi with xi = -1
        p = make_bk1()
        xi = np.array([-1.0])
        for pt in ([3.0, 2.0], [0.5, -0.5], [5.5, 4.5]):
            assert kkt_residual(p, np.array(pt), xi) < 1e-12

    def test_infeasible_point(self):
        p = make_bk1()
        # at the origin both terms but the feasibility one vanish
        assert kkt_residual(p, np.zeros(2), np.zeros(1)) == pytest.approx(1.0)

    def test_positive_off_the_front(self):
        p = make_bk1()
        # feasible but not stationary: residual comes from the hull term
        assert kkt_residual(p, np.array([7.0, 6.0]), np.array([-1.0])) > 1.0


class TestObjectiveGap:
    def test_known_value_past_the_endpoint(self):
        p = make_bk1()
        ref = pareto_reference(p, 201)
        est = objective_gap(p, np.array([6.0, 5.0]), ref)
        assert est.value == pytest.approx(0.5, abs=1e-12)
        assert est.n_refs == 201

    def test_zero_on_the_front(self):
        p = make_bk1()
        ref = pareto_reference(p, 201)
        est = objective_gap(p, np.array([5.5, 4.5]), ref)
        assert est.value == pytest.approx(0.0, abs=1e-12)

    def test_lower_bound_zero_when_feasible(self):
        p = make_bk1()
        ref = pareto_reference(p, 51)
        est = objective_gap(p, np.array([6.0, 5.0]), ref)
        assert est.lower_bound == pytest.approx(0.0, abs=1e-12)

    def test_empty_reference_rejected(self):
        p = make_bk1()
        ref = ParetoReference(points=np.zeros((0, 2)), values=np.zeros((0, 2)), source="x")
        with pytest.raises(ValueError):
            objective_gap(p, np.zeros(2), ref)


class TestGapLowerBound:
    def test_hand_arithmetic(self):
        # ||A|| = sigma+ = sqrt(2), diam 10, x at the origin:
        #   E2 = 2*10 + 1/sqrt(2),  E1 = 2*E2 + 10*sqrt(2),
        #   bound = -E1 * 1 / sqrt(2) = -(20*sqrt(2) + 11)
        p = make_bk1()
        got = gap_lower_bound(p, np.zeros(2), 10.0)
        assert got == pytest.approx(-(20.0 * SQRT2 + 11.0), rel=1e-12)

    def test_zero_residual_gives_zero(self):
        p = make_bk1()
        assert gap_lower_bound(p, np.array([3.0, 2.0]), 10.0) == pytest.approx(0.0, abs=1e-12)

    def test_diameter_must_cover_the_point(self):
        p = make_bk1()
        with pytest.raises(ValueError):
            gap_lower_bound(p, np.array([6.0, 5.0]), 1.0)


class TestLyapunov:
    def test_zero_at_the_anchor(self):
        p = make_bk1()
        x = np.array([3.0, 2.0])
        xi = np.array([-1.0])
        assert lyapunov(p, x, x, xi, 1.0, 1.0, x, xi) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        # pi_1 = (2 + 1) - 13 = -10, quadratic terms 5 and 0.5625
        p = make_bk1()
        E = lyapunov(
            p,
            np.array([1.0, 1.0]),
            np.array([2.0, 0.0]),
            np.array([0.5]),
            0.5,
            2.0,
            np.array([3.0, 2.0]),
            np.array([-1.0]),
        )
        assert E == pytest.approx(-4.4375, rel=1e-12)

    def test_infeasible_anchor_rejected(self):
        p = make_bk1()
        with pytest.raises(ValueError):
            lyapunov(p, np.zeros(2), np.zeros(2), np.zeros(1), 1.0, 1.0, np.zeros(2), np.zeros(1))


class TestC0Bound:
    def test_hand_value(self):
        # max gradient norm at 0 is 10*sqrt(2); all radii 1 from the origin
        p = make_bk1()
        got = c0_bound(p, np.zeros(2), np.zeros(2), np.zeros(1), 1.0, 1.0, 1.0, 1.0)
        assert got == pytest.approx(10.0 * SQRT2 + 7.0, rel=1e-12)

    def test_negative_radius_rejected(self):
        p = make_bk1()
        with pytest.raises(ValueError):
            c0_bound(p, np.zeros(2), np.zeros(2), np.zeros(1), 1.0, 1.0, -1.0, 1.0)


class TestThetaBound:
    def test_all_ones_case(self):
        # both branches finite; the exponential branch wins at k = 10
        amax = 1.0 / SQRT2
        b0 = 2.0 + math.sqrt(amax)
        b1 = 2.0 / 10.0 + 4.0 * b0 * b0 / 100.0
        b2 = 4.0 * b0 * b0 / 100.0 + math.exp(-10.0 * math.log1p(amax) / (2.0 * amax))
        got = theta_bound(10, 1.0, 1.0, 1.0, 1.0, 1.0)
        assert got == pytest.approx(min(b1, b2), rel=1e-12)
        assert got == pytest.approx(0.345613741527799, rel=1e-10)

    def test_mu_zero_uses_sublinear_branch(self):
        amax = 1.0 / math.sqrt(3.0)
        b0 = 2.0 + math.sqrt(amax)
        want = 2.0 / 5.0 + 4.0 * 2.0 * b0 * b0 / 25.0
        assert theta_bound(5, 1.0, 1.0, 0.0, 2.0, 1.0) == pytest.approx(want, rel=1e-12)

    def test_lip_zero_drops_exponential_term(self):
        assert theta_bound(3, 1.0, 1.0, 1.0, 0.0, 1.0) == pytest.approx(2.0 / 3.0, rel=1e-12)

    def test_decreases_in_k(self):
        vals = [theta_bound(k, 1.0, 1.0, 0.5, 2.0, SQRT2) for k in (1, 4, 16, 64, 256)]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            theta_bound(0, 1.0, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            theta_bound(3, 1.0, 1.0, 1.0, 0.0, 0.0)


class TestRateSlope:
    class Row:
        def __init__(self, k, val):
            self.k = k
            self.kkt = val
            self.gap_est = val

    def _trace(self, power):
        return [self.Row(k, k**power if k else 1.0) for k in range(0, 51)]

    def test_recovers_power(self):
        assert rate_slope(self._trace(-1.0), "kkt", 5, 50) == pytest.approx(-1.0, abs=1e-9)
        assert rate_slope(self._trace(-2.0), "kkt", 5, 50) == pytest.approx(-2.0, abs=1e-9)

    def test_gap_alias(self):
        assert rate_slope(self._trace(-1.0), "gap", 5, 50) == pytest.approx(-1.0, abs=1e-9)

    def test_window_validation(self):
        trace = self._trace(-1.0)
        with pytest.raises(ValueError):
            rate_slope(trace, "kkt", 10, 10)
        with pytest.raises(ValueError):
            rate_slope(trace, "kkt", 0, 10)

    def test_nonpositive_values_rejected(self):
        trace = [self.Row(k, 0.0) for k in range(0, 20)]
        with pytest.raises(ValueError):
            rate_slope(trace, "kkt", 2, 10)


class TestKktPair:
    def test_bk1_balanced_weights(self):
        # equal weights: stationarity of (f1+f2)/2 on the constraint
        p = make_bk1()
        x, xi = kkt_pair(p, np.array([0.5, 0.5]))
        assert kkt_residual(p, x, xi) < 1e-9
        np.testing.assert_allclose(x, [3.0, 2.0], atol=1e-12)
        np.testing.assert_allclose(xi, [-1.0], atol=1e-12)

    def test_extreme_weights_hit_endpoints(self):
        p = make_bk1()
        x1, _ = kkt_pair(p, np.array([1.0, 0.0]))
        x2, _ = kkt_pair(p, np.array([0.0, 1.0]))
        np.testing.assert_allclose(x1, [0.5, -0.5], atol=1e-12)
        np.testing.assert_allclose(x2, [5.5, 4.5], atol=1e-12)

    def test_requires_quadratic_data(self):
        w = make_witting()
        with pytest.raises(ValueError):
            kkt_pair(w, np.array([0.5, 0.5]))

    def test_weight_validation(self):
        p = make_bk1()
        with pytest.raises(ValueError):
            kkt_pair(p, np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            kkt_pair(p, np.array([-0.2, 1.2]))


class TestGapEstimateShape:
    def test_fields(self):
        est = GapEstimate(value=1.0, lower_bound=-2.0, n_refs=5)
        assert est.value == 1.0 and est.lower_bound == -2.0 and est.n_refs == 5
