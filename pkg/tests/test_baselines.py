import numpy as np
import pytest

from mopd.baselines import (
    AlamoParams,
    ArmijoParams,
    BaselineError,
    alamo_solve,
    armijo_step,
    msd_direction,
)
from mopd.problem import LinearConstraint, Objective, Problem
from mopd.problems import make_bk1, rng_for

SEGMENT_LO, SEGMENT_HI = 0.5, 5.5


def quad_objective(center, scale=1.0):
    center = np.asarray(center, dtype=float)
    return Objective(
        eval=lambda x: scale * float(np.sum((x - center) ** 2)),
        grad=lambda x: 2.0 * scale * (np.asarray(x, dtype=float) - center),
        mu=2.0 * scale,
        lip=2.0 * scale,
    )


def unconstrained(objs, n):
    return Problem(objectives=objs, constraint=LinearConstraint(A=np.zeros((1, n)), b=np.zeros(1)))


def dist_to_segment(x):
    t = np.clip((x[0] + x[1] + 1.0) / 2.0, SEGMENT_LO, SEGMENT_HI)
    return float(np.linalg.norm(x - np.array([t, t - 1.0])))


class TestParams:
    def test_armijo_validation(self):
        with pytest.raises(ValueError, match="c"):
            ArmijoParams(c=1.0)
        with pytest.raises(ValueError, match="shrink"):
            ArmijoParams(shrink=0.0)
        with pytest.raises(ValueError, match="t0"):
            ArmijoParams(t0=-1.0)
        with pytest.raises(ValueError, match="max_backtracks"):
            ArmijoParams(max_backtracks=-1)

    def test_alamo_validation(self):
        with pytest.raises(ValueError, match="tau0"):
            AlamoParams(tau0=0.0)
        with pytest.raises(ValueError, match="growth"):
            AlamoParams(growth=1.0)
        with pytest.raises(ValueError, match="sigma"):
            AlamoParams(sigma=1.0)
        with pytest.raises(ValueError, match="inner_tol"):
            AlamoParams(inner_tol=0.0)
        with pytest.raises(ValueError, match="outer_max"):
            AlamoParams(outer_max=0)


class TestMsdDirection:
    def test_single_objective_is_negative_gradient(self):
        p = unconstrained([quad_objective([0.0, 0.0], scale=0.25)], 2)
        d, theta_val = msd_direction(p, np.array([2.0, 0.0]))
        # grad of ||x||^2/4 at (2,0) is (1,0)... scaled: 0.5*(2,0) = (1,0)
        assert np.allclose(d, [-1.0, 0.0], atol=1e-12)
        assert theta_val == pytest.approx(-1.0, abs=1e-12)

    def test_opposed_gradients_mean_critical(self):
        objs = [
            Objective(eval=lambda x: float(x[0]), grad=lambda x: np.array([1.0, 0.0]),
                      mu=0.0, lip=1.0),
            Objective(eval=lambda x: -float(x[0]), grad=lambda x: np.array([-1.0, 0.0]),
                      mu=0.0, lip=1.0),
        ]
        d, theta_val = msd_direction(unconstrained(objs, 2), np.zeros(2))
        assert np.linalg.norm(d) < 1e-9
        assert abs(theta_val) < 1e-18

    def test_min_norm_of_a_slanted_pair(self):
        objs = [
            Objective(eval=lambda x: 0.0, grad=lambda x: np.array([1.0, 1.0]),
                      mu=0.0, lip=1.0),
            Objective(eval=lambda x: 0.0, grad=lambda x: np.array([1.0, -1.0]),
                      mu=0.0, lip=1.0),
        ]
        d, _ = msd_direction(unconstrained(objs, 2), np.zeros(2))
        assert np.allclose(d, [-1.0, 0.0], atol=1e-9)

    def test_descent_certificate_property(self):
        # <grad f_j, d> <= -||d||^2 for every objective: the negated min-norm
        # point makes a uniform descent angle with the whole hull
        p = make_bk1()
        rng = rng_for(13, "msd-descent")
        for _ in range(40):
            x = rng.uniform(-10, 10, 2)
            d, theta_val = msd_direction(p, x)
            jac = np.array([o.grad(x) for o in p.objectives])
            assert np.all(jac @ d <= -float(d @ d) + 1e-9)
            assert theta_val == pytest.approx(-float(d @ d), abs=1e-12)

    def test_critical_on_the_unconstrained_segment(self):
        # without the constraint the bowls balance on the segment between
        # their centers; at the midpoint (5,5) the gradients oppose exactly
        p = make_bk1()
        d, _ = msd_direction(p, np.array([5.0, 5.0]))
        assert np.linalg.norm(d) < 1e-9


class TestArmijoStep:
    def test_full_step_accepted_on_a_gentle_quadratic(self):
        p = unconstrained([quad_objective([0.0], scale=0.5)], 1)
        t = armijo_step(p, np.array([1.0]), np.array([-1.0]))
        assert t == 1.0

    def test_non_descent_direction_rejected(self):
        p = unconstrained([quad_objective([0.0], scale=0.5)], 1)
        with pytest.raises(ValueError, match="descent"):
            armijo_step(p, np.array([1.0]), np.array([1.0]))

    def test_backtracks_when_initial_step_overshoots(self):
        p = unconstrained([quad_objective([0.0], scale=0.5)], 1)
        t = armijo_step(p, np.array([1.0]), np.array([-1.0]), ArmijoParams(t0=8.0))
        assert t < 8.0
        # accepted step still satisfies the decrease condition
        assert 0.5 * (1.0 - t) ** 2 <= 0.5 - 1e-4 * t

    def test_budget_exhaustion_raises(self):
        p = unconstrained([quad_objective([0.0], scale=0.5)], 1)
        with pytest.raises(BaselineError, match="backtracks"):
            armijo_step(p, np.array([1.0]), np.array([-1.0]),
                        ArmijoParams(t0=8.0, max_backtracks=0))

    def test_every_objective_decreases_along_msd_runs(self):
        p = make_bk1()
        rng = rng_for(17, "armijo-monotone")
        for _ in range(10):
            x = rng.uniform(-8, 8, 2)
            for _ in range(25):
                d, _ = msd_direction(p, x)
                if np.linalg.norm(d) < 1e-8:
                    break
                f0 = np.array([o.eval(x) for o in p.objectives])
                t = armijo_step(p, x, d)
                x = x + t * d
                f1 = np.array([o.eval(x) for o in p.objectives])
                assert np.all(f1 <= f0 + 1e-12)


class TestAlamoSolve:
    def test_converges_on_bk1_to_the_segment(self):
        p = make_bk1()
        x, trace = alamo_solve(p, np.array([1.0, 0.0]))
        assert trace[-1].kkt <= 1e-3
        assert dist_to_segment(x) <= 1e-2
        total_inner = sum(t.inner_iters for t in trace)
        # deterministic run; band is loose on purpose (order of magnitude)
        assert 5 <= total_inner <= 1000

    def test_recovers_the_equality_multiplier(self):
        p = make_bk1()
        _, trace = alamo_solve(p, np.array([5.0, 1.0]))
        last = trace[-1]
        xi = last.mult[:1] - last.mult[1:]
        assert xi[0] == pytest.approx(-1.0, abs=1e-2)
        assert last.kkt <= 1e-3

    def test_feasibility_decays_without_penalty_growth_here(self):
        p = make_bk1()
        _, trace = alamo_solve(p, np.array([5.0, 1.0]))
        feas = [t.feas for t in trace]
        assert all(b <= a for a, b in zip(feas, feas[1:]))
        # sigma = 0.9 is always met on this run, so tau never grows
        assert not any(t.grew for t in trace)
        assert trace[-1].tau == 1.0

    def test_penalty_grows_when_progress_stalls(self):
        p = make_bk1()
        # sigma close to 0 demands near-exact feasibility each outer round,
        # which the first rounds cannot deliver: tau must grow
        _, trace = alamo_solve(p, np.array([5.0, 1.0]), AlamoParams(sigma=0.01))
        assert any(t.grew for t in trace)
        assert trace[-1].kkt <= 1e-3

    def test_multipliers_stay_nonnegative(self):
        p = make_bk1()
        _, trace = alamo_solve(p, np.array([5.0, 1.0]))
        for t in trace:
            assert np.all(t.mult >= 0.0)

    def test_zero_constraint_reduces_to_one_outer_round(self):
        p = unconstrained([quad_objective([0.0, 0.0])], 2)
        x, trace = alamo_solve(p, np.array([2.0, 0.0]))
        assert len(trace) == 1
        assert trace[0].feas == 0.0
        assert np.linalg.norm(x) < 1e-3

    def test_tighter_inner_tolerance_costs_more(self):
        p = make_bk1()
        x0 = np.array([1.0, 0.0])
        _, loose = alamo_solve(p, x0, AlamoParams(inner_tol=1e-4))
        _, tight = alamo_solve(p, x0, AlamoParams(inner_tol=1e-5))
        assert sum(t.inner_iters for t in tight) > sum(t.inner_iters for t in loose)

    def test_shape_validation(self):
        p = make_bk1()
        with pytest.raises(ValueError, match="x0"):
            alamo_solve(p, np.zeros(3))
        with pytest.raises(ValueError, match="mult0"):
            alamo_solve(p, np.zeros(2), AlamoParams(mult0=np.ones(3)))

    def test_outer_cap_returns_partial_progress(self):
        p = make_bk1()
        _, trace = alamo_solve(p, np.array([5.0, 1.0]), AlamoParams(outer_max=2))
        assert len(trace) == 2
        assert trace[-1].kkt > 1e-3
