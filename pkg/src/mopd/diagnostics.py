"""Measurement machinery: KKT residual, objective-gap estimation, Lyapunov
energies, decay-rate bounds, and empirical slope fitting.

Everything here is pure: functions take a problem plus state and return
scalars, so they can be called mid-run, post-hoc on traces, or from tests
without touching solver internals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problem import Problem, eval_jacobian, eval_objectives
from .simplex import project_hull

__all__ = [
    "ParetoReference",
    "GapEstimate",
    "feasibility",
    "kkt_residual",
    "objective_gap",
    "gap_lower_bound",
    "lyapunov",
    "c0_bound",
    "theta_bound",
    "rate_slope",
    "kkt_pair",
]


@dataclass(frozen=True)
class ParetoReference:
    """Finite stand-in for the Pareto set: feasible points with their F-values.

    source is one of 'analytic' (sampled from a known parametrization),
    'sampled' (loaded from a file), 'solver-generated'.
    """

    points: np.ndarray
    values: np.ndarray
    source: str

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if pts.shape[0] != vals.shape[0]:
            raise ValueError("points and values disagree on count")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_points(cls, problem: Problem, points, source: str) -> "ParetoReference":
        """Validate feasibility (1e-8) and evaluate F at each point."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        worst = 0.0
        vals = np.empty((pts.shape[0], problem.m))
        for i, z in enumerate(pts):
            worst = max(worst, float(np.linalg.norm(problem.constraint.residual(z))))
            vals[i] = eval_objectives(problem, z)
        if worst > 1e-8:
            raise ValueError(f"reference point infeasible: ||Az-b|| = {worst:.3e} > 1e-8")
        return cls(points=pts, values=vals, source=source)

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class GapEstimate:
    """Finite-reference estimate of the objective gap U(x).

    value under-estimates the true sup-based gap (the sup runs over a finite
    subset); lower_bound is the feasibility-scaled certified lower bound on
    U(x), which is 0 for feasible x.
    """

    value: float
    lower_bound: float
    n_refs: int


def feasibility(problem: Problem, x) -> float:
    """||Ax - b||_2."""
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(problem.constraint.residual(x)))


def kkt_residual(problem: Problem, x, xi) -> float:
    """sqrt(||Ax-b||^2 + ||A'xi + proj_{C(x)}(-A'xi)||^2).

    C(x) is the convex hull of the objective gradients at x; the stationarity
    part vanishes exactly at Pareto-critical pairs.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    At_xi = problem.constraint.A.T @ xi
    jac = eval_jacobian(problem, x)
    proj = project_hull(jac, -At_xi).point
    feas2 = float(np.sum(problem.constraint.residual(x) ** 2))
    stat2 = float(np.sum((At_xi + proj) ** 2))
    return math.sqrt(feas2 + stat2)


def objective_gap(problem: Problem, x, refs: ParetoReference) -> GapEstimate:
    """Estimate U(x) = sup_z min_j [f_j(x) - f_j(z)] over the reference set.

    An under-estimate: the sup runs over refs only.  For feasible x the true
    U is nonnegative; the estimate sits within mesh tolerance of it when the
    refs densely cover the Pareto set.
    """
    if len(refs) == 0:
        raise ValueError("empty reference set")
    fx = eval_objectives(problem, x)
    value = float(np.max(np.min(fx[None, :] - refs.values, axis=1)))
    if problem.constraint.norm_A == 0.0:
        lower = 0.0
    else:
        lower = gap_lower_bound(problem, x, float(np.linalg.norm(x)))
    return GapEstimate(value=value, lower_bound=lower, n_refs=len(refs))


def gap_lower_bound(problem: Problem, x, region_diam: float) -> float:
    """Certified lower bound on U(x): -E1 * ||Ax-b|| / sigma_min_plus.

    E2 = (1 + ||A||/sigma+) * region_diam + ||b||/sigma+ and
    E1 = E2 * max_j L_j + max_j ||grad f_j(0)||.  region_diam must bound
    ||x|| (caller asserts x lies in that ball).
    """
    x = np.asarray(x, dtype=float)
    if problem.constraint.norm_A == 0.0:
        raise ValueError("bound undefined for zero A (no positive singular value)")
    if region_diam < float(np.linalg.norm(x)) - 1e-12:
        raise ValueError("region_diam must be at least ||x||")
    sig = problem.constraint.sigma_min_plus
    grad0 = max(
        float(np.linalg.norm(np.asarray(o.grad(np.zeros(problem.n)), dtype=float)))
        for o in problem.objectives
    )
    e2 = (1.0 + problem.constraint.norm_A / sig) * region_diam + float(
        np.linalg.norm(problem.constraint.b)
    ) / sig
    e1 = e2 * max(o.lip for o in problem.objectives) + grad0
    return -e1 * feasibility(problem, x) / sig


def lyapunov(problem: Problem, x, v, xi, theta: float, gamma: float, anchor_x, anchor_xi) -> float:
    """Mixed gap-plus-distance energy against a feasible anchor pair.

    E = min_j [Q_j(x, xi_hat) - Q_j(x_hat, xi)] + (gamma/2)||v - x_hat||^2
      + (theta/2)||xi - xi_hat||^2 with Q_j(x, zeta) = f_j(x) + <zeta, Ax-b>.
    May be negative for anchors the trajectory dominates.  The anchor must be
    feasible (||A x_hat - b|| <= 1e-10) or the contraction claim is vacuous.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    xi = np.asarray(xi, dtype=float).reshape(-1)
    anchor_x = np.asarray(anchor_x, dtype=float)
    anchor_xi = np.asarray(anchor_xi, dtype=float).reshape(-1)
    anchor_res = problem.constraint.residual(anchor_x)
    if float(np.linalg.norm(anchor_res)) > 1e-10:
        raise ValueError("anchor_x must satisfy A x = b to 1e-10")
    res_x = problem.constraint.residual(x)
    fx = eval_objectives(problem, x)
    fa = eval_objectives(problem, anchor_x)
    pi = (fx + float(anchor_xi @ res_x)) - (fa + float(xi @ anchor_res))
    return (
        float(np.min(pi))
        + 0.5 * gamma * float(np.sum((v - anchor_x) ** 2))
        + 0.5 * theta * float(np.sum((xi - anchor_xi) ** 2))
    )


def c0_bound(problem: Problem, x0, v0, xi0, theta0: float, gamma0: float, s: float, t: float) -> float:
    """Initial-data constant C0(s, t) entering the continuous decay estimate."""
    if s < 0 or t < 0:
        raise ValueError("s and t must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    xi0 = np.asarray(xi0, dtype=float).reshape(-1)
    lip = problem.lip
    grad0 = max(
        float(np.linalg.norm(np.asarray(o.grad(np.zeros(problem.n)), dtype=float)))
        for o in problem.objectives
    )
    nx0 = float(np.linalg.norm(x0))
    return (
        (grad0 + lip * s) * (nx0 + s)
        + lip * (nx0 * nx0 + s * s)
        + t * feasibility(problem, x0)
        + gamma0 * (float(np.sum(v0 * v0)) + s * s)
        + theta0 * (float(np.sum(xi0 * xi0)) + t * t)
    )


def theta_bound(k: int, theta0: float, gamma0: float, mu: float, lip: float, norm_A: float) -> float:
    """Upper bound on theta_k / theta_0 under the equality step-size rule.

    Minimum of two branches; with mu = 0 the second branch is +inf and the
    first (the O(1/k) one) decides.  k >= 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if theta0 <= 0 or gamma0 <= 0:
        raise ValueError("theta0 and gamma0 must be positive")
    if lip == 0.0 and norm_A == 0.0:
        raise ValueError("step rule degenerate: lip and ||A|| both zero")
    gamma_min = min(mu, gamma0)
    gamma_max = max(mu, gamma0)
    alpha_max = math.sqrt(gamma_max) / math.sqrt(lip + norm_A * norm_A)
    beta0 = 2.0 + math.sqrt(alpha_max)
    b1 = 2.0 * norm_A / (math.sqrt(gamma0 * theta0) * k) + 4.0 * lip * beta0 * beta0 / (
        gamma0 * k * k
    )
    if gamma_min <= 0.0:
        return b1
    if lip == 0.0:
        exp_term = 0.0
    else:
        exp_term = math.exp(
            -k * math.log1p(alpha_max) / (2.0 * alpha_max * math.sqrt(lip / gamma_min))
        )
    b2 = 4.0 * beta0 * beta0 * norm_A * norm_A / (gamma_min * theta0 * k * k) + exp_term
    return min(b1, b2)


def rate_slope(trace, metric: str, k_lo: int, k_hi: int) -> float:
    """Least-squares slope of log(metric) vs log(k) over k in [k_lo, k_hi].

    metric is a TraceRecord attribute name; 'gap' aliases 'gap_est'.  Errors
    on nonpositive values in the window (log undefined) or a window with
    fewer than two records.
    """
    if metric == "gap":
        metric = "gap_est"
    if k_lo < 1 or k_lo >= k_hi:
        raise ValueError("need 1 <= k_lo < k_hi")
    ks, vals = [], []
    for rec in trace:
        k = getattr(rec, "k")
        if k_lo <= k <= k_hi:
            val = float(getattr(rec, metric))
            if not (val > 0.0) or not math.isfinite(val):
                raise ValueError(f"nonpositive {metric} value {val} at k={k}")
            ks.append(float(k))
            vals.append(val)
    if len(ks) < 2:
        raise ValueError("window contains fewer than two trace records")
    slope = np.polyfit(np.log(np.array(ks)), np.log(np.array(vals)), 1)[0]
    return float(slope)


def kkt_pair(problem: Problem, lam) -> tuple:
    """Exact KKT pair (x, xi) for quadratic objectives and fixed hull weights.

    Solves the stationarity system  [sum lam_j Q_j  A'; A  0] [x; xi] =
    [-sum lam_j c_j; b]  directly.  Every objective must carry quadratic
    data; raises otherwise.  Used to build exact anchors for contraction
    tests.
    """
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if lam.shape != (problem.m,):
        raise ValueError(f"need {problem.m} weights")
    if abs(float(lam.sum()) - 1.0) > 1e-9 or np.any(lam < -1e-12):
        raise ValueError("weights must be convex")
    H = np.zeros((problem.n, problem.n))
    c = np.zeros(problem.n)
    for w, obj in zip(lam, problem.objectives):
        if obj.quadratic is None:
            raise ValueError("kkt_pair requires quadratic objective data")
        Q, cj, _ = obj.quadratic
        H += w * Q
        c += w * cj
    A = problem.constraint.A
    r = problem.r
    sys = np.zeros((problem.n + r, problem.n + r))
    sys[: problem.n, : problem.n] = H
    sys[: problem.n, problem.n :] = A.T
    sys[problem.n :, : problem.n] = A
    rhs = np.concatenate([-c, problem.constraint.b])
    sol = np.linalg.solve(sys, rhs)
    return sol[: problem.n], sol[problem.n :]
