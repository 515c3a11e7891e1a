"""Accelerated primal-dual solver for linearly constrained multiobjective problems.

One iteration advances (x, v, xi, theta, gamma) with a single hull projection:

    y     = (x + a v) / (1 + a)
    xi^   = xi + (a/theta) (A v - b)
    w     = gamma (v - x)/a + mu (y - x) - A^T xi^
    z     = proj onto conv{grad f_j(y)} of w
    v+    = (gamma v + mu a y - a A^T xi^ - a z) / (gamma + mu a)
    xi+   = xi + (a/theta) (A v+ - b)
    x+    = (x + a v+) / (1 + a)
    theta+, gamma+ = theta/(1+a), (gamma + mu a)/(1+a)

All updates read the pre-step theta and gamma.  The projected z satisfies the
variational condition z in argmin_{g in hull} <x - v+, g>, which is what makes
the explicit update equivalent to the implicit one.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import ParetoReference, feasibility, kkt_residual, objective_gap
from .problem import Problem, eval_jacobian, eval_objectives
from .simplex import SimplexWeights, _project_hull_trusted

__all__ = [
    "SolverState",
    "SolverConfig",
    "TraceRecord",
    "StepOutcome",
    "SolveResult",
    "SolverError",
    "step_size",
    "update_params",
    "advance",
    "solve",
]


@dataclass
class SolverState:
    """Iterate bundle after k steps."""

    k: int
    x: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    theta: float
    gamma: float


@dataclass
class SolverConfig:
    theta0: float = 1.0
    gamma0: float = 1.0
    tol: float = 1e-3
    max_iter: int = 100_000
    step_rule: str = "equality"
    gap_every: int = 10
    refs: Optional[ParetoReference] = None

    def __post_init__(self):
        if not (self.theta0 > 0.0 and math.isfinite(self.theta0)):
            raise ValueError("theta0 must be positive and finite")
        if not (self.gamma0 > 0.0 and math.isfinite(self.gamma0)):
            raise ValueError("gamma0 must be positive and finite")
        if not (self.tol > 0.0):
            raise ValueError("tol must be positive")
        # max_iter = 0 is allowed: evaluate the start, take no steps
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        if self.step_rule not in ("equality", "inequality-backtracked"):
            raise ValueError(f"unknown step_rule: {self.step_rule!r}")
        if self.gap_every < 1:
            raise ValueError("gap_every must be >= 1")


@dataclass
class TraceRecord:
    k: int
    alpha: float
    theta: float
    gamma: float
    feas: float
    kkt: float
    gap_est: float
    gap_stale: bool
    wall_time: float
    f_values: tuple


@dataclass
class StepOutcome:
    """New state plus the step internals: prediction point, predicted
    multiplier, and the simplex weights of the hull projection."""

    state: SolverState
    alpha: float
    weights: SimplexWeights
    y: np.ndarray
    xi_hat: np.ndarray


@dataclass
class SolveResult:
    state: SolverState
    trace: list
    converged: bool


class SolverError(RuntimeError):
    """Raised when an iterate stops being finite; carries partial progress."""

    def __init__(self, message: str, state: SolverState = None, trace: list = None):
        super().__init__(message)
        self.state = state
        self.trace = trace if trace is not None else []


def step_size(theta: float, gamma: float, lip: float, norm_A: float) -> float:
    """Closed-form step length a = sqrt(gamma theta) / sqrt(lip theta + ||A||^2)."""
    denom = lip * theta + norm_A * norm_A
    if denom <= 0.0:
        raise SolverError("step rule degenerate: lip and ||A|| both zero")
    return math.sqrt(gamma * theta) / math.sqrt(denom)


def _step_size_backtracked(theta: float, gamma: float, lip: float, norm_A: float) -> float:
    """Largest a with a^2 (lip theta/(1+a) + ||A||^2) <= gamma theta.

    Found by bisection; the left side is strictly increasing in a, and the
    closed-form step already satisfies the bound, so it brackets from below.
    """
    na2 = norm_A * norm_A
    a_eq = step_size(theta, gamma, lip, norm_A)
    target = gamma * theta

    def lhs(a):
        return a * a * (lip * theta / (1.0 + a) + na2)

    lo = a_eq
    hi = a_eq
    for _ in range(200):
        hi *= 2.0
        if lhs(hi) > target:
            break
    else:
        raise SolverError("backtracked step rule failed to bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lhs(mid) <= target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, lo):
            break
    return lo


def update_params(theta: float, gamma: float, mu: float, alpha: float) -> tuple:
    """Parameter refresh after a step of length alpha."""
    return theta / (1.0 + alpha), (gamma + mu * alpha) / (1.0 + alpha)


def advance(problem: Problem, state: SolverState, alpha: Optional[float] = None) -> StepOutcome:
    """One solver step of length `alpha` from `state`.

    All updates read the pre-step theta and gamma.  When `alpha` is omitted it
    falls back to the closed-form step for this problem's curvature data; a
    caller supplying its own alpha is responsible for it satisfying the step
    bound.
    """
    A = problem.constraint.A
    b = problem.constraint.b
    mu = problem.mu
    theta, gamma = state.theta, state.gamma
    if alpha is None:
        alpha = step_size(theta, gamma, problem.lip, problem.constraint.norm_A)
    elif not (alpha > 0.0 and math.isfinite(alpha)):
        raise ValueError("alpha must be positive and finite")

    x, v, xi = state.x, state.v, state.xi
    y = (x + alpha * v) / (1.0 + alpha)
    xi_hat = xi + (alpha / theta) * (A @ v - b)
    jac = eval_jacobian(problem, y)
    At_xi_hat = A.T @ xi_hat
    w = (gamma / alpha) * (v - x) - At_xi_hat
    if mu != 0.0:
        w = w + mu * (y - x)
    try:
        proj = _project_hull_trusted(jac, w)
    except ValueError:
        name = "jacobian" if not np.all(np.isfinite(jac)) else "projection argument"
        raise SolverError(f"non-finite {name} at iteration {state.k}", state=state) from None
    z = proj.point

    v1 = (gamma * v + mu * alpha * y - alpha * At_xi_hat - alpha * z) / (gamma + mu * alpha)
    xi1 = xi + (alpha / theta) * (A @ v1 - b)
    x1 = (x + alpha * v1) / (1.0 + alpha)
    # one cheap sentinel over everything a step touched; diagnose only on failure
    if not math.isfinite(float(np.sum(jac) + np.sum(x1) + np.sum(v1) + np.sum(xi1))):
        for name, val in (
            ("jacobian", jac),
            ("projection argument", w),
            ("v", v1),
            ("xi", xi1),
            ("x", x1),
        ):
            if not np.all(np.isfinite(val)):
                raise SolverError(f"non-finite {name} at iteration {state.k}", state=state)
        raise SolverError(f"non-finite iterate at iteration {state.k}", state=state)
    theta1, gamma1 = update_params(theta, gamma, mu, alpha)

    new_state = SolverState(k=state.k + 1, x=x1, v=v1, xi=xi1, theta=theta1, gamma=gamma1)
    return StepOutcome(state=new_state, alpha=alpha, weights=proj.weights, y=y, xi_hat=xi_hat)


def solve(
    problem: Problem,
    x0,
    v0=None,
    xi0=None,
    config: Optional[SolverConfig] = None,
) -> SolveResult:
    """Run the accelerated method until the KKT residual drops below tol.

    The trace starts with a row for the initial point (k = 0, alpha = 0).  The
    gap column is refreshed every `gap_every` iterations when a reference set
    is configured and carried forward (marked stale) in between; without
    references it is NaN and always stale.
    """
    if config is None:
        config = SolverConfig()
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (problem.n,):
        raise ValueError(f"x0 must have {problem.n} entries")
    v = x0.copy() if v0 is None else np.asarray(v0, dtype=float).reshape(-1).copy()
    xi = np.zeros(problem.r) if xi0 is None else np.asarray(xi0, dtype=float).reshape(-1).copy()
    if v.shape != (problem.n,):
        raise ValueError(f"v0 must have {problem.n} entries")
    if xi.shape != (problem.r,):
        raise ValueError(f"xi0 must have {problem.r} entries")

    state = SolverState(k=0, x=x0.copy(), v=v, xi=xi, theta=config.theta0, gamma=config.gamma0)
    trace: list = []
    start = time.perf_counter()
    last_gap = float("nan")

    def record(state, alpha):
        nonlocal last_gap
        # huge-but-finite iterates from a diverging run can overflow inside
        # the metrics; surface that like any other abort, trace attached
        try:
            kkt = kkt_residual(problem, state.x, state.xi)
            feas = feasibility(problem, state.x)
            fresh = config.refs is not None and state.k % config.gap_every == 0
            if fresh:
                last_gap = objective_gap(problem, state.x, config.refs).value
            f_values = tuple(eval_objectives(problem, state.x))
        except (OverflowError, ValueError) as err:
            raise SolverError(
                f"metric evaluation failed at iteration {state.k}: {err}", state=state
            ) from err
        trace.append(
            TraceRecord(
                k=state.k,
                alpha=alpha,
                theta=state.theta,
                gamma=state.gamma,
                feas=feas,
                kkt=kkt,
                gap_est=last_gap,
                gap_stale=not fresh,
                wall_time=time.perf_counter() - start,
                f_values=f_values,
            )
        )
        return kkt

    step = step_size if config.step_rule == "equality" else _step_size_backtracked
    lip = problem.lip
    norm_A = problem.constraint.norm_A
    try:
        kkt = record(state, 0.0)
        if kkt <= config.tol:
            return SolveResult(state=state, trace=trace, converged=True)
        for _ in range(config.max_iter):
            alpha = step(state.theta, state.gamma, lip, norm_A)
            outcome = advance(problem, state, alpha)
            state = outcome.state
            kkt = record(state, alpha)
            if kkt <= config.tol:
                return SolveResult(state=state, trace=trace, converged=True)
    except SolverError as err:
        err.state = err.state if err.state is not None else state
        err.trace = trace
        raise
    return SolveResult(state=state, trace=trace, converged=False)
