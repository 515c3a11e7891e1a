"""Comparison solvers: multiobjective steepest descent and an augmented-Lagrangian outer loop.

The inner solver moves along the negated minimum-norm element of the gradient
hull with a backtracking line search that enforces sufficient decrease in
every objective at once.  The outer loop handles the equality constraint by
splitting it into two opposite inequalities, penalizing both sides in a
shared augmented term, and running the inner solver on the smoothed
subproblems between safeguarded multiplier updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .diagnostics import kkt_residual
from .problem import LinearConstraint, Objective, Problem, eval_jacobian, eval_objectives
from .simplex import project_hull

__all__ = [
    "ArmijoParams",
    "AlamoParams",
    "AlamoRecord",
    "BaselineError",
    "msd_direction",
    "armijo_step",
    "alamo_solve",
]

# safeguard ceiling for the split multipliers
MULT_CAP = 1e8


class BaselineError(RuntimeError):
    """Inner-solver failure; carries whatever outer progress existed."""

    def __init__(self, message: str, trace: list = None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


@dataclass
class ArmijoParams:
    c: float = 1e-4
    shrink: float = 0.5
    t0: float = 1.0
    max_backtracks: int = 60

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValueError("c must lie in (0, 1)")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
        if not self.t0 > 0.0:
            raise ValueError("t0 must be positive")
        if self.max_backtracks < 0:
            raise ValueError("max_backtracks must be nonnegative")


@dataclass
class AlamoParams:
    tau0: float = 1.0
    growth: float = 2.0
    # None means ones(2r), sized at solve time
    mult0: Optional[np.ndarray] = None
    sigma: float = 0.9
    inner_tol: float = 1e-4
    inner_max: int = 8000
    tol: float = 1e-3
    outer_max: int = 50
    armijo: ArmijoParams = field(default_factory=ArmijoParams)

    def __post_init__(self):
        if not self.tau0 > 0.0:
            raise ValueError("tau0 must be positive")
        if not self.growth > 1.0:
            raise ValueError("growth must exceed 1")
        if not 0.0 < self.sigma < 1.0:
            raise ValueError("sigma must lie in (0, 1)")
        if not self.inner_tol > 0.0:
            raise ValueError("inner_tol must be positive")
        if self.inner_max < 1:
            raise ValueError("inner_max must be >= 1")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if self.outer_max < 1:
            raise ValueError("outer_max must be >= 1")


@dataclass
class AlamoRecord:
    """One outer iteration: state after the inner solve and multiplier update."""

    k: int
    x: np.ndarray
    mult: np.ndarray
    tau: float
    feas: float
    kkt: float
    inner_iters: int
    grew: bool


def msd_direction(problem: Problem, x) -> tuple:
    """Common descent direction at x, ignoring any constraint on the problem.

    Returns (d, theta_val) with d the negated minimum-norm element of the
    gradient hull and theta_val = -||d||^2; d = 0 exactly when x is Pareto
    critical for the unconstrained objectives.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    jac = eval_jacobian(problem, x)
    p = project_hull(jac, np.zeros(problem.n)).point
    d = -p
    return d, -float(d @ d)


def armijo_step(problem: Problem, x, d, params: Optional[ArmijoParams] = None) -> float:
    """Backtracking step size satisfying sufficient decrease in every objective.

    Accepts the largest t = t0 * shrink^i with
    f_j(x + t d) <= f_j(x) + c t <grad f_j(x), d> for all j.
    """
    if params is None:
        params = ArmijoParams()
    x = np.asarray(x, dtype=float).reshape(-1)
    d = np.asarray(d, dtype=float).reshape(-1)
    slopes = eval_jacobian(problem, x) @ d
    if slopes.max() >= 0.0:
        raise ValueError("d is not a common descent direction")
    f0 = eval_objectives(problem, x)
    t = params.t0
    for _ in range(params.max_backtracks + 1):
        if np.all(eval_objectives(problem, x + t * d) <= f0 + params.c * t * slopes):
            return t
        t *= params.shrink
    raise BaselineError(
        f"line search failed after {params.max_backtracks} backtracks"
    )


def _al_subproblem(problem: Problem, mult, tau: float) -> Problem:
    """Objectives plus the shared two-sided augmented penalty, constraint-free."""
    A = problem.constraint.A
    b = problem.constraint.b
    r = problem.r
    u_plus = mult[:r]
    u_minus = mult[r:]
    pen_lip = tau * problem.constraint.norm_A ** 2

    def penalty(x):
        res = A @ x - b
        hi = np.maximum(0.0, u_plus / tau + res)
        lo = np.maximum(0.0, u_minus / tau - res)
        return (tau / 2.0) * float(
            hi @ hi + lo @ lo - (u_plus / tau) @ (u_plus / tau) - (u_minus / tau) @ (u_minus / tau)
        )

    def penalty_grad(x):
        res = A @ x - b
        hi = np.maximum(0.0, u_plus / tau + res)
        lo = np.maximum(0.0, u_minus / tau - res)
        return tau * (A.T @ hi - A.T @ lo)

    def wrap(o):
        return Objective(
            eval=lambda x, o=o: o.eval(x) + penalty(x),
            grad=lambda x, o=o: np.asarray(o.grad(x), dtype=float) + penalty_grad(x),
            mu=0.0,
            lip=o.lip + pen_lip,
        )

    return Problem(
        objectives=[wrap(o) for o in problem.objectives],
        constraint=LinearConstraint(A=np.zeros((1, problem.n)), b=np.zeros(1)),
        name=f"{problem.name}-al",
    )


def _inner_msd(sub: Problem, x, params: AlamoParams) -> tuple:
    """Steepest descent with line search until the direction norm drops to tol."""
    x = x.copy()
    for it in range(params.inner_max):
        d, _ = msd_direction(sub, x)
        if float(np.linalg.norm(d)) <= params.inner_tol:
            return x, it
        t = armijo_step(sub, x, d, params.armijo)
        x = x + t * d
    return x, params.inner_max


def alamo_solve(problem: Problem, x0, params: Optional[AlamoParams] = None) -> tuple:
    """Augmented-Lagrangian outer loop around the steepest-descent inner solver.

    Returns (x, outer_trace).  The run stops once the original problem's KKT
    residual (with the equality multiplier recovered as the difference of the
    split pair) drops below params.tol, or at the outer cap; the trace's last
    record tells which.
    """
    if params is None:
        params = AlamoParams()
    x = np.asarray(x0, dtype=float).reshape(-1).copy()
    if x.shape != (problem.n,):
        raise ValueError(f"x0 must have {problem.n} entries")
    r = problem.r
    if params.mult0 is None:
        u = np.ones(2 * r)
    else:
        u = np.asarray(params.mult0, dtype=float).reshape(-1).copy()
        if u.shape != (2 * r,):
            raise ValueError(f"mult0 must have {2 * r} entries (two-sided split)")
    tau = params.tau0
    trace: list = []
    feas_prev = float(np.linalg.norm(problem.constraint.residual(x)))

    for outer in range(params.outer_max):
        sub = _al_subproblem(problem, u, tau)
        try:
            x, inner_iters = _inner_msd(sub, x, params)
        except BaselineError as err:
            err.trace = trace
            raise
        res = problem.constraint.residual(x)
        g = np.concatenate([res, -res])
        u = np.clip(u + tau * g, 0.0, MULT_CAP)
        feas = float(np.linalg.norm(res))
        xi = u[:r] - u[r:]
        kkt = kkt_residual(problem, x, xi)
        grew = False
        if feas > params.sigma * feas_prev and kkt > params.tol:
            tau *= params.growth
            grew = True
        trace.append(
            AlamoRecord(k=outer, x=x.copy(), mult=u.copy(), tau=tau, feas=feas,
                        kkt=kkt, inner_iters=inner_iters, grew=grew)
        )
        if kkt <= params.tol:
            break
        feas_prev = feas
    return x, trace
