"""Forward-Euler reference integrator for the continuous-time limit of the solver.

The dynamics move (x, v, xi) by

    x'      = v - x
    theta xi' = A v - b
    gamma v' in mu (x - v) - A^T xi - argmin over the gradient hull of <x - v, .>

while theta and gamma follow exact exponential laws (theta' = -theta,
gamma' = mu - gamma), which the integrator applies in closed form instead of
discretizing.  The argmin is a linear functional over the hull, so it is
attained at a vertex; `vertex_select` picks which one.

Time rescaling variants of these dynamics (slowing the exponential decay to a
polynomial one) are equivalent up to reparametrization and are intentionally
not implemented; the e^{-t} decay here corresponds to O(1/s^2) after such a
rescaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import feasibility, lyapunov
from .problem import Problem, eval_jacobian
from .simplex import project_hull

__all__ = [
    "FlowState",
    "FlowConfig",
    "vertex_select",
    "euler_step",
    "integrate",
]


@dataclass
class FlowState:
    """Continuous-time iterate bundle at time t."""

    x: np.ndarray
    v: np.ndarray
    xi: np.ndarray
    theta: float
    gamma: float
    t: float = 0.0


@dataclass
class FlowConfig:
    h: float = 1e-3
    T: float = 10.0
    selection: str = "lowest-index"
    # damping parameter of the second-order form; recorded and validated
    # (beta + gamma(t) + mu > 0) but the first-order dynamics are beta-free
    beta: float = 0.0

    def __post_init__(self):
        if not (self.h >= 0.0 and math.isfinite(self.h)):
            raise ValueError("h must be nonnegative and finite")
        if not (self.T > 0.0 and math.isfinite(self.T)):
            raise ValueError("T must be positive and finite")
        if self.selection not in ("lowest-index", "projection-consistent"):
            raise ValueError(f"unknown selection rule: {self.selection!r}")
        if not math.isfinite(self.beta):
            raise ValueError("beta must be finite")


def vertex_select(G: np.ndarray, d: np.ndarray, rule: str = "lowest-index") -> tuple:
    """Minimize <d, g_j> over the rows of G.

    Returns (index, point) with the index 1-based.  "lowest-index" resolves
    ties by the smallest row index; "projection-consistent" returns the
    minimum-norm point of the tied face (computed by the hull projection of
    the origin onto the tied rows), with the smallest tied index as the
    representative.
    """
    G = np.asarray(G, dtype=float)
    d = np.asarray(d, dtype=float).reshape(-1)
    if G.ndim != 2 or G.shape[0] < 1:
        raise ValueError("G must have at least one row")
    vals = G @ d
    j = int(np.argmin(vals))
    if rule == "lowest-index":
        return j + 1, G[j].copy()
    if rule != "projection-consistent":
        raise ValueError(f"unknown selection rule: {rule!r}")
    lo = vals[j]
    tied = np.flatnonzero(vals <= lo + 1e-12 * (1.0 + abs(lo)))
    point = project_hull(G[tied], np.zeros(G.shape[1])).point
    return int(tied[0]) + 1, point


def euler_step(problem: Problem, state: FlowState, config: FlowConfig) -> FlowState:
    """One explicit Euler step of length config.h from `state`.

    Drifts are evaluated at the pre-step state; theta and gamma are refreshed
    from their exponential closed forms at the new time.
    """
    h = config.h
    x, v, xi = state.x, state.v, state.xi
    theta, gamma = state.theta, state.gamma
    if not (
        np.all(np.isfinite(x))
        and np.all(np.isfinite(v))
        and np.all(np.isfinite(xi))
        and math.isfinite(theta)
        and math.isfinite(gamma)
    ):
        raise ValueError(f"non-finite flow state at t = {state.t}")

    A = problem.constraint.A
    b = problem.constraint.b
    mu = problem.mu
    jac = eval_jacobian(problem, x)
    _, z = vertex_select(jac, x - v, config.selection)

    x1 = x + h * (v - x)
    xi1 = xi + (h / theta) * (A @ v - b)
    v1 = v + (h / gamma) * (mu * (x - v) - A.T @ xi - z)
    decay = math.exp(-h)
    return FlowState(
        x=x1,
        v=v1,
        xi=xi1,
        theta=theta * decay,
        gamma=mu + (gamma - mu) * decay,
        t=state.t + h,
    )


def integrate(problem: Problem, init: FlowState, config: FlowConfig, anchor: tuple) -> list:
    """Integrate the dynamics over [t0, t0 + T], monitoring a Lyapunov energy.

    `anchor` is a feasible primal-dual pair (x_hat, xi_hat) the energy is
    measured against.  Returns samples (t, FlowState, lyapunov, feas) taken
    every ceil(0.1/h) steps, starting with the initial state and ending with
    the final one.
    """
    if config.h == 0.0:
        raise ValueError("h must be positive to integrate")
    x_hat = np.asarray(anchor[0], dtype=float).reshape(-1)
    xi_hat = np.asarray(anchor[1], dtype=float).reshape(-1)
    if feasibility(problem, x_hat) > 1e-10:
        raise ValueError("anchor point must satisfy the constraint to 1e-10")
    # gamma(t) is monotone between its initial value and mu, so the damping
    # condition over the whole horizon reduces to the two endpoints
    mu = problem.mu
    gamma_end = mu + (init.gamma - mu) * math.exp(-config.T)
    if min(config.beta + init.gamma + mu, config.beta + gamma_end + mu) <= 0.0:
        raise ValueError("beta + gamma(t) + mu must stay positive on the horizon")

    n_steps = int(math.floor(config.T / config.h + 1e-9))
    stride = max(1, math.ceil(0.1 / config.h))

    def sample(state):
        return (
            state.t,
            state,
            lyapunov(problem, state.x, state.v, state.xi, state.theta, state.gamma,
                     x_hat, xi_hat),
            feasibility(problem, state.x),
        )

    state = init
    out = [sample(state)]
    for k in range(1, n_steps + 1):
        state = euler_step(problem, state, config)
        if k % stride == 0 or k == n_steps:
            out.append(sample(state))
    return out
