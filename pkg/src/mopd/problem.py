"""Problem containers for linearly constrained multiobjective minimization.

A problem bundles m smooth objectives f_1..f_m with one linear equality
constraint A x = b.  Each objective carries curvature metadata (mu, lip):
mu-strong convexity below, lip-Lipschitz gradient above.  mu may be 0; for
nonconvex instances mu is 0 and lip is a documented surrogate bound, in which
case the solver runs unchanged but without guarantees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "Objective",
    "LinearConstraint",
    "Problem",
    "eval_objectives",
    "eval_jacobian",
    "check_gradients",
    "operator_norm",
    "min_positive_singular",
    "load_problem_json",
]

_EPS = float(np.finfo(np.float64).eps)


@dataclass
class Objective:
    """One smooth objective: value/gradient callables plus curvature bounds.

    quadratic, when present, holds (Q, c, d) with f(x) = x'Qx/2 + c'x + d;
    it enables direct KKT solves in the diagnostics.
    """

    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    mu: float
    lip: float
    quadratic: Optional[tuple] = None

    def __post_init__(self):
        if not (0.0 <= self.mu <= self.lip):
            raise ValueError(f"need 0 <= mu <= lip, got mu={self.mu}, lip={self.lip}")
        if not math.isfinite(self.lip):
            raise ValueError("lip must be finite")


@dataclass
class LinearConstraint:
    """Equality constraint A x = b, with cached spectral data.

    norm_A is the operator 2-norm of A; sigma_min_plus the smallest positive
    singular value (0.0 for an all-zero A, where it is meaningless).
    """

    A: np.ndarray
    b: np.ndarray
    norm_A: float = field(init=False)
    sigma_min_plus: float = field(init=False)

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.A.shape[0] != self.b.shape[0]:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.shape[0]}")
        if not np.all(np.isfinite(self.A)) or not np.all(np.isfinite(self.b)):
            raise ValueError("constraint data must be finite")
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        self.norm_A = operator_norm(self.A)
        self.sigma_min_plus = min_positive_singular(self.A) if self.norm_A > 0.0 else 0.0

    @property
    def r(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def residual(self, x: np.ndarray) -> np.ndarray:
        # A x - b
        return self.A @ x - self.b


@dataclass
class Problem:
    """m objectives under one linear equality constraint.

    mu/lip aggregate the per-objective bounds (min of mus, max of lips);
    they are what the solver step rule consumes.  sample_region is an (n, 2)
    array of per-coordinate bounds for drawing starts; pareto_parametrization,
    when attached, maps s in [0,1]^k to k points on the known Pareto set.
    """

    objectives: list
    constraint: LinearConstraint
    name: str = "problem"
    sample_region: Optional[np.ndarray] = None
    pareto_parametrization: Optional[Callable[[np.ndarray], np.ndarray]] = None
    feasible_point: Optional[np.ndarray] = None
    mu: float = field(init=False)
    lip: float = field(init=False)

    def __post_init__(self):
        if len(self.objectives) == 0:
            raise ValueError("need at least one objective")
        self.mu = min(o.mu for o in self.objectives)
        self.lip = max(o.lip for o in self.objectives)
        if self.sample_region is not None:
            self.sample_region = np.asarray(self.sample_region, dtype=float)
            if self.sample_region.shape != (self.n, 2):
                raise ValueError("sample_region must be (n, 2)")
        if self.feasible_point is not None:
            self.feasible_point = np.asarray(self.feasible_point, dtype=float).reshape(-1)
            resid = float(np.linalg.norm(self.constraint.residual(self.feasible_point)))
            if resid > 1e-8:
                raise ValueError(f"claimed feasible point violates Ax=b by {resid:.3e}")

    @property
    def n(self) -> int:
        return self.constraint.n

    @property
    def m(self) -> int:
        return len(self.objectives)

    @property
    def r(self) -> int:
        return self.constraint.r


def eval_objectives(problem: Problem, x: np.ndarray) -> np.ndarray:
    """Stack objective values at x into an m-vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"x must have shape ({problem.n},), got {x.shape}")
    return np.array([float(o.eval(x)) for o in problem.objectives])


def eval_jacobian(problem: Problem, x: np.ndarray) -> np.ndarray:
    """Stack objective gradients at x into an (m, n) matrix, row j = grad f_j."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if x.shape != (n,) or n != problem.n:
        raise ValueError(f"x must have shape ({problem.n},), got {x.shape}")
    out = np.empty((len(problem.objectives), n))
    for j, o in enumerate(problem.objectives):
        g = o.grad(x)
        if np.shape(g) != (n,):
            raise ValueError(f"gradient has shape {np.shape(g)}, expected ({n},)")
        out[j] = g
    return out


def check_gradients(problem: Problem, x: np.ndarray, h: float = 1e-6) -> float:
    """Max relative error between analytic gradients and central differences.

    Relative error for objective j is ||fd_j - grad_j|| / max(1, ||grad_j||).
    Raises on nonfinite values at any probe point.
    """
    x = np.asarray(x, dtype=float)
    jac = eval_jacobian(problem, x)
    worst = 0.0
    for j, obj in enumerate(problem.objectives):
        fd = np.empty(problem.n)
        for i in range(problem.n):
            step = np.zeros(problem.n)
            step[i] = h
            hi = float(obj.eval(x + step))
            lo = float(obj.eval(x - step))
            if not (math.isfinite(hi) and math.isfinite(lo)):
                raise ValueError(f"objective {j} nonfinite near probe point")
            fd[i] = (hi - lo) / (2.0 * h)
        if not np.all(np.isfinite(jac[j])):
            raise ValueError(f"gradient {j} nonfinite at probe point")
        err = float(np.linalg.norm(fd - jac[j]) / max(1.0, np.linalg.norm(jac[j])))
        worst = max(worst, err)
    return worst


def operator_norm(A: np.ndarray, tol: float = 1e-12, max_iter: int = 50_000) -> float:
    """Spectral norm of A by power iteration on A'A.

    Starts from the normalized all-ones vector for reproducibility; if that
    vector (or a later iterate) falls into the nullspace of A'A, restarts
    deterministically from standard basis vectors.  Raises RuntimeError if the
    estimate has not stabilized to relative tol within max_iter sweeps.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    scale = float(np.max(np.abs(A), initial=0.0))
    if scale == 0.0:
        return 0.0
    v = np.ones(n) / math.sqrt(n)
    est_prev = 0.0
    fallback = 0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        nw = float(np.linalg.norm(w))
        if nw <= n * scale * scale * _EPS:
            # iterate is (numerically) in the nullspace; deterministic restart
            if fallback >= n:
                return 0.0
            v = np.zeros(n)
            v[fallback] = 1.0
            fallback += 1
            est_prev = 0.0
            continue
        v = w / nw
        est = float(np.linalg.norm(A @ v))
        if abs(est - est_prev) <= tol * max(est, _EPS):
            return est
        est_prev = est
    raise RuntimeError(f"operator_norm did not converge in {max_iter} iterations")


def min_positive_singular(A: np.ndarray) -> float:
    """Smallest singular value of A above the rank-detection threshold.

    Threshold is max(r, n) * ||A|| * machine-eps.  Raises for an all-zero A,
    which has no positive singular value.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        raise ValueError("zero matrix has no positive singular value")
    thresh = max(A.shape) * s[0] * _EPS
    positive = s[s > thresh]
    return float(positive[-1])


def _quadratic_objective(Q: np.ndarray, c: np.ndarray, d: float, mu: float, lip: float) -> Objective:
    Q = np.asarray(Q, dtype=float)
    c = np.asarray(c, dtype=float)

    def f(x, Q=Q, c=c, d=d):
        return 0.5 * float(x @ (Q @ x)) + float(c @ x) + d

    def g(x, Q=Q, c=c):
        return Q @ x + c

    return Objective(eval=f, grad=g, mu=mu, lip=lip, quadratic=(Q, c, float(d)))


def load_problem_json(source) -> Problem:
    """Build a quadratic Problem from a JSON file path, file object, or dict.

    Expected keys: name, n, m, r, objectives (list of {Q, c, d, mu, lip} with
    Q given row-major, nested or flat), A (row-major), b.  Q must be symmetric
    to 1e-12 in max absolute deviation.
    """
    if isinstance(source, dict):
        data = source
    elif hasattr(source, "read"):
        data = json.load(source)
    else:
        with open(source, "r") as fh:
            data = json.load(fh)

    n = int(data["n"])
    m = int(data["m"])
    r = int(data["r"])
    objs_raw = data["objectives"]
    if len(objs_raw) != m:
        raise ValueError(f"m={m} but {len(objs_raw)} objectives given")

    def as_matrix(raw, rows, cols, label):
        arr = np.asarray(raw, dtype=float)
        if arr.ndim == 1:
            if arr.size != rows * cols:
                raise ValueError(f"{label}: expected {rows * cols} entries, got {arr.size}")
            arr = arr.reshape(rows, cols)
        if arr.shape != (rows, cols):
            raise ValueError(f"{label}: expected shape ({rows}, {cols}), got {arr.shape}")
        return arr

    objectives = []
    for j, raw in enumerate(objs_raw):
        Q = as_matrix(raw["Q"], n, n, f"objectives[{j}].Q")
        asym = float(np.max(np.abs(Q - Q.T), initial=0.0))
        if asym > 1e-12:
            raise ValueError(f"objectives[{j}].Q not symmetric (max deviation {asym:.3e})")
        c = np.asarray(raw["c"], dtype=float).reshape(-1)
        if c.shape != (n,):
            raise ValueError(f"objectives[{j}].c must have {n} entries")
        objectives.append(
            _quadratic_objective(Q, c, float(raw.get("d", 0.0)), float(raw["mu"]), float(raw["lip"]))
        )

    A = as_matrix(data["A"], r, n, "A")
    b = np.asarray(data["b"], dtype=float).reshape(-1)
    if b.shape != (r,):
        raise ValueError(f"b must have {r} entries")
    return Problem(
        objectives=objectives,
        constraint=LinearConstraint(A=A, b=b),
        name=str(data.get("name", "json-problem")),
    )
