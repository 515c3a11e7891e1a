"""Packaged test problems and generators, plus Pareto reference construction.

Four families: bk1 (strongly convex quadratic pair on a line constraint, the
workhorse desk example), witting (nonconvex bi-objective with a singleton
front), logsumexp (convex smooth max surrogates), and seeded random quadratic
instances for the high-dimensional regime.
"""

from __future__ import annotations

import csv
import math
import zlib
from typing import Optional

import numpy as np

from .diagnostics import ParetoReference
from .problem import (
    LinearConstraint,
    Objective,
    Problem,
    _quadratic_objective,
    operator_norm,
)

__all__ = [
    "make_bk1",
    "make_witting",
    "make_logsumexp",
    "make_random_quadratic",
    "pareto_reference",
    "problem_from_name",
    "write_reference_csv",
    "read_reference_csv",
    "rng_for",
]


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Child generator for (seed, label): one seed, streams split by label.

    The label is folded in through crc32 so every subsystem (starts, matrix
    generation, reference sampling) gets an independent, platform-stable
    stream from the single user-facing seed.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), zlib.crc32(label.encode())]))


def make_bk1() -> Problem:
    """f1 = x1^2 + x2^2, f2 = (x1-5)^2 + (x2-5)^2, subject to x1 - x2 = 1.

    Pareto set is the segment {(t, t-1): 0.5 <= t <= 5.5}, attached as an
    analytic parametrization.
    """
    two_eye = 2.0 * np.eye(2)
    objectives = [
        _quadratic_objective(two_eye, np.zeros(2), 0.0, 2.0, 2.0),
        _quadratic_objective(two_eye, np.array([-10.0, -10.0]), 50.0, 2.0, 2.0),
    ]

    def front(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        t = 0.5 + 5.0 * s
        return np.column_stack([t, t - 1.0])

    return Problem(
        objectives=objectives,
        constraint=LinearConstraint(A=[[1.0, -1.0]], b=[1.0]),
        name="bk1",
        sample_region=np.array([[-10.0, 10.0], [-10.0, 10.0]]),
        pareto_parametrization=front,
        feasible_point=np.array([3.0, 2.0]),
    )


def make_witting(lam: float = 0.6) -> Problem:
    """Nonconvex bi-objective with a bump term, subject to x1 - x2 = 1.

    f_i = (sqrt(1+<a,x>^2) + sqrt(1+<b,x>^2) + <c_i,x>)/2 + lam*exp(-<b,x>^2)
    with a=(1,1), b=(1,-1), c_i = ((-1)^(i+1), -1).  mu is 0 (the bump makes
    the objectives nonconvex for lam > 0, so the convexity side of the
    curvature sandwich does not apply); lip is a documented term-wise
    overestimate 2|a|^2 + 2|b|^2 + 2*lam*(2|b|^2 + 4|b|^4), safe because an
    overestimate only shrinks steps.  Known front: the single point
    (0.5, -0.5).
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    a = np.array([1.0, 1.0])
    b = np.array([1.0, -1.0])
    na2 = float(a @ a)
    nb2 = float(b @ b)
    lip = 2.0 * na2 + 2.0 * nb2 + 2.0 * lam * (2.0 * nb2 + 4.0 * nb2 * nb2)

    def build(ci):
        # scalar math on the two fixed directions a=(1,1), b=(1,-1); these
        # closures sit in the solver's hot loop
        c0, c1 = float(ci[0]), float(ci[1])

        def f(x, c0=c0, c1=c1):
            x0, x1 = float(x[0]), float(x[1])
            sa = x0 + x1
            sb = x0 - x1
            return 0.5 * (
                math.sqrt(1.0 + sa * sa) + math.sqrt(1.0 + sb * sb) + c0 * x0 + c1 * x1
            ) + lam * math.exp(-sb * sb)

        def g(x, c0=c0, c1=c1):
            x0, x1 = float(x[0]), float(x[1])
            sa = x0 + x1
            sb = x0 - x1
            ra = sa / math.sqrt(1.0 + sa * sa)
            rb = sb / math.sqrt(1.0 + sb * sb)
            cb = 0.5 * rb - 2.0 * lam * sb * math.exp(-sb * sb)
            return np.array([0.5 * (ra + c0) + cb, 0.5 * (ra + c1) - cb])

        return Objective(eval=f, grad=g, mu=0.0, lip=lip)

    def front(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        return np.tile(np.array([0.5, -0.5]), (s.size, 1))

    return Problem(
        objectives=[build(np.array([1.0, -1.0])), build(np.array([-1.0, -1.0]))],
        constraint=LinearConstraint(A=[[1.0, -1.0]], b=[1.0]),
        name="witting",
        sample_region=np.array([[-10.0, 10.0], [-10.0, 10.0]]),
        pareto_parametrization=front,
        feasible_point=np.array([0.5, -0.5]),
    )


def _default_lse_coeffs(n=2, m=2, terms=4):
    # fixed seed-0 coefficient draw; NOT taken from any published table
    rng = np.random.default_rng(0)
    coeffs = []
    for _ in range(m):
        coeffs.append((rng.uniform(-1.0, 1.0, (terms, n)), rng.uniform(-1.0, 1.0, terms)))
    return coeffs


def make_logsumexp(coeffs=None, constraint: Optional[LinearConstraint] = None) -> Problem:
    """f_i(x) = log sum_j exp(<a_j_i, x> - b_j_i), four terms per objective.

    coeffs is a list of (A_i, b_i) pairs, A_i of shape (4, n).  The shipped
    default set is drawn deterministically from seed 0 and is a stand-in, not
    a published table.  mu = 0; per-objective lip is the standard log-sum-exp
    smoothness bound |A_i|_2^2.
    """
    if coeffs is None:
        coeffs = _default_lse_coeffs()
    parsed = []
    n = None
    for A_i, b_i in coeffs:
        A_i = np.asarray(A_i, dtype=float)
        b_i = np.asarray(b_i, dtype=float).reshape(-1)
        if A_i.ndim != 2 or A_i.shape[0] != 4:
            raise ValueError("each objective needs a (4, n) coefficient matrix")
        if b_i.shape != (4,):
            raise ValueError("each objective needs 4 offsets")
        if n is None:
            n = A_i.shape[1]
        elif A_i.shape[1] != n:
            raise ValueError("coefficient matrices disagree on n")
        parsed.append((A_i, b_i))
    if constraint is None:
        constraint = LinearConstraint(A=[np.ones(n).tolist()], b=[1.0])
    if constraint.n != n:
        raise ValueError("constraint dimension does not match coefficients")

    objectives = []
    for A_i, b_i in parsed:
        lip_i = operator_norm(A_i) ** 2

        def f(x, A_i=A_i, b_i=b_i):
            z = A_i @ x - b_i
            zmax = float(np.max(z))
            return zmax + float(np.log(np.sum(np.exp(z - zmax))))

        def g(x, A_i=A_i, b_i=b_i):
            z = A_i @ x - b_i
            z = z - np.max(z)
            w = np.exp(z)
            w /= w.sum()
            return A_i.T @ w

        objectives.append(Objective(eval=f, grad=g, mu=0.0, lip=lip_i))

    # any x with sum(x) = 1 is feasible for the default constraint; for a
    # custom one use least squares
    feas, *_ = np.linalg.lstsq(constraint.A, constraint.b, rcond=None)
    return Problem(
        objectives=objectives,
        constraint=constraint,
        name="logsumexp",
        sample_region=np.array([[-10.0, 10.0]] * n),
        feasible_point=feas,
    )


def make_random_quadratic(
    n: int,
    m: int,
    r: int,
    seed: int,
    mu_range: float = 0.1,
    lip_range: float = 10.0,
) -> Problem:
    """Seeded random quadratic instance: m objectives, r equality rows.

    Each Q_j is an orthogonal conjugation of a spectrum drawn uniformly in
    [mu_range, lip_range]; declared per-objective bounds are the range
    endpoints (valid by construction).  A has uniform [-1,1] entries and
    b = A x_feas for a drawn x_feas, so the feasible set is never empty.
    """
    if not (n >= r >= 1 and m >= 1):
        raise ValueError("need n >= r >= 1 and m >= 1")
    if not (0.0 <= mu_range <= lip_range) or lip_range <= 0.0:
        raise ValueError("need 0 <= mu_range <= lip_range with lip_range > 0")
    rng = rng_for(seed, "random-quadratic")
    region = np.array([[-1.0, 1.0]] * n)
    objectives = []
    for _ in range(m):
        basis, _ = np.linalg.qr(rng.normal(size=(n, n)))
        eigs = rng.uniform(mu_range, lip_range, n)
        Q = (basis * eigs) @ basis.T
        Q = 0.5 * (Q + Q.T)
        c = rng.uniform(-1.0, 1.0, n)
        objectives.append(_quadratic_objective(Q, c, 0.0, mu_range, lip_range))
    A = rng.uniform(-1.0, 1.0, (r, n))
    x_feas = rng.uniform(-1.0, 1.0, n)
    b = A @ x_feas
    return Problem(
        objectives=objectives,
        constraint=LinearConstraint(A=A, b=b),
        name=f"rq-n{n}-m{m}-r{r}-s{seed}",
        sample_region=region,
        feasible_point=x_feas,
    )


def pareto_reference(problem: Problem, count: int, seed: int = 0) -> ParetoReference:
    """Reference set for gap estimation.

    With an analytic parametrization attached: a uniform parameter grid.
    Otherwise: run the accelerated solver from `count` random starts, keep
    terminal points with KKT <= 1e-4, and project them onto the affine
    feasible set (restores the 1e-8 feasibility invariant; KKT is checked
    before the projection).  Raises when every start fails.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if problem.pareto_parametrization is not None:
        s = np.linspace(0.0, 1.0, count)
        points = problem.pareto_parametrization(s)
        return ParetoReference.from_points(problem, points, source="analytic")

    from .solver import SolverConfig, solve

    if problem.sample_region is None:
        raise ValueError("need a sample_region to draw solver starts")
    rng = rng_for(seed, "pareto-reference")
    lo, hi = problem.sample_region[:, 0], problem.sample_region[:, 1]
    A = problem.constraint.A
    pinv = np.linalg.pinv(A)
    kept = []
    config = SolverConfig(tol=1e-4)
    for _ in range(count):
        x0 = rng.uniform(lo, hi)
        try:
            result = solve(problem, x0, config=config)
        except Exception:
            continue
        if not result.converged:
            continue
        z = result.state.x
        z = z - pinv @ problem.constraint.residual(z)
        kept.append(z)
    if not kept:
        raise ValueError("no start produced a KKT point at tolerance 1e-4")
    return ParetoReference.from_points(problem, np.array(kept), source="solver-generated")


def write_reference_csv(ref: ParetoReference, path) -> None:
    """Columns z_1..z_n,f_1..f_m, one row per reference point."""
    n = ref.points.shape[1]
    m = ref.values.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"z_{i+1}" for i in range(n)] + [f"f_{j+1}" for j in range(m)])
        for z, f in zip(ref.points, ref.values):
            writer.writerow([repr(float(v)) for v in z] + [repr(float(v)) for v in f])


def read_reference_csv(path, problem: Optional[Problem] = None) -> ParetoReference:
    """Read a reference CSV; validates feasibility when a problem is given."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError("empty reference file")
    header = rows[0]
    n = sum(1 for h in header if h.startswith("z_"))
    m = sum(1 for h in header if h.startswith("f_"))
    if n == 0 or m == 0 or n + m != len(header):
        raise ValueError(f"malformed reference header: {header}")
    data = np.array([[float(v) for v in row] for row in rows[1:]])
    if data.size == 0:
        raise ValueError("reference file has no data rows")
    points, values = data[:, :n], data[:, n:]
    if problem is not None:
        return ParetoReference.from_points(problem, points, source="sampled")
    return ParetoReference(points=points, values=values, source="sampled")


def problem_from_name(name: str, seed: int = 0) -> Problem:
    """Resolve a CLI problem name: packaged name, rq-N-M-R pattern, or JSON path.

    Raises KeyError for unknown names (the CLI maps that to a usage error).
    """
    if name == "bk1":
        return make_bk1()
    if name == "witting":
        return make_witting()
    if name == "logsumexp":
        return make_logsumexp()
    if name.startswith("rq-"):
        parts = name.split("-")[1:]
        if len(parts) == 3 and all(p.isdigit() for p in parts):
            return make_random_quadratic(int(parts[0]), int(parts[1]), int(parts[2]), seed)
        raise KeyError(f"bad random-quadratic pattern (want rq-N-M-R): {name}")
    if name.endswith(".json"):
        from .problem import load_problem_json

        return load_problem_json(name)
    raise KeyError(f"unknown problem: {name}")
