"""Projections onto the probability simplex and onto convex hulls of points.

The hull projection min_{lam in simplex} ||G' lam - w||^2 / 2 is the inner
subproblem the solver and the steepest-descent baseline both hit every
iteration: G stacks gradient rows, w is the query point.  m = 1 and m = 2
have closed forms; m >= 3 runs an accelerated projected gradient in the
weight space with a monotone restart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimplexWeights",
    "HullProjection",
    "ProjectionError",
    "simplex_project",
    "project_hull",
    "min_norm_element",
]

_QP_TOL = 1e-12
_QP_CAP = 100_000
_EPS_STALL = 1e-15


@dataclass(frozen=True)
class SimplexWeights:
    """Convex weights: nonnegative, summing to one (validated to 1e-12)."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float).reshape(-1)
        object.__setattr__(self, "lam", lam)
        if lam.size == 0:
            raise ValueError("empty weight vector")
        if np.any(lam < 0.0):
            raise ValueError(f"negative weight: {lam.min()}")
        if abs(float(lam.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {lam.sum()}, not 1")


def _weights_trusted(lam: np.ndarray) -> SimplexWeights:
    # construction-time invariants already hold (closed-form branches); skip
    # the re-validation that dominates small-m profiles
    out = object.__new__(SimplexWeights)
    object.__setattr__(out, "lam", lam)
    return out


@dataclass(frozen=True)
class HullProjection:
    """Result of projecting w onto conv{rows of G}.

    point = G' lam exactly as computed from the returned weights; objective
    is ||point - w||^2 / 2.
    """

    point: np.ndarray
    weights: SimplexWeights
    objective: float


class ProjectionError(RuntimeError):
    """Inner QP hit its iteration cap; carries the best iterate found."""

    def __init__(self, message, best: HullProjection):
        super().__init__(message)
        self.best = best


def _project_simplex_raw(y: np.ndarray) -> np.ndarray:
    # sort-and-threshold; O(m log m)
    u = np.sort(y)[::-1]
    css = np.cumsum(u)
    idx = np.arange(1, y.size + 1)
    rho = int(np.nonzero(u * idx > (css - 1.0))[0][-1])
    tau = (css[rho] - 1.0) / float(rho + 1)
    return np.maximum(y - tau, 0.0)


def simplex_project(y) -> SimplexWeights:
    """Euclidean projection of y onto the probability simplex."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size == 0:
        raise ValueError("cannot project an empty vector")
    if not np.all(np.isfinite(y)):
        raise ValueError("cannot project nonfinite input")
    return SimplexWeights(lam=_project_simplex_raw(y))


def _result(G: np.ndarray, w: np.ndarray, lam: np.ndarray) -> HullProjection:
    point = G.T @ lam
    diff = point - w
    return HullProjection(
        point=point,
        weights=_weights_trusted(lam),
        objective=0.5 * float(diff @ diff),
    )


def project_hull(G, w) -> HullProjection:
    """Project w onto the convex hull of the rows of G.

    Returns the hull point, its convex weights, and the attained objective.
    Satisfies the variational inequality <w - p, g_j - p> <= 0 up to solver
    tolerance for every row g_j.  Deterministic: ties are resolved by the
    fixed algorithm path (uniform-weight initialization, closed forms for
    m <= 2).
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    w = np.asarray(w, dtype=float).reshape(-1)
    m, n = G.shape
    if w.shape != (n,):
        raise ValueError(f"w must have shape ({n},), got {w.shape}")
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(w))):
        raise ValueError("cannot project nonfinite input")
    return _project_hull_checked(G, w, m)


def _project_hull_trusted(G: np.ndarray, w: np.ndarray) -> HullProjection:
    # solver-internal entry: caller guarantees shapes; nonfinite input flows
    # into the m<=2 closed forms (the caller's sentinel catches it) and is
    # still validated before the iterative branch, which must not see NaN
    m = G.shape[0]
    if m > 2 and not (np.all(np.isfinite(G)) and np.all(np.isfinite(w))):
        raise ValueError("cannot project nonfinite input")
    return _project_hull_checked(G, w, m)


def _project_hull_checked(G: np.ndarray, w: np.ndarray, m: int) -> HullProjection:
    if m == 1:
        return _result(G, w, np.ones(1))

    if m == 2:
        # 1-d segment: minimize over t in [0,1] of ||(1-t) g1 + t g2 - w||^2
        d = G[1] - G[0]
        dd = float(d @ d)
        if dd == 0.0:
            return _result(G, w, np.array([1.0, 0.0]))
        t = float((w - G[0]) @ d) / dd
        t = min(1.0, max(0.0, t))
        return _result(G, w, np.array([1.0 - t, t]))

    # m >= 3: accelerated projected gradient over the simplex, step 1/||GG'||,
    # monotone restart, dual-gap stopping.
    Gram = G @ G.T
    lip = float(np.linalg.norm(Gram, 2))
    if lip == 0.0:
        return _result(G, w, np.ones(m) / m)
    step = 1.0 / lip
    Gw = G @ w
    scale = (1.0 + float(np.linalg.norm(w))) * (1.0 + math.sqrt(float(np.max(np.einsum("ij,ij->i", G, G)))))

    def grad(lam):
        return Gram @ lam - Gw

    def value(lam):
        p = G.T @ lam
        diff = p - w
        return 0.5 * float(diff @ diff)

    lam = np.ones(m) / m
    f_lam = value(lam)
    z = lam.copy()
    t_mom = 1.0
    best_lam, best_f = lam, f_lam
    stall = 0
    converged = False
    for _ in range(_QP_CAP):
        g = grad(lam)
        gap = float(lam @ g) - float(g.min())
        if gap <= _QP_TOL * scale:
            converged = True
            break
        cand = _project_simplex_raw(z - step * grad(z))
        f_cand = value(cand)
        if f_cand > f_lam:
            # momentum overshot: restart from the current point
            cand = _project_simplex_raw(lam - step * g)
            f_cand = value(cand)
            t_mom = 1.0
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_mom * t_mom))
        z = cand + ((t_mom - 1.0) / t_next) * (cand - lam)
        lam, f_lam = cand, f_cand
        t_mom = t_next
        if f_lam < best_f - _EPS_STALL * (1.0 + abs(best_f)):
            best_lam, best_f, stall = lam, f_lam, 0
        else:
            stall += 1
            if stall >= 200:
                break
    polished = _polish_on_support(G, w, Gram, Gw, best_lam if not converged else lam)
    if polished is not None:
        return polished
    if converged:
        return _result(G, w, lam)
    raise ProjectionError(
        f"hull projection did not reach gap tolerance in {_QP_CAP} iterations",
        best=_result(G, w, best_lam),
    )


def _polish_on_support(G, w, Gram, Gw, lam):
    """Exact equality-QP solve on the active face the iteration identified.

    Solves min ||G' lam - w||^2 over the affine hull of the support, then
    validates nonnegativity and the global variational inequality; returns
    None when validation fails (caller falls back to the iterate).
    """
    m = lam.size
    support = np.nonzero(lam > 1e-10)[0]
    if support.size == 0:
        return None
    k = support.size
    sys = np.zeros((k + 1, k + 1))
    sys[:k, :k] = Gram[np.ix_(support, support)]
    sys[:k, k] = 1.0
    sys[k, :k] = 1.0
    rhs = np.append(Gw[support], 1.0)
    sol, *_ = np.linalg.lstsq(sys, rhs, rcond=None)
    lam_s = sol[:k]
    if np.any(lam_s < -1e-10):
        return None
    full = np.zeros(m)
    full[support] = np.maximum(lam_s, 0.0)
    total = float(full.sum())
    if not 0.5 < total < 2.0:
        return None
    full /= total
    p = G.T @ full
    resid = w - p
    vi = float(np.max(G @ resid) - p @ resid)
    tol = 1e-11 * (1.0 + float(np.linalg.norm(w))) * (1.0 + float(np.max(np.abs(G), initial=0.0)))
    if not math.isfinite(vi) or vi > tol:
        return None
    return _result(G, w, full)


def min_norm_element(G) -> HullProjection:
    """Smallest-norm point of conv{rows of G}: projection of the origin."""
    G = np.atleast_2d(np.asarray(G, dtype=float))
    return project_hull(G, np.zeros(G.shape[1]))
