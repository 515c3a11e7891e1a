"""Command-line interface: single solves, multi-start benchmarks, front and flow exports.

All randomness flows through one seeded generator per command, split into
independent streams by string label, so identical seeds and flags reproduce
identical output files (wall-clock columns aside).

Exit codes: 0 success, 2 usage error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from .baselines import AlamoParams, BaselineError, alamo_solve
from .diagnostics import feasibility, kkt_pair, kkt_residual
from .flow import FlowConfig, FlowState, integrate
from .problems import pareto_reference, problem_from_name, rng_for
from .solver import SolverConfig, SolverError, solve

__all__ = ["BenchSummary", "run_benchmark", "export_front", "main"]

USAGE_ERROR = 2
RUNTIME_ERROR = 3

# dual-heavy start used by the front export: the primal settles onto the
# front well before the dual equilibrates, which keeps problems with a flat
# critical set concentrated at the point the dynamics single out
FRONT_THETA0 = 40.0
FRONT_GAMMA0 = 0.15
FRONT_ITERS = 2000


@dataclass
class BenchSummary:
    problem: str
    n_samples: int
    median_iters: float
    mean_iters: float
    mean_time: float
    success_rate: float
    solver: str

    def __post_init__(self):
        if not 0.0 <= self.success_rate <= 1.0:
            raise ValueError("success_rate must lie in [0, 1]")


def _draw_starts(problem, count, rng):
    region = problem.sample_region
    if region is None:
        center = problem.feasible_point
        return center + rng.uniform(-1.0, 1.0, size=(count, problem.n))
    return rng.uniform(region[:, 0], region[:, 1], size=(count, problem.n))


def run_benchmark(suite, n_samples: int, seed: int, solver: str = "ampd") -> list:
    """Multi-start summaries, one per problem name in `suite`.

    Starts are drawn uniformly from each problem's sample region,
    deterministically in `seed`.  A sample that raises counts against the
    success rate instead of aborting the suite.
    """
    names = list(suite)
    if not names:
        raise ValueError("suite must name at least one problem")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if solver not in ("ampd", "alamo"):
        raise ValueError(f"unknown solver: {solver!r}")
    out = []
    for name in names:
        problem = problem_from_name(name)
        starts = _draw_starts(problem, n_samples, rng_for(seed, f"bench:{name}"))
        iters = []
        times = []
        successes = 0
        for x0 in starts:
            t0 = time.perf_counter()
            try:
                if solver == "ampd":
                    res = solve(problem, x0)
                    ok = res.converged
                    used = res.state.k
                else:
                    _, trace = alamo_solve(problem, x0)
                    ok = trace[-1].kkt <= AlamoParams().tol
                    used = sum(t.inner_iters for t in trace)
            except (SolverError, BaselineError):
                ok = False
                used = None
            times.append(time.perf_counter() - t0)
            if ok:
                successes += 1
            if used is not None:
                iters.append(used)
        out.append(
            BenchSummary(
                problem=name,
                n_samples=n_samples,
                median_iters=float(np.median(iters)) if iters else math.nan,
                mean_iters=float(np.mean(iters)) if iters else math.nan,
                mean_time=float(np.mean(times)),
                success_rate=successes / n_samples,
                solver=solver,
            )
        )
    return out


def export_front(problem, n_starts: int, iters: int = FRONT_ITERS, seed: int = 0) -> tuple:
    """Terminal objective values of a fixed-budget multi-start run.

    Returns (rows, n_skipped) where each row is (f_1, ..., f_m, feas) for one
    start; rows whose run aborted are skipped and counted.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    from .problem import eval_objectives
    from .solver import SolverState, advance

    starts = _draw_starts(problem, n_starts, rng_for(seed, f"front:{problem.name}"))
    rows = []
    skipped = 0
    for x0 in starts:
        state = SolverState(k=0, x=x0.copy(), v=np.ones(problem.n),
                            xi=np.ones(problem.r), theta=FRONT_THETA0, gamma=FRONT_GAMMA0)
        try:
            for _ in range(iters):
                state = advance(problem, state).state
        except SolverError:
            skipped += 1
            continue
        fvals = eval_objectives(problem, state.x)
        rows.append(tuple(float(f) for f in fvals) + (feasibility(problem, state.x),))
    return rows, skipped


def _write_trace_csv(path, trace, m):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["k", "alpha", "theta", "gamma", "feas", "kkt", "gap_est", "gap_stale", "wall_time"]
            + [f"f_{j + 1}" for j in range(m)]
        )
        for rec in trace:
            writer.writerow(
                [rec.k, repr(rec.alpha), repr(rec.theta), repr(rec.gamma), repr(rec.feas),
                 repr(rec.kkt), repr(rec.gap_est), int(rec.gap_stale), repr(rec.wall_time)]
                + [repr(float(f)) for f in rec.f_values]
            )


def _flow_anchor(problem):
    # stationary pair when the quadratic data supports a direct solve,
    # otherwise any feasible point with a zero dual
    try:
        x_hat, xi_hat = kkt_pair(problem, np.full(problem.m, 1.0 / problem.m))
        return x_hat, xi_hat
    except (ValueError, np.linalg.LinAlgError):
        return problem.feasible_point.copy(), np.zeros(problem.r)


def cmd_solve(args) -> int:
    problem = problem_from_name(args.problem)
    if args.x0 == "auto":
        x0 = _draw_starts(problem, 1, rng_for(args.seed, f"solve:{problem.name}"))[0]
    else:
        x0 = np.loadtxt(args.x0, delimiter=",", dtype=float).reshape(-1)
    refs = pareto_reference(problem, 1000, seed=args.seed) if args.trace else None
    config = SolverConfig(theta0=args.theta0, gamma0=args.gamma0, tol=args.tol,
                          max_iter=args.max_iter, refs=refs)
    try:
        res = solve(problem, x0, config=config)
    except SolverError as err:
        print(f"solver aborted: {err}", file=sys.stderr)
        return RUNTIME_ERROR
    state = res.state
    if args.trace:
        _write_trace_csv(args.trace, res.trace, problem.m)
    result = {
        "converged": res.converged,
        "iters": state.k,
        "final_kkt": kkt_residual(problem, state.x, state.xi),
        "final_feas": feasibility(problem, state.x),
    }
    if problem.n <= 8:
        result["final_x"] = [float(v) for v in state.x]
    else:
        result["final_x_norm"] = float(np.linalg.norm(state.x))
    if args.result:
        with open(args.result, "w") as fh:
            json.dump(result, fh, indent=2)
            fh.write("\n")
    status = "converged" if res.converged else "hit the iteration cap"
    print(f"{problem.name}: {status} at k={state.k}, "
          f"kkt={result['final_kkt']:.3e}, feas={result['final_feas']:.3e}")
    return 0


def cmd_bench(args) -> int:
    names = [s for s in args.suite.split(",") if s]
    summaries = run_benchmark(names, args.samples, args.seed, args.solver)
    payload = [vars(s) for s in summaries]
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    for s in summaries:
        print(f"{s.problem} [{s.solver}]: success {100 * s.success_rate:.0f}%, "
              f"median iters {s.median_iters:.0f}, mean time {s.mean_time * 1e3:.1f} ms")
    return 0


def cmd_front(args) -> int:
    problem = problem_from_name(args.problem)
    rows, skipped = export_front(problem, args.starts, seed=args.seed)
    if skipped:
        print(f"warning: {skipped} of {args.starts} runs aborted and were skipped",
              file=sys.stderr)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f_{j + 1}" for j in range(problem.m)] + ["feas"])
        for row in rows:
            writer.writerow([repr(v) for v in row])
    print(f"{problem.name}: wrote {len(rows)} front points to {args.out}")
    return 0


def cmd_flow(args) -> int:
    problem = problem_from_name(args.problem)
    x0 = _draw_starts(problem, 1, rng_for(args.seed, f"flow:{problem.name}"))[0]
    init = FlowState(x=x0, v=x0.copy(), xi=np.zeros(problem.r), theta=1.0, gamma=1.0)
    config = FlowConfig(h=args.h, T=args.T)
    traj = integrate(problem, init, config, _flow_anchor(problem))
    wide = problem.n > 8
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        if wide:
            writer.writerow(["t", "feas", "lyapunov", "x_norm"])
        else:
            writer.writerow(["t", "feas", "lyapunov"] + [f"x_{i + 1}" for i in range(problem.n)])
        for t, state, energy, feas in traj:
            head = [repr(t), repr(feas), repr(energy)]
            if wide:
                writer.writerow(head + [repr(float(np.linalg.norm(state.x)))])
            else:
                writer.writerow(head + [repr(float(v)) for v in state.x])
    print(f"{problem.name}: wrote {len(traj)} trajectory samples to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mopd",
        description="Solve and benchmark linearly constrained multiobjective problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="run the accelerated solver on one problem")
    ps.add_argument("--problem", required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--x0", default="auto", help="CSV file with a start point, or 'auto'")
    ps.add_argument("--tol", type=float, default=1e-3)
    ps.add_argument("--max-iter", type=int, default=100_000)
    ps.add_argument("--gamma0", type=float, default=1.0)
    ps.add_argument("--theta0", type=float, default=1.0)
    ps.add_argument("--trace", default=None, help="write the per-iteration trace CSV here")
    ps.add_argument("--result", default=None, help="write the result JSON here")
    ps.set_defaults(fn=cmd_solve)

    pb = sub.add_parser("bench", help="multi-start benchmark over a problem suite")
    pb.add_argument("--suite", required=True, help="comma-separated problem names")
    pb.add_argument("--samples", type=int, default=100)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--solver", choices=("ampd", "alamo"), default="ampd")
    pb.add_argument("--out", default=None, help="write summaries JSON here")
    pb.set_defaults(fn=cmd_bench)

    pf = sub.add_parser("front", help="export terminal objective values of a multi-start run")
    pf.add_argument("--problem", required=True)
    pf.add_argument("--starts", type=int, required=True)
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--out", required=True)
    pf.set_defaults(fn=cmd_front)

    pw = sub.add_parser("flow", help="integrate the continuous dynamics and log the energy")
    pw.add_argument("--problem", required=True)
    pw.add_argument("--h", type=float, default=1e-3)
    pw.add_argument("--T", type=float, default=20.0)
    pw.add_argument("--seed", type=int, default=0)
    pw.add_argument("--out", required=True)
    pw.set_defaults(fn=cmd_flow)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except KeyError as err:
        print(err.args[0] if err.args else str(err), file=sys.stderr)
        return USAGE_ERROR
    except ValueError as err:
        print(f"invalid arguments: {err}", file=sys.stderr)
        return USAGE_ERROR
    except OSError as err:
        print(f"file error: {err}", file=sys.stderr)
        return RUNTIME_ERROR
    except (SolverError, BaselineError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
