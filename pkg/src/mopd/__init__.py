"""Accelerated primal-dual solver for linearly constrained multiobjective
problems, with a continuous-flow reference integrator, diagnostics, a
classical baseline, and a benchmark CLI (`mopd`)."""

from .baselines import AlamoParams, AlamoRecord, ArmijoParams, BaselineError, alamo_solve, armijo_step, msd_direction
from .diagnostics import (
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
from .flow import FlowConfig, FlowState, euler_step, integrate, vertex_select
from .problem import (
    LinearConstraint,
    Objective,
    Problem,
    check_gradients,
    eval_jacobian,
    eval_objectives,
    load_problem_json,
    min_positive_singular,
    operator_norm,
)
from .problems import (
    make_bk1,
    make_logsumexp,
    make_random_quadratic,
    make_witting,
    pareto_reference,
    problem_from_name,
    read_reference_csv,
    rng_for,
    write_reference_csv,
)
from .simplex import HullProjection, ProjectionError, SimplexWeights, min_norm_element, project_hull, simplex_project
from .solver import (
    SolveResult,
    SolverConfig,
    SolverError,
    SolverState,
    StepOutcome,
    TraceRecord,
    advance,
    solve,
    step_size,
    update_params,
)

__version__ = "0.1.0"

__all__ = [
    "AlamoParams",
    "AlamoRecord",
    "ArmijoParams",
    "BaselineError",
    "FlowConfig",
    "FlowState",
    "GapEstimate",
    "HullProjection",
    "LinearConstraint",
    "Objective",
    "ParetoReference",
    "Problem",
    "ProjectionError",
    "SimplexWeights",
    "SolveResult",
    "SolverConfig",
    "SolverError",
    "SolverState",
    "StepOutcome",
    "TraceRecord",
    "alamo_solve",
    "armijo_step",
    "advance",
    "c0_bound",
    "check_gradients",
    "euler_step",
    "eval_jacobian",
    "eval_objectives",
    "feasibility",
    "gap_lower_bound",
    "integrate",
    "kkt_pair",
    "kkt_residual",
    "load_problem_json",
    "lyapunov",
    "make_bk1",
    "make_logsumexp",
    "make_random_quadratic",
    "make_witting",
    "min_norm_element",
    "min_positive_singular",
    "msd_direction",
    "objective_gap",
    "operator_norm",
    "pareto_reference",
    "problem_from_name",
    "project_hull",
    "rate_slope",
    "read_reference_csv",
    "rng_for",
    "simplex_project",
    "solve",
    "step_size",
    "theta_bound",
    "update_params",
    "vertex_select",
    "write_reference_csv",
]
