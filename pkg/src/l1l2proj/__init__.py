"""Projections onto intersections of l1 and l2 balls and spheres.

The heavy lifting for every projection is the root of one piecewise
quadratic residual; four interchangeable root finders are provided together
with exact brute-force reference solvers and a deterministic benchmark
harness.
"""

from .auxiliary import (
    ActiveSet,
    BreakpointStats,
    Breakpoints,
    breakpoints,
    compute_stats,
    eval_phi,
    eval_phi_subderiv,
    eval_psi,
    peek_stats,
    piece_smaller_root,
    update_stats,
)
from .bench import (
    BenchConfig,
    BenchRow,
    gen_type1,
    gen_type2,
    gen_type3,
    run_bench,
    sigma_to_radius,
    trace_run,
    write_csv,
)
from .errors import (
    DegenerateInput,
    DegeneratePiece,
    GenerationExhausted,
    Infeasible,
    InvalidRadius,
    NoRoot,
    NonConvergence,
    PreconditionFailed,
    ProjectionError,
    TooLarge,
)
from .oracle import OracleReport, PhiRootReport, oracle_phi_root, oracle_project
from .projection import (
    Geometry,
    ProblemKind,
    Solution,
    canonical_sphere_point,
    dual_value,
    project,
    project_b1b2_nonneg,
    project_b1s2_nonneg,
    project_s1s2_nonneg,
    project_signed,
)
from .rootfind import (
    Bracket,
    RootResult,
    TraceRow,
    bisection,
    bracket_from_endpoints,
    forward_search,
    general_bracket,
    initial_bracket,
    make_bracket,
    psi_root,
    qasb,
    solve_phi,
    ssnsb,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSet", "BreakpointStats", "Breakpoints", "breakpoints",
    "compute_stats", "eval_phi", "eval_phi_subderiv", "eval_psi",
    "peek_stats", "piece_smaller_root", "update_stats",
    "BenchConfig", "BenchRow", "gen_type1", "gen_type2", "gen_type3",
    "run_bench", "sigma_to_radius", "trace_run", "write_csv",
    "DegenerateInput", "DegeneratePiece", "GenerationExhausted", "Infeasible",
    "InvalidRadius", "NoRoot", "NonConvergence", "PreconditionFailed",
    "ProjectionError", "TooLarge",
    "OracleReport", "PhiRootReport", "oracle_phi_root", "oracle_project",
    "Geometry", "ProblemKind", "Solution", "canonical_sphere_point",
    "dual_value", "project", "project_b1b2_nonneg", "project_b1s2_nonneg",
    "project_s1s2_nonneg", "project_signed",
    "Bracket", "RootResult", "TraceRow", "bisection",
    "bracket_from_endpoints", "forward_search", "general_bracket",
    "initial_bracket", "make_bracket", "psi_root", "qasb", "solve_phi",
    "ssnsb",
]
