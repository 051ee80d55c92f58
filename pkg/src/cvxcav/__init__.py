"""Best max-norm smoothing of 1-D data under a curvature sign-change budget.

Fits the closest vector to the data in the Chebyshev norm whose second
divided differences change sign at most q times: q + 1 alternately convex
and concave pieces joined by straight segments, found in O(n q)
operations.  Includes an exhaustive reference oracle for small inputs,
synthetic experiment drivers, and a CLI (``cvxcav``).
"""

from .core import (
    Approximation,
    DataSeries,
    Orientation,
    Sign,
    consecutive_differences,
    count_sign_changes,
    curvature_sign_changes,
    curvature_tolerances,
    default_tolerance,
    is_feasible,
    linf_distance,
    second_divided_difference,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    ScoreUndefinedError,
    generate,
    performance_score,
    run_experiment,
)
from .hull import (
    VertexSet,
    best_convex_approximation,
    interpolant,
    neighbours,
    optimal_vertex_set,
    price,
)
from .join import (
    JoinState,
    Parallelogram,
    best_convex_concave,
    closejoin,
    join_gradient,
)
from .oracle import enumerate_patterns, min_linf_for_pattern, oracle_solve
from .solver import (
    PieceSet,
    SolverState,
    locate_critical_index,
    piece_price,
    reconstruct,
    solve,
    solve_best_orientation,
)

__version__ = "0.1.0"

__all__ = [
    "Approximation",
    "DataSeries",
    "ExperimentConfig",
    "ExperimentReport",
    "JoinState",
    "Orientation",
    "Parallelogram",
    "PieceSet",
    "ScoreUndefinedError",
    "Sign",
    "SolverState",
    "VertexSet",
    "best_convex_approximation",
    "best_convex_concave",
    "closejoin",
    "consecutive_differences",
    "count_sign_changes",
    "curvature_sign_changes",
    "curvature_tolerances",
    "default_tolerance",
    "enumerate_patterns",
    "generate",
    "interpolant",
    "is_feasible",
    "join_gradient",
    "linf_distance",
    "locate_critical_index",
    "min_linf_for_pattern",
    "neighbours",
    "optimal_vertex_set",
    "oracle_solve",
    "performance_score",
    "piece_price",
    "price",
    "reconstruct",
    "run_experiment",
    "second_divided_difference",
    "solve",
    "solve_best_orientation",
]
