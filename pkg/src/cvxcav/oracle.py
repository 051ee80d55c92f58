"""Brute-force reference solver for small problems.

Enumerates every admissible sign pattern for the curvature sequence and,
for each, finds the smallest max-norm shift that makes the pattern's
linear constraints feasible.  Each pattern is an independent linear
program in (v, h) solved exactly with HiGHS; the best pattern gives the
optimum.  This shares no logic with the main solver and exists to certify
it.  Exponential in n: refuses more than ``max_points`` data.

Pattern evaluations are independent and could run in parallel; the loop
here is sequential.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np
from scipy.optimize import linprog

from .core import DataSeries, Orientation, count_sign_changes

__all__ = [
    "SignPattern",
    "enumerate_patterns",
    "min_linf_for_pattern",
    "oracle_solve",
]

DEFAULT_MAX_POINTS = 12

# A sign pattern assigns a required closed half-space sign to each
# consecutive curvature; zero curvatures satisfy either sign, so patterns
# cover the feasible set without special-casing them.
SignPattern = tuple[int, ...]


@lru_cache(maxsize=None)
def _patterns(length: int, q: int, leading: int) -> tuple[SignPattern, ...]:
    if length == 0:
        return ((),)
    out = []
    for pattern in product((1, -1), repeat=length):
        if count_sign_changes(np.asarray(pattern, dtype=np.float64), leading) <= q:
            out.append(pattern)
    return tuple(out)


def enumerate_patterns(
    n: int, q: int, orientation: Orientation = Orientation.CONVEX_FIRST
) -> tuple[SignPattern, ...]:
    """All curvature sign vectors of length n-2 within the change budget.

    Changes are counted from the leading orientation sign, so a vector
    opening opposite to the orientation spends one change up front.  The
    count equals sum(C(n-2, c) for c <= min(q, n-2)).
    """
    if n < 3:
        raise ValueError("patterns are defined for n >= 3")
    if q < 0:
        raise ValueError("q must be nonnegative")
    return _patterns(n - 2, q, Orientation(orientation).first_piece)


def _curvature_matrix(d: DataSeries) -> np.ndarray:
    """Rows give each consecutive curvature as a linear form in v.

    Rows are kept in their natural 1/dx^2 scale: normalizing them would
    let the LP's feasibility tolerance admit witnesses with real
    curvature-sign violations.  Severely clustered abscissae therefore
    degrade the oracle (conservatively) before they degrade the solver.
    """
    n = d.n
    x = d.x
    rows = np.zeros((n - 2, n), dtype=np.float64)
    for i in range(n - 2):
        xi, xj, xk = x[i], x[i + 1], x[i + 2]
        rows[i, i] = 1.0 / ((xj - xi) * (xk - xi))
        rows[i, i + 1] = -(1.0 / (xk - xj) + 1.0 / (xj - xi)) / (xk - xi)
        rows[i, i + 2] = 1.0 / ((xk - xj) * (xk - xi))
    return rows


def _pattern_lp(d: DataSeries, pattern: SignPattern, scaffold) -> tuple[float, np.ndarray]:
    n = d.n
    a_ub, b_ub, cost, bounds, cmat = scaffold
    p = np.asarray(pattern, dtype=np.float64)
    a_ub[2 * n :, :n] = -p[:, None] * cmat
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=bounds,
        method="highs",
        options={
            "primal_feasibility_tolerance": 1e-10,
            "dual_feasibility_tolerance": 1e-10,
        },
    )
    if not res.success:
        raise RuntimeError(f"pattern LP failed unexpectedly: {res.message}")
    return float(res.x[-1]), np.asarray(res.x[:n], dtype=np.float64)


def _lp_scaffold(d: DataSeries):
    n = d.n
    cmat = _curvature_matrix(d)
    eye = np.eye(n)
    ones = np.ones((n, 1))
    a_ub = np.block(
        [
            [eye, -ones],
            [-eye, -ones],
            [np.zeros((n - 2, n)), np.zeros((n - 2, 1))],
        ]
    )
    b_ub = np.concatenate([d.f, -d.f, np.zeros(n - 2)])
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * n + [(0.0, None)]
    return a_ub, b_ub, cost, bounds, cmat


def min_linf_for_pattern(d: DataSeries, pattern: SignPattern) -> tuple[float, np.ndarray]:
    """Least h for which some v within h of the data meets the pattern.

    Minimizes h subject to |v_j - f_j| <= h and pattern_i * c_i(v) >= 0,
    a linear program in (v, h).  Always feasible: any straight line
    satisfies every pattern.  Returns (h, witness).
    """
    n = d.n
    if len(pattern) != max(n - 2, 0):
        raise ValueError(f"pattern must have length {max(n - 2, 0)}")
    if n <= 2:
        return 0.0, d.f.copy()
    return _pattern_lp(d, pattern, _lp_scaffold(d))


def oracle_solve(
    d: DataSeries,
    q: int,
    orientation: Orientation = Orientation.CONVEX_FIRST,
    max_points: int = DEFAULT_MAX_POINTS,
) -> tuple[float, np.ndarray]:
    """Exact optimum and a witness vector by exhaustive pattern search.

    Refuses series longer than ``max_points`` to keep the enumeration
    bounded.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    n = d.n
    if n > max_points:
        raise ValueError(f"oracle refuses n={n} > max_points={max_points}")
    if n <= 2:
        return 0.0, d.f.copy()
    scaffold = _lp_scaffold(d)
    best_h = np.inf
    best_v = None
    for pattern in enumerate_patterns(n, q, orientation):
        h, v = _pattern_lp(d, pattern, scaffold)
        if h < best_h:
            best_h = h
            best_v = v
    return float(best_h), best_v
