"""Best smoothing with at most q curvature sign changes.

The solution is built recursively: the best fit with budget q grows out of
the best fit with budget q - 2 by splitting the piece that carries the
price at its critical index, re-closing every join against the price the
remaining pieces already force, and re-running any join whose boundary
gradients the final price invalidates.  Total work is O(n q).

State layout (all 0-based): ``I`` is the sorted union of committed hull
vertices, ``S`` the sorted right endpoints of the pieces (the last data
index is always a member).  Piece alpha spans [t_{alpha-1}, s_alpha] where
t_alpha is s_alpha's successor in ``I`` while the price is positive and
s_alpha itself once it drops to zero.  ``solve`` owns its state
exclusively; nothing here mutates shared inputs.
"""

from __future__ import annotations

import os
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .core import (
    Approximation,
    DataSeries,
    Orientation,
    count_sign_changes,
    curvature_sign_changes,
    curvature_tolerances,
    default_tolerance,
    linf_distance,
)

__all__ = [
    "PieceSet",
    "SolverState",
    "locate_critical_index",
    "piece_price",
    "reconstruct",
    "solve",
    "solve_best_orientation",
]

# Enable expensive structural self-checks (piece slices of I must equal the
# independently recomputed hull vertex sets) via flag or CVXCAV_DEBUG=1.
DEBUG_CHECKS = os.environ.get("CVXCAV_DEBUG", "") not in ("", "0")


@dataclass(frozen=True)
class PieceSet:
    """Ordered piece right-endpoints over an ambient vertex index set.

    The final data index is always a member and every element must be a
    committed vertex.
    """

    elements: tuple[int, ...]
    index_set: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = self.elements
        idx = set(self.index_set)
        if not elems:
            raise ValueError("piece set must be nonempty")
        if any(b <= a for a, b in zip(elems, elems[1:])):
            raise ValueError("piece endpoints must be strictly ascending")
        if elems[-1] != self.index_set[-1]:
            raise ValueError("the last data index must close the final piece")
        if not set(elems) <= idx:
            raise ValueError("piece endpoints must be members of the index set")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(eq=False)
class SolverState:
    """Mutable bundle threaded through the solve loop (single-owner)."""

    data: DataSeries
    orientation: Orientation
    h: float
    I: list[int]
    S: list[int]
    tol: float
    q_used: int = 0
    j_star: int | None = None
    beta: int | None = None
    k: int | None = None
    k_plus: int | None = None
    gamma: int = 1
    alpha_bar: int = 0
    h_prev: float = 0.0
    I_prev: list[int] = field(default_factory=list)
    S_prev: list[int] = field(default_factory=list)
    op_count: int = 0
    collect_traces: bool = False
    traces: list = field(default_factory=list)


def _succ(I: Sequence[int], v: int) -> int:
    return I[bisect_right(I, v)]


def _pred(I: Sequence[int], v: int) -> int:
    return I[bisect_left(I, v) - 1]


def _piece_sign(osgn: int, alpha: int) -> int:
    return osgn if alpha % 2 == 1 else -osgn


def _locate(x, f, I: Sequence[int], S: Sequence[int], osgn: int):
    """Scan every piece for the largest data-to-chord gap.

    Returns (gap, j_star, k, k_plus, beta, ops).  gap equals twice the
    price of the piece structure; j_star is the lowest attaining data
    index, bracketed by the consecutive vertices k < j_star < k_plus of
    piece beta.  Pieces are priced over [t_{alpha-1}, s_alpha] with
    t_alpha always the successor of s_alpha in I.
    """
    best = 0.0
    bj = bk = bkp = bbeta = -1
    ops = 0
    t_prev = 0
    for alpha, sa in enumerate(S, start=1):
        sgn = _piece_sign(osgn, alpha)
        p0 = bisect_left(I, t_prev)
        p1 = bisect_left(I, sa)
        if p1 > p0:
            verts = np.asarray(I[p0 : p1 + 1], dtype=np.int64)
            gap, j, k, kp, o = _kernels.chain_gap(x, f, verts, sgn)
            ops += int(o)
            if gap > best:
                best, bj, bk, bkp, bbeta = gap, int(j), int(k), int(kp), alpha
        if alpha < len(S):
            # A join collapsed at zero price may leave s_alpha without a
            # successor (or duplicated in S); its skipped segment prices 0.
            t_prev = I[p1 + 1] if p1 + 1 < len(I) else sa
    return best, bj, bk, bkp, bbeta, ops


def piece_price(
    d: DataSeries,
    S: Sequence[int],
    I: Sequence[int],
    orientation: Orientation = Orientation.CONVEX_FIRST,
) -> float:
    """Price of a piece structure: the largest per-piece one-sided fit cost.

    Pieces of width <= 1 cost nothing.
    """
    S = list(S)
    I = list(I)
    osgn = Orientation(orientation).first_piece
    gap, _, _, _, _, _ = _locate(d.x, d.f, I, S, osgn)
    return 0.5 * gap


def locate_critical_index(
    d: DataSeries,
    S: Sequence[int],
    I: Sequence[int],
    orientation: Orientation = Orientation.CONVEX_FIRST,
    tol: float | None = None,
) -> tuple[int, int, int, int]:
    """Lowest data index attaining the structure price (0-based).

    Returns (j_star, k, k_plus, beta) with k, k_plus the consecutive
    committed vertices around j_star and beta the 1-based piece index.
    Raises when the price vanishes (no critical index exists).
    """
    if tol is None:
        tol = default_tolerance(d.f)
    osgn = Orientation(orientation).first_piece
    gap, bj, bk, bkp, bbeta, _ = _locate(d.x, d.f, list(I), list(S), osgn)
    if 0.5 * gap <= tol:
        raise ValueError("no critical index: the piece structure already fits the data")
    return bj, bk, bkp, bbeta


def _check_structure(state: SolverState) -> None:
    """Each piece's slice of I must be that range's own hull vertex set."""
    from .hull import optimal_vertex_set

    I, S = state.I, state.S
    osgn = state.orientation.first_piece
    t_prev = 0
    for alpha, sa in enumerate(S, start=1):
        sgn = _piece_sign(osgn, alpha)
        p0 = bisect_left(I, t_prev)
        p1 = bisect_left(I, sa)
        got = tuple(I[p0 : p1 + 1])
        expect = optimal_vertex_set(state.data, t_prev, sa, sgn).indices
        if got != expect:
            raise AssertionError(
                f"piece {alpha} vertex slice {got} != recomputed hull {expect}"
            )
        if alpha < len(S):
            t_prev = I[p1 + 1] if p1 + 1 < len(I) else sa


def _reconstruct_arrays(x, f, I, S, h, osgn, tau, q):
    """Build the smoothed vector and piece/join ranges from solver state.

    Offsets every committed vertex by the signed price of its piece,
    interpolates linearly elsewhere, then tries to move the endpoints of
    single-point edge pieces back onto the data (legal whenever the
    adjacent join keeps every interior point within the price and the
    sign-change budget still holds).
    """
    n = len(x)
    positive = h > tau
    heff = h if positive else 0.0
    Iarr = np.asarray(I, dtype=np.int64)
    yI = np.empty(Iarr.size, dtype=np.float64)
    pieces = []
    t_prev = 0
    for alpha, sa in enumerate(S, start=1):
        sgn = _piece_sign(osgn, alpha)
        p0 = bisect_left(I, t_prev)
        p1 = bisect_left(I, sa)
        yI[p0 : p1 + 1] = f[Iarr[p0 : p1 + 1]] + sgn * heff
        pieces.append((t_prev, sa))
        if alpha < len(S):
            t_prev = I[p1 + 1] if positive else sa
    y = np.interp(x, x[Iarr], yI)
    joins = []
    if positive:
        for sa in S[:-1]:
            joins.append((sa, _succ(I, sa)))

    if positive and len(S) >= 2:
        if pieces[-1][0] == pieces[-1][1] == n - 1:
            y2 = _snap_endpoint(x, f, y, S[-2], n - 1, h)
            if y2 is not None and _snap_ok(x, f, y2, h, osgn, tau, q):
                y = y2
        if pieces[0] == (0, 0):
            anchor = _succ(I, 0)
            y2 = _snap_endpoint(x, f, y, anchor, 0, h)
            if y2 is not None and _snap_ok(x, f, y2, h, osgn, tau, q):
                y = y2
    return y, pieces, joins


def _snap_endpoint(x, f, y, anchor, end, h):
    """Move y[end] as close to f[end] as the adjacent join line allows.

    The join line from (x[anchor], y[anchor]) is re-tilted through the new
    endpoint; interior points bound how far it may move.  Returns the
    adjusted vector, or None when no admissible move exists.
    """
    lo, hi = -np.inf, np.inf
    a, b = (end, anchor) if end < anchor else (anchor, end)
    denom = x[end] - x[anchor]
    for j in range(a + 1, b):
        theta = (x[j] - x[anchor]) / denom
        base = y[anchor] * (1.0 - theta)
        lo = max(lo, (f[j] - h - base) / theta)
        hi = min(hi, (f[j] + h - base) / theta)
    if lo > hi:
        return None
    target = min(max(f[end], lo), hi)
    if abs(target - f[end]) > h * (1.0 + 1e-12):
        return None
    y2 = y.copy()
    y2[end] = target
    for j in range(a + 1, b):
        theta = (x[j] - x[anchor]) / denom
        y2[j] = y[anchor] * (1.0 - theta) + target * theta
    return y2


def _snap_ok(x, f, y2, h, osgn, tau, q):
    if linf_distance(y2, f) > h * (1.0 + 1e-12) + tau:
        return False
    xi, xj, xk = x[:-2], x[1:-1], x[2:]
    c = ((y2[2:] - y2[1:-1]) / (xk - xj) - (y2[1:-1] - y2[:-2]) / (xj - xi)) / (xk - xi)
    return count_sign_changes(c, osgn, curvature_tolerances(x, tau)) <= q


def _certificate(I, S, j_star, k):
    """Index set whose curvatures force every strictly closer vector out.

    Formed from the join points the next refinement level would create:
    the existing piece endpoints plus (k, j_star) and their vertex
    successors.  Carries between q+3 and 2q+3 indices.
    """
    if j_star is None or j_star < 0:
        return None
    S2 = sorted(set(S) | {k, j_star})
    I2 = sorted(set(I) | {j_star})
    K = set()
    for sa in S2[:-1]:
        K.add(sa)
        K.add(I2[bisect_right(I2, sa)])
    return tuple(sorted(K))


def reconstruct(
    d: DataSeries,
    S: Sequence[int],
    I: Sequence[int],
    h: float,
    orientation: Orientation = Orientation.CONVEX_FIRST,
    tol: float | None = None,
    q: int | None = None,
) -> Approximation:
    """Smoothed vector from a solver piece structure (0-based S and I).

    ``q`` bounds the sign-change budget used when deciding whether edge
    pieces may snap back onto the data; it defaults to the structural
    budget len(S) - 1.
    """
    o = Orientation(orientation)
    tau = default_tolerance(d.f) if tol is None else float(tol)
    budget = (len(S) - 1) if q is None else int(q)
    S = [int(v) for v in S]
    I = [int(v) for v in I]
    h = float(h) if h > tau else 0.0
    y, pieces, joins = _reconstruct_arrays(
        d.x, d.f, I, S, h, o.first_piece, tau, budget
    )
    changes = curvature_sign_changes(d, y, o.first_piece, tau)
    return Approximation(
        y=y,
        h=h,
        pieces=tuple((a + 1, b + 1) for a, b in pieces),
        joins=tuple((a + 1, b + 1) for a, b in joins),
        vertex_set=tuple(v + 1 for v in I),
        sign_changes_used=changes,
        q=budget,
        orientation=o,
        endpoint_deltas=(float(y[0] - d.f[0]), float(y[-1] - d.f[-1])),
    )


def _join_needs_reclose(state: SolverState, alpha: int) -> bool:
    """Do the gradients at a join's ends break against the final price?"""
    x, f = state.data.x, state.data.f
    I, S = state.I, state.S
    sa = S[alpha - 1]
    sa_prev = state.S_prev[alpha - 1]
    sgn = _piece_sign(state.orientation.first_piece, alpha)
    ta = _succ(I, sa)
    g = (f[ta] - f[sa] - 2.0 * sgn * state.h) / (x[ta] - x[sa])
    if sa > sa_prev:
        p = _pred(I, sa)
        g_left = (f[sa] - f[p]) / (x[sa] - x[p])
        if sgn * g_left > sgn * g:
            return True
    ta_prev = _succ(state.I_prev, sa_prev)
    if ta < ta_prev:
        tp = _succ(I, ta)
        g_right = (f[tp] - f[ta]) / (x[tp] - x[ta])
        if sgn * g_right > sgn * g:
            return True
    return False


def _reset_and_reclose(state: SolverState, alpha: int) -> None:
    """Restore a join to its pre-refinement extent and close it again."""
    from .join import closejoin

    sa_prev = state.S_prev[alpha - 1]
    ta_prev = _succ(state.I_prev, sa_prev)
    state.S[alpha - 1] = sa_prev
    lo = bisect_right(state.I, sa_prev)
    hi = bisect_left(state.I, ta_prev)
    del state.I[lo:hi]
    closejoin(state, alpha)


def _trivial(d: DataSeries, q: int, o: Orientation) -> Approximation:
    n = d.n
    return Approximation(
        y=d.f.copy(),
        h=0.0,
        pieces=((1, n),),
        joins=(),
        vertex_set=tuple(range(1, n + 1)),
        sign_changes_used=0,
        q=q,
        orientation=o,
    )


def solve(
    d: DataSeries,
    q: int,
    orientation: Orientation | str = Orientation.CONVEX_FIRST,
    tol: float | None = None,
) -> Approximation:
    """Best max-norm fit with at most q curvature sign changes.

    The leading piece is convex for the convex-first orientation and
    concave otherwise.  Already-feasible data come back unchanged with
    h = 0 (the method is projective).  Raises on q < 0.
    """
    from .join import closejoin

    if q < 0:
        raise ValueError("q must be nonnegative")
    o = Orientation.from_name(orientation) if isinstance(orientation, str) else Orientation(orientation)
    n = d.n
    if n <= 2:
        return _trivial(d, q, o)
    x, f = d.x, d.f
    tau = default_tolerance(f) if tol is None else float(tol)
    osgn = o.first_piece
    state = SolverState(data=d, orientation=o, h=0.0, I=[], S=[], tol=tau)
    state.q_used = q % 2
    if state.q_used == 0:
        verts, ops = _kernels.hull_scan(x, f, 0, n - 1, osgn)
        state.I = [int(v) for v in verts]
        state.S = [n - 1]
        state.op_count += int(ops)
    else:
        state.I = [0, n - 1]
        state.S = [0, n - 1]
        closejoin(state, 1)

    while True:
        gap, bj, bk, bkp, bbeta, ops = _locate(x, f, state.I, state.S, osgn)
        state.op_count += int(ops)
        state.h = 0.5 * gap
        if DEBUG_CHECKS:
            _check_structure(state)
        if state.h <= tau:
            state.h = 0.0
            state.j_star = state.beta = state.k = state.k_plus = None
            break
        state.j_star, state.k, state.k_plus, state.beta = bj, bk, bkp, bbeta
        if state.q_used == q:
            break

        # Split the critical piece: the price-determining index becomes a
        # one-point piece of opposite sense between two new joins.
        insort(state.I, bj)
        insort(state.S, bk)
        insort(state.S, bj)
        state.q_used += 2
        gap, _, _, _, _, ops = _locate(x, f, state.I, state.S, osgn)
        state.op_count += int(ops)
        state.h = 0.5 * gap
        h_prime = state.h
        state.h_prev = h_prime
        state.I_prev = list(state.I)
        state.S_prev = list(state.S)

        # Close every join against the price the remaining pieces force.
        # Increases within the zero tolerance are rounding noise, not
        # price rises; counting them would let the last-raiser index fall
        # below gamma and derail the re-run loop.
        gamma = 1
        abar = 0
        for alpha in range(1, len(state.S)):
            h_before = state.h
            closejoin(state, alpha)
            if state.h > h_before + tau:
                abar = alpha
            if state.h <= tau:
                gamma = alpha + 1
        state.gamma = gamma
        state.alpha_bar = abar
        if state.h <= h_prime + tau or abar == 0:
            continue

        # The price rose after some joins were already closed: re-run the
        # ones closed while it was still zero, and any whose boundary
        # gradients the final price invalidates.  Joins from the last
        # raiser onwards already ran at the final price.
        alpha = 1
        while True:
            if alpha >= len(state.S):
                raise AssertionError("join re-run walked past the last join")
            if alpha < gamma:
                _reset_and_reclose(state, alpha)
            elif alpha == abar:
                break
            elif _join_needs_reclose(state, alpha):
                _reset_and_reclose(state, alpha)
            alpha += 1

    y, pieces, joins = _reconstruct_arrays(
        x, f, state.I, state.S, state.h, osgn, tau, q
    )
    state.op_count += n
    changes = curvature_sign_changes(d, y, osgn, tau)
    cert = None
    if state.h > tau:
        cert = _certificate(state.I, state.S, state.j_star, state.k)
    return Approximation(
        y=y,
        h=float(state.h),
        pieces=tuple((a + 1, b + 1) for a, b in pieces),
        joins=tuple((a + 1, b + 1) for a, b in joins),
        vertex_set=tuple(v + 1 for v in state.I),
        sign_changes_used=changes,
        q=q,
        orientation=o,
        j_star=None if state.j_star is None else state.j_star + 1,
        beta=state.beta,
        certificate=None if cert is None else tuple(v + 1 for v in cert),
        op_count=state.op_count,
        endpoint_deltas=(float(y[0] - f[0]), float(y[-1] - f[-1])),
    )


def solve_best_orientation(d: DataSeries, q: int, tol: float | None = None) -> Approximation:
    """Best fit over both orientations; ties favour convex-first."""
    a = solve(d, q, Orientation.CONVEX_FIRST, tol=tol)
    b = solve(d, q, Orientation.CONCAVE_FIRST, tol=tol)
    return a if a.h <= b.h else b
