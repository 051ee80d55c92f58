"""Joins between pieces: the convex-concave fit and the closejoin step.

A join is the straight-line segment between the end of one piece and the
start of the next.  ``closejoin`` shrinks a join as far as a prior price
allows by alternately extending the neighbouring pieces into it; the
convex-concave fit (budget one) is a single closejoin over the whole
range.  Joins over disjoint index ranges may be closed concurrently
provided the resulting prices are merged by maximum afterwards; the
implementation here is sequential.

The even-numbered joins see the data through a sign flip (their left
piece is concave for the convex-first orientation); this is a sign passed
to the scan kernel, never a mutated copy of the data.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .core import DataSeries, Orientation, default_tolerance
from .solver import SolverState, _piece_sign, _succ, reconstruct

__all__ = [
    "JoinState",
    "Parallelogram",
    "best_convex_concave",
    "closejoin",
    "join_gradient",
]

_TRACE_KINDS = {
    _kernels.TRACE_CYCLE: "cycle",
    _kernels.TRACE_LEFT_ADD: "left-add",
    _kernels.TRACE_RIGHT_ADD: "right-add",
}


@dataclass(frozen=True)
class JoinState:
    """Snapshot of the active join while a closejoin pass runs.

    ``kind`` says what the row records: a "cycle" entry (start of one
    left/right alternation) or the state right after an index was
    committed on one side.  ``added`` is the committed index, -1 for cycle
    rows.  Indices are 0-based.
    """

    s: int
    t: int
    h: float
    sigma: int
    kind: str
    added: int


@dataclass(frozen=True)
class Parallelogram:
    """Region between the two offset chords over a join.

    Corners sit at (x_s, f_s), (x_s, f_s + 2*sigma*h), (x_t, f_t) and
    (x_t, f_t - 2*sigma*h); the region degenerates to the chord segment
    when h == 0.  A data point strictly inside forces no join progress; a
    point on or outside the boundary forces the join to shrink.
    """

    x_s: float
    f_s: float
    x_t: float
    f_t: float
    h: float
    sigma: int

    @classmethod
    def for_join(cls, d: DataSeries, s: int, t: int, h: float, sigma: int = 1) -> "Parallelogram":
        return cls(float(d.x[s]), float(d.f[s]), float(d.x[t]), float(d.f[t]), float(h), int(sigma))

    @property
    def corners(self) -> tuple[tuple[float, float], ...]:
        off = 2.0 * self.sigma * self.h
        return (
            (self.x_s, self.f_s),
            (self.x_s, self.f_s + off),
            (self.x_t, self.f_t),
            (self.x_t, self.f_t - off),
        )

    def centre_line(self, xq: float) -> float:
        a = self.f_s + self.sigma * self.h
        b = self.f_t - self.sigma * self.h
        return a + (b - a) * (xq - self.x_s) / (self.x_t - self.x_s)

    def contains(self, xq: float, fq: float, strict: bool = True) -> bool:
        if not (self.x_s <= xq <= self.x_t):
            return False
        gap = abs(fq - self.centre_line(xq))
        return gap < self.h if strict else gap <= self.h


def closejoin(state: SolverState, alpha: int, relaxed: bool = False) -> SolverState:
    """Close join ``alpha`` (1-based) as far as the current price allows.

    Runs the alternating extend-left/extend-right scan over the join's
    index range, with the data sign-flipped for even joins.  Never lowers
    the price; commits new vertices into the state's index set and moves
    the piece endpoint.  ``relaxed`` weakens both branch tests to
    non-strict comparisons (test hook; known to under-fit when both sides
    are relaxed).
    """
    if not 1 <= alpha <= len(state.S) - 1:
        raise ValueError(f"join index must be in [1, {len(state.S) - 1}], got {alpha}")
    x, f = state.data.x, state.data.f
    sa = state.S[alpha - 1]
    ta = _succ(state.I, sa)
    sgn = _piece_sign(state.orientation.first_piece, alpha)
    s_new, t_new, h_new, added, tk, ts, tt, ta_idx, th, ops = _kernels.closejoin_pass(
        x, f, sgn, sa, ta, state.h, relaxed
    )
    if len(added):
        seg = sorted(int(v) for v in added)
        pos = bisect_right(state.I, sa)
        state.I[pos:pos] = seg
    state.S[alpha - 1] = int(s_new)
    state.h = float(h_new)
    state.op_count += int(ops)
    if state.collect_traces:
        rows = [
            JoinState(
                s=int(ts[r]),
                t=int(tt[r]),
                h=float(th[r]),
                sigma=sgn,
                kind=_TRACE_KINDS[int(tk[r])],
                added=int(ta_idx[r]),
            )
            for r in range(len(tk))
        ]
        state.traces.append((alpha, rows))
    return state


def join_gradient(
    d: DataSeries,
    S: Sequence[int],
    I: Sequence[int],
    h: float,
    alpha: int,
    orientation: Orientation = Orientation.CONVEX_FIRST,
) -> float:
    """Gradient of the line a positive price draws across join ``alpha``.

    With h == 0 this is the ordinary chord gradient between the join
    endpoints.  Raises when the piece endpoint has no successor (no join
    exists after the final piece).
    """
    S = list(S)
    I = list(I)
    if not 1 <= alpha <= len(S) - 1:
        raise ValueError(f"join index must be in [1, {len(S) - 1}], got {alpha}")
    sa = S[alpha - 1]
    if sa >= I[-1]:
        raise ValueError("join endpoint coincides with the final index; no join exists")
    ta = _succ(I, sa)
    sgn = _piece_sign(Orientation(orientation).first_piece, alpha)
    return float((d.f[ta] - d.f[sa] - 2.0 * sgn * h) / (d.x[ta] - d.x[sa]))


def best_convex_concave(
    d: DataSeries,
    orientation: Orientation = Orientation.CONVEX_FIRST,
    tol: float | None = None,
    relaxed: bool = False,
    collect_traces: bool = False,
):
    """Best fit with at most one curvature sign change.

    Convex piece, straight join, concave piece (senses swapped for the
    concave-first orientation); degenerates to the one-piece fit when the
    join closes completely.  ``relaxed`` is the test-only hook that
    weakens both closejoin branch tests.  With ``collect_traces`` the
    returned tuple carries the per-step join trace.
    """
    o = Orientation.from_name(orientation) if isinstance(orientation, str) else Orientation(orientation)
    tau = default_tolerance(d.f) if tol is None else float(tol)
    n = d.n
    if n <= 2:
        from .solver import _trivial

        result = _trivial(d, 1, o)
        return (result, []) if collect_traces else result
    state = SolverState(
        data=d,
        orientation=o,
        h=0.0,
        I=[0, n - 1],
        S=[0, n - 1],
        tol=tau,
        q_used=1,
        collect_traces=collect_traces,
    )
    closejoin(state, 1, relaxed=relaxed)
    result = reconstruct(d, state.S, state.I, state.h, o, tol=tau, q=1)
    object.__setattr__(result, "op_count", state.op_count + n)
    return (result, state.traces) if collect_traces else result
