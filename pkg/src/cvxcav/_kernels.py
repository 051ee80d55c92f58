"""Hot inner-loop kernels, JIT-compiled with numba when enabled.

Every kernel is written once as a plain array function; the numba path
compiles the identical source, so results and operation counts are the
same on both backends.  Backend selection happens at import time from the
``CVXCAV_BACKEND`` environment variable:

    auto    (default) numba when importable, pure Python otherwise
    numba   require numba, fail fast if missing
    python  force the uncompiled fallback

Operation counts returned by the kernels tally three-point curvature
evaluations plus per-index scan steps; they are backend-independent and
feed the linear-work scaling checks.

All index arguments are 0-based and ranges are inclusive.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "chain_gap",
    "chord",
    "closejoin_pass",
    "hull_scan",
    "segment_gap",
]

TRACE_CYCLE = 0
TRACE_LEFT_ADD = 1
TRACE_RIGHT_ADD = 2


def _select_backend() -> str:
    choice = os.environ.get("CVXCAV_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            import numba  # noqa: F401
        except ImportError:
            return "python"
        return "numba"
    if choice in ("python", "numpy"):
        return "python"
    if choice == "numba":
        import numba  # noqa: F401  (raises if unavailable)

        return "numba"
    raise ValueError(f"CVXCAV_BACKEND must be auto, numba or python, got {choice!r}")


BACKEND = _select_backend()


def _chord(x, f, i, k, j):
    # Value at x[j] of the straight line through points i and k.
    g = (f[k] - f[i]) / (x[k] - x[i])
    return f[i] + g * (x[j] - x[i])


def _curvature(x, f, i, j, k):
    return ((f[k] - f[j]) / (x[k] - x[j]) - (f[j] - f[i]) / (x[j] - x[i])) / (x[k] - x[i])


def _hull_scan(x, f, lo, hi, sigma):
    """Vertex indices of the sigma-side hull boundary of points lo..hi.

    sigma=+1 keeps the lower boundary, sigma=-1 the upper.  Retention is
    strict (collinear interior points are dropped), so the chain's interior
    curvatures all satisfy sigma * c > 0.  Returns (vertices, op_count);
    amortized O(hi - lo) curvature evaluations.
    """
    m = hi - lo + 1
    verts = np.empty(m, np.int64)
    verts[0] = lo
    top = 1
    ops = 0
    for p in range(lo + 1, hi + 1):
        while top >= 2:
            ops += 1
            c = _curvature(x, f, verts[top - 2], verts[top - 1], p)
            if sigma * c > 0.0:
                break
            top -= 1
        verts[top] = p
        top += 1
    return verts[:top], ops


def _segment_gap(x, f, i, k, sigma):
    """Largest signed gap sigma * (f_j - chord_ik(x_j)) over interior j.

    Returns (gap, j, ops) with gap clamped at 0 and j the lowest attaining
    index (-1 when no interior point rises above the chord).  The price of
    making the segment convex (sigma=+1) or concave (-1) is gap / 2.
    """
    best = 0.0
    bj = -1
    ops = 0
    if k > i + 1:
        g = (f[k] - f[i]) / (x[k] - x[i])
        for j in range(i + 1, k):
            ops += 1
            gap = sigma * (f[j] - (f[i] + g * (x[j] - x[i])))
            if gap > best:
                best = gap
                bj = j
    return best, bj, ops


def _chain_gap(x, f, verts, sigma):
    """Largest segment gap along a chain of vertex indices.

    Returns (gap, j, k, k_plus, ops): the lowest data index attaining the
    maximum and the consecutive chain vertices bracketing it.
    """
    best = 0.0
    bj = -1
    bk = -1
    bkp = -1
    ops = 0
    for idx in range(len(verts) - 1):
        i = verts[idx]
        k = verts[idx + 1]
        gap, j, o = _segment_gap(x, f, i, k, sigma)
        ops += o
        if gap > best:
            best = gap
            bj = j
            bk = i
            bkp = k
    return best, bj, bk, bkp, ops


def _closejoin_pass(x, f, sigma, s, t, h, relaxed):
    """Shrink the join [s, t] as far as a prior price h allows.

    The piece left of the join has sense ``sigma`` (+1 convex), the right
    piece the opposite sense.  Alternately extends the left piece rightwards
    and the right piece leftwards; an index is committed only when finishing
    with it cannot cost more than stopping where we are.  Both branch tests
    are strict; ``relaxed`` weakens them to non-strict (test hook — with
    both relaxed the procedure is known to under-fit).

    h never decreases; s is non-decreasing, t non-increasing, and s == t is
    reachable only while h == 0.

    Returns (s, t, h, added, trace_kind, trace_s, trace_t, trace_add,
    trace_h, ops).  ``added`` holds the committed interior vertex indices
    (unsorted).  The trace records one row per alternation-cycle entry
    (kind 0) and per committed index (kind 1 left, 2 right), carrying the
    state after the event.
    """
    width = t - s
    added = np.empty(width + 2, np.int64)
    na = 0
    cap = 3 * width + 8
    tr_kind = np.empty(cap, np.int64)
    tr_s = np.empty(cap, np.int64)
    tr_t = np.empty(cap, np.int64)
    tr_add = np.empty(cap, np.int64)
    tr_h = np.empty(cap, np.float64)
    nt = 0
    ops = 0

    tr_kind[nt] = TRACE_CYCLE
    tr_s[nt] = s
    tr_t[nt] = t
    tr_add[nt] = -1
    tr_h[nt] = h
    nt += 1

    while True:
        if s >= t - 1:
            break
        u = t - s

        # Extend the left piece while committing the next hull vertex cannot
        # cost more than stopping at the current s.
        hull, o = _hull_scan(x, f, s, t, sigma)
        ops += o
        pos = 1
        while True:
            splus = hull[pos]
            gap, _, o = _segment_gap(x, f, s, splus, sigma)
            ops += o
            hp = h
            if 0.5 * gap > hp:
                hp = 0.5 * gap
            ops += 1
            lhs = sigma * (f[t] - _chord(x, f, s, splus, t))
            if relaxed:
                if lhs <= 2.0 * hp:
                    break
            else:
                if lhs < 2.0 * hp:
                    break
            if splus != t:
                added[na] = splus
                na += 1
            h = hp
            s = splus
            pos += 1
            tr_kind[nt] = TRACE_LEFT_ADD
            tr_s[nt] = s
            tr_t[nt] = t
            tr_add[nt] = s
            tr_h[nt] = h
            nt += 1
            if s >= t - 1:
                break

        if s == t:
            break

        # Mirror pass: pull the right piece leftwards.
        hull2, o = _hull_scan(x, f, s, t, -sigma)
        ops += o
        pos = len(hull2) - 2
        while True:
            tminus = hull2[pos]
            gap, _, o = _segment_gap(x, f, tminus, t, -sigma)
            ops += o
            hp = h
            if 0.5 * gap > hp:
                hp = 0.5 * gap
            ops += 1
            lhs = sigma * (_chord(x, f, tminus, t, s) - f[s])
            if relaxed:
                if lhs <= 2.0 * hp:
                    break
            else:
                if lhs < 2.0 * hp:
                    break
            if tminus != s:
                added[na] = tminus
                na += 1
            h = hp
            t = tminus
            pos -= 1
            tr_kind[nt] = TRACE_RIGHT_ADD
            tr_s[nt] = s
            tr_t[nt] = t
            tr_add[nt] = t
            tr_h[nt] = h
            nt += 1
            if s >= t:
                break

        # Stop once a full alternation makes no progress.
        if t - s == u:
            break
        tr_kind[nt] = TRACE_CYCLE
        tr_s[nt] = s
        tr_t[nt] = t
        tr_add[nt] = -1
        tr_h[nt] = h
        nt += 1

    return (
        s,
        t,
        h,
        added[:na],
        tr_kind[:nt],
        tr_s[:nt],
        tr_t[:nt],
        tr_add[:nt],
        tr_h[:nt],
        ops,
    )


# Pure-Python implementations, kept addressable for backend cross-checks.
PY_IMPLS = {
    "chord": _chord,
    "hull_scan": _hull_scan,
    "segment_gap": _segment_gap,
    "chain_gap": _chain_gap,
    "closejoin_pass": _closejoin_pass,
}

if BACKEND == "numba":
    from numba import njit

    chord = njit(cache=True)(_chord)
    curvature = njit(cache=True)(_curvature)
    hull_scan = njit(cache=True)(_hull_scan)
    segment_gap = njit(cache=True)(_segment_gap)
    chain_gap = njit(cache=True)(_chain_gap)
    closejoin_pass = njit(cache=True)(_closejoin_pass)

    # Compiled callers resolve helper names through module globals at first
    # compile, so the helpers must point at their compiled versions by then.
    _chord = chord
    _curvature = curvature
    _hull_scan = hull_scan
    _segment_gap = segment_gap
    _chain_gap = chain_gap
else:
    chord = _chord
    hull_scan = _hull_scan
    segment_gap = _segment_gap
    chain_gap = _chain_gap
    closejoin_pass = _closejoin_pass
