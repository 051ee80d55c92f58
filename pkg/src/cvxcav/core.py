"""Domain types and primitives for curvature-sign-constrained smoothing.

A data set is a vector of ordinates ``f`` at strictly ascending abscissae
``x``.  The discrete curvature of three points is their second divided
difference; a vector is *feasible* for a budget ``q`` if the sequence of
consecutive curvatures, read after a leading sign that fixes the sense of
the first piece, changes sign at most ``q`` times.  Zero curvatures are
transparent: they never create or absorb a sign change.

Everything in this module is a pure function of immutable inputs and is
safe to call concurrently.  Function arguments use 0-based indices; the
:class:`Approximation` result object reports 1-based indices, matching
printed diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

FloatArray = NDArray[np.float64]

# A hull/piece sense: +1 convex, -1 concave.
Sign = Literal[1, -1]

__all__ = [
    "Approximation",
    "DataSeries",
    "Orientation",
    "Sign",
    "consecutive_differences",
    "count_sign_changes",
    "curvature_sign_changes",
    "curvature_tolerances",
    "default_tolerance",
    "is_feasible",
    "linf_distance",
    "second_divided_difference",
]


class Orientation(IntEnum):
    """Sense of the leading piece: convex-first (+1) or concave-first (-1)."""

    CONVEX_FIRST = 1
    CONCAVE_FIRST = -1

    @property
    def first_piece(self) -> int:
        return int(self)

    def flipped(self) -> "Orientation":
        return Orientation(-int(self))

    @classmethod
    def from_name(cls, name: str) -> "Orientation":
        key = name.strip().lower().replace("_", "-")
        if key in ("convex-first", "convex", "+", "+1"):
            return cls.CONVEX_FIRST
        if key in ("concave-first", "concave", "-", "-1"):
            return cls.CONCAVE_FIRST
        raise ValueError(f"unknown orientation {name!r}")


def _check_sign(sigma: int) -> int:
    if sigma not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sigma!r}")
    return int(sigma)


@dataclass(frozen=True, eq=False)
class DataSeries:
    """Ordinates ``f`` observed at strictly ascending abscissae ``x``."""

    x: FloatArray
    f: FloatArray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64)
        f = np.asarray(self.f, dtype=np.float64)
        if x.ndim != 1 or f.ndim != 1:
            raise ValueError("x and f must be one-dimensional")
        if x.size != f.size:
            raise ValueError(f"length mismatch: {x.size} abscissae, {f.size} ordinates")
        if x.size < 1:
            raise ValueError("at least one data point is required")
        if np.any(~np.isfinite(x)) or np.any(~np.isfinite(f)):
            raise ValueError("data must be finite")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            bad = int(np.flatnonzero(np.diff(x) <= 0)[0])
            raise ValueError(f"abscissae must be strictly increasing (violated at index {bad})")
        x.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)

    @property
    def n(self) -> int:
        return int(self.x.size)


def default_tolerance(f: ArrayLike) -> float:
    """Absolute tolerance for sign classification and h == 0 tests.

    Scaled to the data: 1e-12 * max(1, max|f|).
    """
    f = np.asarray(f, dtype=np.float64)
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    return 1e-12 * max(1.0, scale)


def second_divided_difference(v: ArrayLike, x: ArrayLike, i: int, j: int, k: int) -> float:
    """Second divided difference of ordinates ``v`` over indices i < j < k (0-based)."""
    v = np.asarray(v, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if not 0 <= i < j < k < len(x):
        raise ValueError(f"indices must satisfy 0 <= i < j < k < n, got ({i}, {j}, {k})")
    return float(
        ((v[k] - v[j]) / (x[k] - x[j]) - (v[j] - v[i]) / (x[j] - x[i])) / (x[k] - x[i])
    )


def consecutive_differences(d: DataSeries, v: ArrayLike | None = None) -> FloatArray:
    """Second divided differences of consecutive triples; empty when n < 3."""
    x = d.x
    v = d.f if v is None else np.asarray(v, dtype=np.float64)
    if v.shape != x.shape:
        raise ValueError("ordinate vector must match the series length")
    if x.size < 3:
        return np.empty(0, dtype=np.float64)
    xi, xj, xk = x[:-2], x[1:-1], x[2:]
    return ((v[2:] - v[1:-1]) / (xk - xj) - (v[1:-1] - v[:-2]) / (xj - xi)) / (xk - xi)


def count_sign_changes(seq: ArrayLike, leading: int, tol: float | ArrayLike = 0.0) -> int:
    """Sign alternations in (leading, seq...), treating |value| <= tol as zero.

    A zero is transparent: the sign state persists until a strictly
    opposite-signed element appears.  ``tol`` may be a per-element array.
    """
    leading = _check_sign(leading)
    seq = np.asarray(seq, dtype=np.float64)
    signs = np.where(seq > tol, 1, np.where(seq < -tol, -1, 0))
    signs = signs[signs != 0]
    if signs.size == 0:
        return 0
    full = np.concatenate(([leading], signs))
    return int(np.count_nonzero(full[1:] != full[:-1]))


def curvature_tolerances(x: ArrayLike, tau: float) -> FloatArray:
    """Per-triple zero-classification thresholds for curvature signs.

    An ordinate perturbation of size tau moves the curvature over
    (x_i, x_j, x_k) by up to 2 tau / ((x_j - x_i)(x_k - x_j)), so the one
    global knob tau must be rescaled by each triple's conditioning before
    it can classify a computed curvature as zero.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 3:
        return np.empty(0, dtype=np.float64)
    dx = np.diff(x)
    return 2.0 * tau / (dx[:-1] * dx[1:])


def curvature_sign_changes(
    d: DataSeries, v: ArrayLike, leading: int, tau: float | None = None
) -> int:
    """Sign changes of the curvature sequence of ``v`` after ``leading``."""
    if tau is None:
        tau = default_tolerance(d.f)
    return count_sign_changes(
        consecutive_differences(d, v), leading, curvature_tolerances(d.x, tau)
    )


def is_feasible(
    d: DataSeries,
    v: ArrayLike,
    q: int,
    orientation: Orientation = Orientation.CONVEX_FIRST,
    tol: float | None = None,
) -> bool:
    """True iff the curvature signs of ``v`` change at most ``q`` times.

    ``tol`` is the global ordinate-scale knob; it is applied to each
    curvature through the triple's conditioning factor.
    """
    if q < 0:
        raise ValueError("q must be nonnegative")
    changes = curvature_sign_changes(d, v, Orientation(orientation).first_piece, tol)
    return changes <= q


def linf_distance(v: ArrayLike, f: ArrayLike) -> float:
    """Chebyshev distance max_j |v_j - f_j|."""
    v = np.asarray(v, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if v.shape != f.shape:
        raise ValueError("vectors must have equal length")
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v - f)))


@dataclass(frozen=True, eq=False)
class Approximation:
    """Result of a smoothing solve.

    ``y`` is the smoothed vector and ``h`` its max-norm distance from the
    data.  All index-valued fields (``pieces``, ``joins``, ``vertex_set``,
    ``j_star``, ``certificate``) are reported 1-based.  ``pieces`` lists the
    inclusive index range of each constant-curvature-sign piece; ``joins``
    the (s, t) endpoints of the straight-line segments between consecutive
    pieces (present only when h > 0).  ``certificate`` is the index set
    whose second divided differences force every strictly closer vector to
    exceed the sign-change budget; it has between q+3 and 2q+3 elements.
    """

    y: FloatArray
    h: float
    pieces: tuple[tuple[int, int], ...]
    joins: tuple[tuple[int, int], ...]
    vertex_set: tuple[int, ...]
    sign_changes_used: int
    q: int
    orientation: Orientation
    j_star: int | None = None
    beta: int | None = None
    certificate: tuple[int, ...] | None = None
    op_count: int = 0
    endpoint_deltas: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.float64)
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    def summary(self) -> dict:
        """Flat, JSON-friendly digest of the solve (1-based indices)."""
        return {
            "h": float(self.h),
            "q": int(self.q),
            "orientation": self.orientation.name.lower().replace("_", "-"),
            "sign_changes_used": int(self.sign_changes_used),
            "pieces": [list(p) for p in self.pieces],
            "joins": [list(j) for j in self.joins],
            "vertex_set": list(self.vertex_set),
            "j_star": self.j_star,
            "beta": self.beta,
            "certificate": None if self.certificate is None else list(self.certificate),
            "certificate_size": None if self.certificate is None else len(self.certificate),
            "op_count": int(self.op_count),
            "endpoint_deltas": [float(t) for t in self.endpoint_deltas],
        }
