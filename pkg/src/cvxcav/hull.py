"""Optimal vertex sets, interpolants, prices, and best one-piece fits.

The vertices of the lower (sigma=+1) or upper (sigma=-1) boundary of the
convex hull of a range of the data graph determine the cheapest fully
convex or concave approximation over that range: interpolate the data
linearly between the vertices and shift the interpolant by half the
largest gap it leaves to the data.  All functions are pure and safe for
concurrent use on a shared :class:`~cvxcav.core.DataSeries`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .core import Approximation, DataSeries, FloatArray, Orientation, Sign, _check_sign

__all__ = [
    "VertexSet",
    "best_convex_approximation",
    "interpolant",
    "neighbours",
    "optimal_vertex_set",
    "price",
]


@dataclass(frozen=True)
class VertexSet:
    """Sorted hull-vertex indices over an inclusive range (0-based).

    The range endpoints always belong to the set; every interior triple of
    consecutive vertices has strictly sigma-signed curvature (collinear
    points are never vertices).
    """

    range: tuple[int, int]
    indices: tuple[int, ...]
    sigma: Sign

    def __post_init__(self) -> None:
        r, s = self.range
        idx = self.indices
        _check_sign(self.sigma)
        if not idx or idx[0] != r or idx[-1] != s:
            raise ValueError("vertex set must contain both range endpoints")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("vertex indices must be strictly ascending")
        if idx[0] < r or idx[-1] > s:
            raise ValueError("vertex indices must lie inside the range")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def validate(self, d: DataSeries) -> None:
        """Check the strict-curvature retention invariant against the data."""
        from .core import second_divided_difference

        for i, j, k in zip(self.indices, self.indices[1:], self.indices[2:]):
            c = second_divided_difference(d.f, d.x, i, j, k)
            if not self.sigma * c > 0:
                raise AssertionError(
                    f"vertex triple ({i}, {j}, {k}) has non-strict curvature {c!r}"
                )


def neighbours(j: int, vertex_set: VertexSet) -> tuple[int, int]:
    """Nearest vertex below and above index j, with endpoint extrapolation.

    Outside the range the neighbours fall back to the vertex adjacent to
    the nearer endpoint, so a two-point chord is always defined.  Raises
    when the set is a single vertex and extrapolation would be needed.
    """
    idx = vertex_set.indices
    r, s = vertex_set.range
    if j < s:
        j_plus = min(i for i in idx if i > j)
    else:
        if len(idx) < 2:
            raise ValueError("no neighbour exists in a single-vertex set")
        j_plus = idx[-2]
    if j > r:
        j_minus = max(i for i in idx if i < j)
    else:
        if len(idx) < 2:
            raise ValueError("no neighbour exists in a single-vertex set")
        j_minus = idx[1]
    return j_minus, j_plus


def interpolant(d: DataSeries, vertex_set: VertexSet, values: Sequence[float]) -> FloatArray:
    """Piecewise-linear extension of per-vertex values to the whole range.

    ``values`` supplies one ordinate per vertex index; indices between
    vertices are filled by linear interpolation along the chord between
    their neighbours.
    """
    idx = np.asarray(vertex_set.indices, dtype=np.int64)
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != idx.shape:
        raise ValueError("one value per vertex index is required")
    r, s = vertex_set.range
    xs = d.x[r : s + 1]
    return np.interp(xs, d.x[idx], vals)


def optimal_vertex_set(d: DataSeries, r: int, s: int, sigma: Sign) -> VertexSet:
    """Hull-boundary vertex indices of the data graph over [r, s] (0-based).

    sigma=+1 selects the lower boundary (convex side), sigma=-1 the upper.
    Ranges of width <= 1 are their own vertex set.  Runs in O(s - r)
    amortized curvature evaluations.
    """
    sigma = _check_sign(sigma)
    if not 0 <= r <= s < d.n:
        raise ValueError(f"need 0 <= r <= s < n, got r={r}, s={s}, n={d.n}")
    if s - r <= 1:
        return VertexSet((r, s), tuple(range(r, s + 1)), sigma)
    verts, _ = _kernels.hull_scan(d.x, d.f, r, s, sigma)
    return VertexSet((r, s), tuple(int(v) for v in verts), sigma)


def price(d: DataSeries, r: int, s: int, sigma: Sign) -> float:
    """Cost of the best convex (sigma=+1) or concave (-1) fit over [r, s].

    Half the largest gap between the data and the hull-boundary
    interpolant; zero whenever the range has at most two points.
    """
    sigma = _check_sign(sigma)
    if not 0 <= r <= s < d.n:
        raise ValueError(f"need 0 <= r <= s < n, got r={r}, s={s}, n={d.n}")
    if s - r <= 1:
        return 0.0
    verts, _ = _kernels.hull_scan(d.x, d.f, r, s, sigma)
    gap, _, _, _, _ = _kernels.chain_gap(d.x, d.f, verts, sigma)
    return 0.5 * gap


def best_convex_approximation(d: DataSeries, sigma: Sign = 1) -> Approximation:
    """Best one-piece fit: convex for sigma=+1, concave for sigma=-1.

    The smoothed vector is the hull-boundary interpolant shifted towards
    the data by the price; its max-norm distance from the data equals the
    price and its curvatures all have sign sigma (or vanish).
    """
    sigma = _check_sign(sigma)
    n = d.n
    ops = 0
    if n <= 2:
        verts = np.arange(n, dtype=np.int64)
        h = 0.0
        y = d.f.copy()
    else:
        verts, o1 = _kernels.hull_scan(d.x, d.f, 0, n - 1, sigma)
        gap, _, _, _, o2 = _kernels.chain_gap(d.x, d.f, verts, sigma)
        ops = o1 + o2
        h = 0.5 * gap
        y = np.interp(d.x, d.x[verts], d.f[verts] + sigma * h)
    from .core import curvature_sign_changes

    changes = curvature_sign_changes(d, y, sigma)
    return Approximation(
        y=y,
        h=float(h),
        pieces=((1, n),),
        joins=(),
        vertex_set=tuple(int(v) + 1 for v in verts),
        sign_changes_used=changes,
        q=0,
        orientation=Orientation(sigma),
        op_count=int(ops) + n,
        endpoint_deltas=(float(y[0] - d.f[0]), float(y[-1] - d.f[-1])),
    )
