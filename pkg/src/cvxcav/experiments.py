"""Synthetic smoothing experiments and recovery scoring.

Three built-in truth functions, sampled on equally spaced abscissae and
contaminated with uniform noise in [-epsilon, epsilon]:

    zero   0 on [-5, 5]
    sine   sin(pi x) on [-2, 2]
    peak   bell curve exp(-x^2 / (2 w^2)) / sqrt(2 pi w^2) on [-5, 5]

The peak amplitude uses the probability-density normalisation in the
width parameter w (default 0.8).  Recovery quality against the exact
values g is scored as P_p = 100 * (1 - ||y - g||_p / ||f - g||_p): 100 is
perfect recovery, 0 no smoothing at all, negative means the fit strayed
further from the truth than the noise did (common for p = inf because of
end errors).  Noise streams come from numpy's seeded PCG64 generator, so
a config reproduces its report exactly.  Independent runs are safe to
execute concurrently.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    DataSeries,
    Orientation,
    curvature_sign_changes,
    default_tolerance,
)
from .solver import solve, solve_best_orientation

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "FUNCTIONS",
    "ScoreUndefinedError",
    "generate",
    "performance_score",
    "run_experiment",
]


class ScoreUndefinedError(ValueError):
    """Raised when the recovery score's denominator vanishes (no noise)."""


def _zero(xs: np.ndarray, width: float) -> np.ndarray:
    return np.zeros_like(xs)


def _sine(xs: np.ndarray, width: float) -> np.ndarray:
    return np.sin(np.pi * xs)


def _peak(xs: np.ndarray, width: float) -> np.ndarray:
    return np.exp(-(xs**2) / (2.0 * width * width)) / math.sqrt(2.0 * math.pi * width * width)


FUNCTIONS = {
    "zero": ((-5.0, 5.0), _zero),
    "sine": ((-2.0, 2.0), _sine),
    "peak": ((-5.0, 5.0), _peak),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """One reproducible experiment run."""

    function: str
    n: int
    epsilon: float
    seed: int = 1
    q: int = 2
    orientation: str | None = None  # None: best of both orientations
    p_norms: tuple[float, ...] = (2.0, math.inf)
    peak_width: float = 0.8

    def __post_init__(self) -> None:
        if self.function not in FUNCTIONS:
            raise ValueError(
                f"unknown function {self.function!r}; choose from {sorted(FUNCTIONS)}"
            )
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.q < 0:
            raise ValueError("q must be nonnegative")


def generate(config: ExperimentConfig) -> tuple[DataSeries, np.ndarray]:
    """Noisy series and the exact values it contaminates."""
    (lo, hi), fn = FUNCTIONS[config.function]
    xs = np.linspace(lo, hi, config.n)
    g = fn(xs, config.peak_width)
    rng = np.random.default_rng(config.seed)
    noise = rng.uniform(-config.epsilon, config.epsilon, config.n) if config.epsilon > 0 else 0.0
    return DataSeries(xs, g + noise), g


def performance_score(y, g, f, p: float) -> float:
    """Recovery score 100 * (1 - ||y - g||_p / ||f - g||_p)."""
    y = np.asarray(y, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    denom = float(np.linalg.norm(f - g, ord=p))
    if denom == 0.0:
        raise ScoreUndefinedError("score undefined: the data carry no noise")
    return 100.0 * (1.0 - float(np.linalg.norm(y - g, ord=p)) / denom)


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of one experiment run.

    ``p_scores`` maps each requested norm to its score, or None when the
    score is undefined (noise-free data).  ``max_interior_error`` and
    ``max_end_error`` split max|y - g| between the middle 90% of indices
    and the outer 5% at each end.  ``runtime_seconds`` is wall time and is
    excluded from reproducibility comparisons.
    """

    config: ExperimentConfig
    h: float
    p_scores: dict[float, float | None]
    max_interior_error: float
    max_end_error: float
    orientation_used: str
    sign_changes_used: int
    truth_feasible: bool
    runtime_seconds: float

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "function": cfg.function,
            "n": cfg.n,
            "epsilon": cfg.epsilon,
            "seed": cfg.seed,
            "q": cfg.q,
            "orientation": cfg.orientation or "best",
            "peak_width": cfg.peak_width,
            "h": self.h,
            "p_scores": {_norm_label(p): v for p, v in self.p_scores.items()},
            "max_interior_error": self.max_interior_error,
            "max_end_error": self.max_end_error,
            "orientation_used": self.orientation_used,
            "sign_changes_used": self.sign_changes_used,
            "truth_feasible": self.truth_feasible,
            "runtime_seconds": self.runtime_seconds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, dict):
                for sub, v in value.items():
                    lines.append(f"P_{sub} = {_fmt(v)}")
            else:
                lines.append(f"{key} = {_fmt(value)}")
        return "\n".join(lines) + "\n"


def _norm_label(p: float) -> str:
    return "inf" if math.isinf(p) else ("%g" % p)


def _fmt(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Generate, solve, and score one experiment."""
    d, g = generate(config)
    tau = default_tolerance(d.f)
    start = time.perf_counter()
    if config.orientation is None:
        approx = solve_best_orientation(d, config.q)
    else:
        approx = solve(d, config.q, Orientation.from_name(config.orientation))
    elapsed = time.perf_counter() - start

    scores: dict[float, float | None] = {}
    for p in config.p_norms:
        try:
            scores[p] = performance_score(approx.y, g, d.f, p)
        except ScoreUndefinedError:
            scores[p] = None

    err = np.abs(approx.y - g)
    k = max(1, int(round(0.05 * config.n)))
    if config.n > 2 * k:
        interior = float(np.max(err[k : config.n - k]))
        ends = float(max(np.max(err[:k]), np.max(err[config.n - k :])))
    else:
        interior = 0.0
        ends = float(np.max(err)) if err.size else 0.0

    leading = Orientation(approx.orientation).first_piece
    truth_changes = curvature_sign_changes(d, g, leading, tau)
    truth_feasible = truth_changes <= config.q
    if truth_feasible and config.epsilon > 0:
        # The exact values are themselves admissible, so the fit can never
        # cost more than the worst contamination.
        max_noise = float(np.max(np.abs(d.f - g)))
        if approx.h > max_noise * (1.0 + 1e-9) + tau:
            raise AssertionError(
                f"price {approx.h} exceeds the noise bound {max_noise} on feasible truth"
            )

    return ExperimentReport(
        config=config,
        h=float(approx.h),
        p_scores=scores,
        max_interior_error=interior,
        max_end_error=ends,
        orientation_used=approx.orientation.name.lower().replace("_", "-"),
        sign_changes_used=approx.sign_changes_used,
        truth_feasible=truth_feasible,
        runtime_seconds=elapsed,
    )
