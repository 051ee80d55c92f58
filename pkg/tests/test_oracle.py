"""Reference oracle: pattern enumeration and exact small-n optima."""

from math import comb

import numpy as np
import pytest

from cvxcav import (
    DataSeries,
    Orientation,
    best_convex_approximation,
    consecutive_differences,
    count_sign_changes,
    enumerate_patterns,
    is_feasible,
    min_linf_for_pattern,
    oracle_solve,
)

from conftest import random_series


class TestEnumeratePatterns:
    def test_n3_q0(self):
        assert enumerate_patterns(3, 0) == ((1,),)

    def test_n4_q0(self):
        assert enumerate_patterns(4, 0) == ((1, 1),)

    def test_n5_q1_includes_leading_flip(self):
        pats = set(enumerate_patterns(5, 1))
        # Three patterns keep the opening convex; the all-flipped one
        # spends its single change before the first curvature.
        assert (1, 1, 1) in pats
        assert (1, 1, -1) in pats
        assert (1, -1, -1) in pats
        assert (-1, -1, -1) in pats
        assert len(pats) == 4

    def test_count_formula(self):
        for n in range(3, 9):
            for q in range(0, 5):
                expect = sum(comb(n - 2, c) for c in range(0, min(q, n - 2) + 1))
                assert len(enumerate_patterns(n, q)) == expect

    def test_orientation_mirrors(self):
        pats_plus = set(enumerate_patterns(6, 2, Orientation.CONVEX_FIRST))
        pats_minus = set(enumerate_patterns(6, 2, Orientation.CONCAVE_FIRST))
        assert pats_minus == {tuple(-s for s in p) for p in pats_plus}

    def test_all_patterns_respect_budget(self):
        for q in range(0, 4):
            for p in enumerate_patterns(7, q):
                assert count_sign_changes(np.asarray(p, float), 1) <= q

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            enumerate_patterns(2, 1)


class TestMinLinfForPattern:
    def test_affine_is_free(self):
        d = DataSeries([0, 1, 2, 3], [1, 2, 3, 4])
        for p in enumerate_patterns(4, 2):
            h, v = min_linf_for_pattern(d, p)
            assert h <= 1e-10

    def test_vee_under_convex_pattern(self):
        d = DataSeries([0, 1, 2], [0, 1, 0])
        h, v = min_linf_for_pattern(d, (1,))
        assert h == pytest.approx(0.5, abs=1e-10)

    def test_rejects_wrong_length(self):
        d = DataSeries([0, 1, 2], [0, 1, 0])
        with pytest.raises(ValueError):
            min_linf_for_pattern(d, (1, 1))

    def test_witness_meets_constraints(self):
        rng = np.random.default_rng(101)
        for _ in range(20):
            d = random_series(rng, int(rng.integers(3, 9)))
            for p in enumerate_patterns(d.n, 1):
                h, v = min_linf_for_pattern(d, p)
                assert np.max(np.abs(v - d.f)) <= h + 1e-8
                c = consecutive_differences(d, v)
                assert np.all(np.asarray(p) * c >= -1e-7)


class TestOracleSolve:
    def test_feasible_data(self):
        d = DataSeries([0, 1, 2, 3], [0, 1, 2, 4])
        h, v = oracle_solve(d, 0)
        assert h <= 1e-10

    def test_worked_zigzag(self):
        d = DataSeries([0, 1, 2, 3], [0, 1, 0, 1])
        h, v = oracle_solve(d, 1)
        assert h == pytest.approx(0.5, abs=1e-10)

    def test_single_pattern_case(self):
        d = DataSeries([0, 1, 2], [0, 1, 0])
        h, v = oracle_solve(d, 0)
        assert h == pytest.approx(0.5, abs=1e-10)

    def test_refuses_large_n(self):
        d = DataSeries(np.arange(13.0), np.zeros(13))
        with pytest.raises(ValueError, match="refuses"):
            oracle_solve(d, 1)

    def test_witness_is_feasible(self):
        rng = np.random.default_rng(103)
        for _ in range(40):
            d = random_series(rng, int(rng.integers(3, 11)))
            q = int(rng.integers(0, 4))
            for o in Orientation:
                h, v = oracle_solve(d, q, o)
                assert np.max(np.abs(v - d.f)) <= h + 1e-8
                assert is_feasible(d, v, q, o, tol=1e-6)

    def test_agrees_with_hull_at_q0(self):
        rng = np.random.default_rng(107)
        for _ in range(100):
            d = random_series(rng, int(rng.integers(3, 13)))
            for sigma in (1, -1):
                h_ref, _ = oracle_solve(d, 0, Orientation(sigma))
                assert best_convex_approximation(d, sigma).h == pytest.approx(
                    h_ref, abs=1e-9
                )

    def test_clustered_abscissae_agreement(self):
        # Near-duplicate abscissae give the LP rows 1/dx^2 conditioning;
        # with tight feasibility tolerances it must still match the solver.
        from cvxcav import linf_distance, solve

        rng = np.random.default_rng(4242)
        done = 0
        while done < 60:
            n = int(rng.integers(3, 10))
            base = np.sort(rng.uniform(0, 1, n))
            squeeze = rng.integers(0, n - 1)
            base[squeeze + 1] = base[squeeze] + 10.0 ** rng.uniform(-8, -3)
            x = np.sort(base)
            if np.any(np.diff(x) <= 0):
                continue
            d = DataSeries(x, rng.uniform(0, 1, n))
            q = int(rng.integers(0, 4))
            a = solve(d, q)
            h_ref, _ = oracle_solve(d, q)
            assert abs(a.h - h_ref) <= 1e-9
            assert abs(linf_distance(a.y, d.f) - a.h) <= 1e-9
            done += 1

    def test_zero_transparency_of_witnesses(self):
        # A witness riding a zero curvature must satisfy any pattern that
        # agrees with it elsewhere.
        d = DataSeries([0, 1, 2, 3], [0, 1, 2, 3])  # affine: all c == 0
        for p in enumerate_patterns(4, 2):
            h, v = min_linf_for_pattern(d, p)
            assert h <= 1e-10
            assert is_feasible(d, v, 2, tol=1e-6)
