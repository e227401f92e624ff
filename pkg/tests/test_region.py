import math

import numpy as np
import pytest

from aoisim.region import (epsilon_of_lambda, in_subset, in_superset,
                           region_verdict, solution_exists, subset_slack,
                           subset_volume_exact, subset_volume_mc,
                           superset_slack, superset_volume_analytic,
                           superset_volume_mc)


class TestMembership:
    def test_superset_zero(self):
        assert in_superset([[0.0, 0.0]], 4)

    def test_superset_boundary_equality(self):
        assert in_superset([[2.0, 1.0, 2.0]], 10)

    def test_superset_just_outside(self):
        assert not in_superset([[2.0, 1.0, 2.1]], 10)

    def test_subset_worked_example(self):
        # one reserved refresh slot + 2*ceil(2)=4 + 3*ceil(1)=3 is 8 of 10
        lam = [[0.0, 2.0, 1.0]]
        assert in_subset(lam, 10, 1)
        assert subset_slack(lam, 10, 1) == 2

    def test_subset_zero_needs_room_for_refresh(self):
        assert in_subset([[0.0]], 1, 1)
        assert not in_subset([[0.0]], 1, 2)

    def test_subset_tight_single_queue(self):
        assert not in_subset([[0.5]], 1, 1)

    def test_solution_exists_is_subset_membership(self):
        lam = [[0.0, 2.0, 1.0]]
        assert solution_exists(lam, 10, 1) == in_subset(lam, 10, 1)
        assert not solution_exists([[0.5]], 1, 1)

    def test_subset_implies_superset_on_random_draws(self):
        rng = np.random.default_rng(1)
        hits = 0
        for _ in range(10 ** 4):
            M = int(rng.integers(1, 4))
            Kbar = int(rng.integers(1, 4))
            N = int(rng.integers(Kbar, 15))
            khat = int(rng.integers(1, 4))
            lam = rng.uniform(0, 2.0 / M, size=(M, Kbar))
            if in_subset(lam, N, khat):
                hits += 1
                assert in_superset(lam, N)
        assert hits > 100  # the draw box actually exercises the subset

    def test_membership_monotone(self):
        rng = np.random.default_rng(2)
        for _ in range(300):
            lam = rng.uniform(0, 1.0, size=(2, 2))
            N = int(rng.integers(2, 12))
            khat = int(rng.integers(1, 3))
            bigger = lam.copy()
            bigger[0, 0] += rng.uniform(0, 1)
            if not in_superset(lam, N):
                assert not in_superset(bigger, N)
            if not in_subset(lam, N, khat):
                assert not in_subset(bigger, N, khat)
            assert in_superset(lam, N) <= in_superset(lam, N + 1)
            assert in_subset(lam, N, khat) <= in_subset(lam, N + 1, khat)


class TestEpsilon:
    def test_two_bucket_example(self):
        assert epsilon_of_lambda([[1.0, 1.0]], 10, 1) == 2.0

    def test_boundary_has_no_slack(self):
        # 1 + 1*ceil(2) + 2*ceil(3) = 9 = N with integral column sums
        assert epsilon_of_lambda([[2.0, 3.0]], 9, 1) == 0.0

    def test_zero_matrix(self):
        assert epsilon_of_lambda([[0.0]], 3, 1) == 2.0

    def test_outside_domain_raises(self):
        with pytest.raises(ValueError):
            epsilon_of_lambda([[0.5]], 1, 1)

    def test_consistency_with_membership(self):
        rng = np.random.default_rng(3)
        tol = 1e-9
        checked = 0
        while checked < 200:
            M = int(rng.integers(1, 4))
            Kbar = int(rng.integers(1, 4))
            N = int(rng.integers(Kbar + 1, 16))
            khat = int(rng.integers(1, 4))
            lam = rng.uniform(0, 1.2 / M, size=(M, Kbar))
            if not in_subset(lam, N, khat):
                continue
            checked += 1
            eps = epsilon_of_lambda(lam, N, khat, tol=tol)
            assert eps >= 0
            assert in_subset(lam + eps, N, khat)
            assert not in_subset(lam + eps + 10 * tol, N, khat)

    def test_matches_grid_search_breakpoint(self):
        # independent oracle: refine a coarse grid, then snap to the ceiling
        # breakpoints (n - col_k)/M like the production search does
        rng = np.random.default_rng(4)
        done = 0
        while done < 60:
            M = int(rng.integers(1, 3))
            Kbar = int(rng.integers(1, 4))
            N = int(rng.integers(Kbar + 1, 14))
            khat = int(rng.integers(1, 3))
            lam = rng.uniform(0, 1.0 / M, size=(M, Kbar))
            if not in_subset(lam, N, khat):
                continue
            done += 1
            lo, hi = 0.0, float(N)
            for _ in range(8):
                grid = np.linspace(lo, hi, 101)
                ok = [e for e in grid if in_subset(lam + e, N, khat)]
                lo = max(ok)
                hi = min([e for e in grid if e > lo], default=lo + 1e-12)
            cols = lam.sum(axis=0)
            cands = [0.0]
            for c in cols:
                n = math.floor(c + M * lo + 0.5)
                for nn in (n - 1, n, n + 1):
                    e = (nn - c) / M
                    if 0 <= e <= hi + 1e-6 and in_subset(lam + e, N, khat):
                        cands.append(e)
            want = max(cands)
            got = epsilon_of_lambda(lam, N, khat)
            assert got == want


class TestVolumes:
    def test_analytic_line(self):
        assert superset_volume_analytic(1, 1, 5) == 5.0

    def test_analytic_weighted_simplex(self):
        assert superset_volume_analytic(1, 2, 4) == 4.0

    def test_analytic_triangle(self):
        assert superset_volume_analytic(2, 1, 3) == 4.5

    def test_mc_matches_analytic(self):
        for (M, Kbar) in [(1, 2), (2, 1)]:
            est, half = superset_volume_mc(M, Kbar, 6, samples=200_000, rng=17)
            want = superset_volume_analytic(M, Kbar, 6)
            assert abs(est - want) < 3 * half

    def test_subset_empty_when_refresh_cannot_fit(self):
        est, half = subset_volume_mc(1, 1, 3, Khat=5, samples=10_000, rng=0)
        assert est == 0.0 and half == 0.0

    def test_subset_interval_example(self):
        # {lam: ceil(lam) <= 2} is [0, 2]
        est, half = subset_volume_mc(1, 1, 3, Khat=1, samples=10 ** 6, rng=5)
        assert abs(est - 2.0) < 3 * half

    def test_subset_exact_interval(self):
        assert subset_volume_exact(1, 1, 3, 1) == 2.0

    def test_subset_exact_matches_mc(self):
        want = subset_volume_exact(1, 2, 7, 2)
        est, half = subset_volume_mc(1, 2, 7, 2, samples=400_000, rng=8)
        assert abs(est - want) < 3 * half

    def test_subset_exact_dimension_guard(self):
        with pytest.raises(ValueError):
            subset_volume_exact(2, 2, 8, 1)

    def test_partitioned_estimate_reproducible(self):
        a = subset_volume_mc(1, 2, 6, 1, samples=50_000, rng=9, parts=4)
        b = subset_volume_mc(1, 2, 6, 1, samples=50_000, rng=9, parts=4)
        assert a == b

    def test_partition_needs_integer_seed(self):
        with pytest.raises(ValueError):
            superset_volume_mc(1, 1, 4, samples=1000,
                               rng=np.random.default_rng(0), parts=2)

    def test_ratio_rises_with_budget(self):
        ratios = []
        for N in (10, 40, 160):
            exact = subset_volume_exact(1, 2, N, 1)
            ratios.append(exact / superset_volume_analytic(1, 2, N))
        assert ratios[0] < ratios[1] < ratios[2]


class TestVerdict:
    def test_verdict_inside(self):
        v = region_verdict([[1.0, 1.0]], 10, 1)
        assert v.in_superset and v.in_subset
        assert v.epsilon == 2.0
        assert v.superset_slack == 7.0
        assert v.subset_slack == 6
        row = v.csv_row()
        assert row.startswith("true,true,")

    def test_verdict_outside_subset_has_no_epsilon(self):
        v = region_verdict([[0.5]], 1, 1)
        assert v.in_superset and not v.in_subset
        assert v.epsilon is None
        assert ",," in v.csv_row()
