import numpy as np
import pytest

from aoisim.knapsack import (KnapsackItem, KnapsackSolution, solve_bruteforce,
                             solve_dp)
from aoisim.selfcheck import knapsack_campaign, random_instances


def item(v, w, cap, kind="downlink", m=0, k=1):
    return KnapsackItem(kind, m, k, v, w, cap)


BOTH = [solve_dp, solve_bruteforce]


@pytest.mark.parametrize("solver", BOTH)
class TestWorkedExamples:
    def test_nothing_positive_gives_zero(self, solver):
        items = [item(-1.0, 1, 3), item(0.0, 2, 2)]
        sol = solver(items, 8)
        assert sol.counts == [0, 0]
        assert sol.total_value == 0.0
        assert sol.total_weight == 0

    def test_mixed_instance(self, solver):
        items = [item(4.0, 2, 2), item(1.5, 1, 3),
                 item(3.0, 2, 1, kind="uplink", k=None)]
        sol = solver(items, 5)
        assert sol.counts == [2, 1, 0]
        assert sol.total_value == 9.5
        assert sol.total_weight == 5

    def test_single_uplink_fills_whole_frame(self, solver):
        items = [item(0.1, 4, 1, kind="uplink", k=None)]
        sol = solver(items, 4)
        assert sol.counts == [1]
        assert sol.total_value == 0.1

    def test_empty_items(self, solver):
        sol = solver([], 5)
        assert sol.counts == [] and sol.total_value == 0.0

    def test_zero_capacity(self, solver):
        sol = solver([item(5.0, 1, 3)], 0)
        assert sol.counts == [0] and sol.total_value == 0.0

    def test_negative_capacity_rejected(self, solver):
        with pytest.raises(ValueError):
            solver([item(1.0, 1, 1)], -1)

    def test_value_tie_prefers_lighter_selection(self, solver):
        # both singletons are worth 2.0; the weight-1 one must win
        items = [item(2.0, 3, 1), item(2.0, 1, 1)]
        sol = solver(items, 3)
        assert sol.counts == [0, 1]
        assert sol.total_weight == 1

    def test_full_tie_prefers_lexicographically_smallest(self, solver):
        # (2,0) and (0,1) both give value 2.0 at weight 4; (0,1) is lex-smaller
        items = [item(1.0, 2, 3), item(2.0, 4, 1)]
        sol = solver(items, 4)
        assert sol.counts == [0, 1]


def test_dp_handles_large_count_spaces():
    # far beyond the bruteforce guard: 20 items with caps of 50
    items = [item(1.0 + 0.01 * i, 1 + i % 3, 50, m=i) for i in range(20)]
    sol = solve_dp(items, 30)
    assert sol.total_weight <= 30
    assert sol.total_value > 0


def test_bruteforce_guard_refuses_huge_spaces():
    items = [item(1.0, 1, 9) for _ in range(9)]
    with pytest.raises(ValueError):
        solve_bruteforce(items, 9)


def test_monotone_in_capacity():
    rng = np.random.default_rng(12)
    for _ in range(50):
        items = [item(float(rng.uniform(-1, 4)), int(rng.integers(1, 4)),
                      int(rng.integers(0, 4)), m=i) for i in range(4)]
        prev = -1.0
        for cap in range(0, 10):
            val = solve_dp(items, cap).total_value
            assert val >= prev
            prev = val


def test_solution_totals_recompute():
    rng = np.random.default_rng(13)
    for inst in random_instances(40, rng):
        sol = solve_dp(inst.items, inst.capacity)
        value = sum(c * it.unit_value for c, it in zip(sol.counts, inst.items))
        weight = sum(c * it.weight for c, it in zip(sol.counts, inst.items))
        assert abs(value - sol.total_value) < 1e-12
        assert weight == sol.total_weight
        assert weight <= inst.capacity
        assert all(0 <= c <= it.max_count for c, it in zip(sol.counts, inst.items))


def test_determinism_identical_instances():
    rng = np.random.default_rng(14)
    for inst in random_instances(10, rng):
        a = solve_dp(inst.items, inst.capacity)
        b = solve_dp(inst.items, inst.capacity)
        assert a.counts == b.counts
        assert a.total_value == b.total_value


def test_oracle_campaign_small():
    failures, n = knapsack_campaign(100, seed=77)
    assert failures == 0 and n == 100


def test_generic_item_campaign():
    # module-level sweep: weights <= 4, counts <= 5, capacity <= 12
    rng = np.random.default_rng(15)
    for _ in range(500):
        n_items = int(rng.integers(1, 7))
        cap = int(rng.integers(0, 13))
        items = [item(float(rng.uniform(-2, 5)), int(rng.integers(1, 5)),
                      int(rng.integers(0, 6)), m=i) for i in range(n_items)]
        a = solve_dp(items, cap)
        b = solve_bruteforce(items, cap)
        assert abs(a.total_value - b.total_value) <= 1e-9
