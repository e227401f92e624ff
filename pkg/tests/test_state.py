import numpy as np
import pytest

from aoisim.state import (AllocationViolation, NetworkState, apply_aoi_update,
                          apply_queue_update, initial_state, new_allocation,
                          served_aoi_sum, slots_used, validate_allocation)


class TestValidator:
    def test_zero_allocation_always_ok(self):
        Q = [[3, 0], [1, 2]]
        A = new_allocation(2, 2)
        assert validate_allocation(A, Q, [1, 1], 4) is None

    def test_budget_violation(self):
        # uplink cost 2 plus one k=3 request is 5 slots in a 4-slot frame
        Q = [[0, 0, 5]]
        A = [[0, 0, 1, 1]]
        got = validate_allocation(A, Q, [2], 4)
        assert isinstance(got, AllocationViolation)
        assert got.kind == "slot_budget"
        assert "5" in got.detail and "4" in got.detail

    def test_queue_bound_violation_names_indices(self):
        Q = [[2]]
        A = [[3, 0]]
        got = validate_allocation(A, Q, [1], 10)
        assert got.kind == "queue_bound"
        assert got.m == 0 and got.k == 1

    def test_queue_bound_scanned_before_budget(self):
        # both constraints broken; row-major scan hits the queue bound first
        Q = [[1]]
        A = [[5, 1]]
        got = validate_allocation(A, Q, [9], 3)
        assert got.kind == "queue_bound"

    def test_boundary_budget_is_feasible(self):
        Q = [[4]]
        A = [[4, 1]]
        assert validate_allocation(A, Q, [2], 6) is None
        assert slots_used(A, [2]) == 6

    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError):
            validate_allocation([[0, 0]], [[0], [0]], [1, 1], 4)
        with pytest.raises(ValueError):
            validate_allocation([[0, 0, 0]], [[0]], [1], 4)

    def test_malformed_entries_raise(self):
        with pytest.raises(ValueError):
            validate_allocation([[-1, 0]], [[3]], [1], 4)
        with pytest.raises(ValueError):
            validate_allocation([[0, 2]], [[3]], [1], 4)


class TestUpdates:
    def test_aoi_reset_and_aging(self):
        assert apply_aoi_update([5, 2], [[0, 1], [0, 0]]) == [1, 3]

    def test_aoi_all_age_without_uploads(self):
        assert apply_aoi_update([1, 7, 3], [[0, 0]] * 3) == [2, 8, 4]

    def test_refresh_of_fresh_message(self):
        assert apply_aoi_update([1], [[0, 1]]) == [1]

    def test_queue_clamp_then_add(self):
        assert apply_queue_update([[3]], [[5, 0]], [[2]]) == [[2]]

    def test_queue_identity(self):
        assert apply_queue_update([[3]], [[0, 0]], [[0]]) == [[3]]

    def test_queue_pure_arrivals(self):
        assert apply_queue_update([[0]], [[0, 0]], [[7]]) == [[7]]

    def test_served_aoi_single(self):
        assert served_aoi_sum([4], [[1, 0]]) == 5.0

    def test_served_aoi_zero_allocation(self):
        assert served_aoi_sum([4, 9], new_allocation(2, 3)) == 0.0

    def test_served_aoi_mixed(self):
        A = [[2, 0, 0], [0, 1, 0]]
        assert served_aoi_sum([2, 3], A) == 2 * 3 + 1 * 4

    def test_slots_used_examples(self):
        assert slots_used(new_allocation(2, 2), [1, 1]) == 0
        assert slots_used([[0, 0, 1, 1]], [2]) == 5


class TestStateContainer:
    def test_initial_state(self):
        st = initial_state(3, 2)
        assert st.x == [1, 1, 1]
        assert st.Q == [[0, 0]] * 3
        assert st.t == 1

    def test_container_is_plain_data(self):
        st = NetworkState(x=[2], Q=[[1]], t=5)
        assert (st.x, st.Q, st.t) == ([2], [[1]], 5)


def test_fuzzed_update_invariants():
    rng = np.random.default_rng(42)
    for _ in range(3000):
        M = int(rng.integers(1, 4))
        Kbar = int(rng.integers(1, 4))
        Q = [[int(v) for v in row] for row in rng.integers(0, 8, size=(M, Kbar))]
        x = [int(v) for v in rng.integers(1, 30, size=M)]
        c = [[int(v) for v in row] for row in rng.poisson(1.0, size=(M, Kbar))]
        A = new_allocation(M, Kbar)
        for m in range(M):
            for k in range(Kbar):
                A[m][k] = int(rng.integers(0, Q[m][k] + 1))
            A[m][Kbar] = int(rng.integers(0, 2))
        x2 = apply_aoi_update(x, A)
        q2 = apply_queue_update(Q, A, c)
        for m in range(M):
            assert x2[m] >= 1
            for k in range(Kbar):
                # conservation: served requests leave, arrivals land
                assert q2[m][k] - c[m][k] + min(A[m][k], Q[m][k]) == Q[m][k]
        # determinism
        assert apply_aoi_update(x, A) == x2
        assert apply_queue_update(Q, A, c) == q2


def test_validated_allocations_fit_budget():
    rng = np.random.default_rng(43)
    for _ in range(2000):
        M = int(rng.integers(1, 4))
        Kbar = int(rng.integers(1, 4))
        N = int(rng.integers(1, 12))
        kap = [int(v) for v in rng.integers(1, 4, size=M)]
        Q = [[int(v) for v in row] for row in rng.integers(0, 5, size=(M, Kbar))]
        A = new_allocation(M, Kbar)
        for m in range(M):
            for k in range(Kbar):
                A[m][k] = int(rng.integers(0, Q[m][k] + 2))
            A[m][Kbar] = int(rng.integers(0, 2))
        if validate_allocation(A, Q, kap, N) is None:
            assert slots_used(A, kap) <= N
            assert all(A[m][k] <= Q[m][k] for m in range(M) for k in range(Kbar))
