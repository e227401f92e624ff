"""Oracle campaigns used by both the CLI validate command and the test suite.

Each campaign pits a production routine against an independent route to the
same answer: the knapsack DP against exhaustive enumeration, the scheduling
policy against a direct search over all feasible allocations, and the update
laws against conservation identities on fuzzed states.
"""

from __future__ import annotations

import itertools

import numpy as np

from .knapsack import KnapsackInstance, KnapsackItem, solve_bruteforce, solve_dp
from .model import SlotCostVector
from .state import (NetworkState, apply_aoi_update, apply_queue_update,
                    new_allocation, slots_used, validate_allocation)
from .policies import DriftPlusPenaltyPolicy


def random_instances(n: int, rng: np.random.Generator):
    """Scheduling-shaped knapsack instances: M <= 3, Kbar <= 3, N <= 12, q <= 5.

    Downlink items get continuous values (ties have measure zero), uplink
    items are 0-1. Instances whose raw count space would break the bruteforce
    guard are resampled.
    """
    out = []
    while len(out) < n:
        M = int(rng.integers(1, 4))
        Kbar = int(rng.integers(1, 4))
        N = int(rng.integers(Kbar, 13))
        khat = int(rng.integers(1, min(N, 4) + 1))
        items = []
        space = 1
        for m in range(M):
            for k in range(1, Kbar + 1):
                q = int(rng.integers(0, 6))
                if q == 0:
                    continue
                cap = min(q, N // k)
                if cap == 0:
                    continue
                val = float(rng.uniform(-2.0, 6.0))
                items.append(KnapsackItem("downlink", m, k, val, k, cap))
                space *= cap + 1
        for m in range(M):
            if rng.random() < 0.8:
                kap = int(rng.integers(1, khat + 1))
                val = float(rng.uniform(-1.0, 8.0))
                items.append(KnapsackItem("uplink", m, None, val, kap, 1))
                space *= 2
        if space > 10_000_000:
            continue
        out.append(KnapsackInstance(tuple(items), N))
    return out


def knapsack_campaign(n: int, seed: int, dp=solve_dp, tol: float = 1e-9):
    """Compare dp against solve_bruteforce on n random instances.

    Returns (failures, n); a failure is any instance where total values differ
    by more than tol or either solution breaks feasibility.
    """
    rng = np.random.default_rng([seed, 11])
    failures = 0
    for inst in random_instances(n, rng):
        got = dp(inst.items, inst.capacity)
        want = solve_bruteforce(inst.items, inst.capacity)
        ok = abs(got.total_value - want.total_value) <= tol
        if ok:
            w = sum(c * it.weight for c, it in zip(got.counts, inst.items))
            ok = (w == got.total_weight and w <= inst.capacity
                  and all(0 <= c <= it.max_count
                          for c, it in zip(got.counts, inst.items)))
        if not ok:
            failures += 1
    return failures, n


def _enumerate_best_objective(x, Q, kappas, lam, V, V0, N):
    """Direct search over every feasible allocation; returns the best objective.

    The objective credits lam*q - V*(x+1) per served request and V*V0*x per
    upload, mirroring what the scheduling policy is supposed to maximize.
    """
    M = len(x)
    Kbar = len(Q[0])
    ranges = []
    for m in range(M):
        for k in range(1, Kbar + 1):
            ranges.append(range(min(Q[m][k - 1], N // k) + 1))
    ranges.extend(range(2) for _ in range(M))
    best = 0.0
    for combo in itertools.product(*ranges):
        used = 0
        val = 0.0
        idx = 0
        for m in range(M):
            for k in range(1, Kbar + 1):
                a = combo[idx]
                idx += 1
                if a:
                    used += k * a
                    val += a * (lam[m][k - 1] * Q[m][k - 1] - V * (x[m] + 1))
        for m in range(M):
            if combo[idx]:
                used += kappas[m]
                val += V * V0 * x[m]
            idx += 1
        if used <= N and val > best:
            best = val
    return best


def policy_objective(A, x, Q, lam, V, V0, Kbar):
    """Objective value of one allocation under the scheduling criterion."""
    val = 0.0
    for m, row in enumerate(A):
        for k in range(Kbar):
            if row[k]:
                val += row[k] * (lam[m][k] * Q[m][k] - V * (x[m] + 1))
        if row[Kbar]:
            val += V * V0 * x[m]
    return val


def dpp_campaign(n: int, seed: int):
    """Check the scheduling policy attains the enumerated optimum on small states.

    States are drawn with M <= 2, Kbar <= 2, N <= 6, q <= 4 so the direct
    search stays cheap. Returns (failures, n).
    """
    rng = np.random.default_rng([seed, 12])
    failures = 0
    for _ in range(n):
        M = int(rng.integers(1, 3))
        Kbar = int(rng.integers(1, 3))
        N = int(rng.integers(Kbar, 7))
        x = [int(v) for v in rng.integers(1, 9, size=M)]
        Q = [[int(v) for v in row] for row in rng.integers(0, 5, size=(M, Kbar))]
        kappas = [int(v) for v in rng.integers(1, min(N, 3) + 1, size=M)]
        lam = [[float(v) for v in row] for row in rng.uniform(0.05, 1.5, size=(M, Kbar))]
        V = float(rng.uniform(0.0, 2.0))
        V0 = float(rng.uniform(0.1, 3.0))
        pol = DriftPlusPenaltyPolicy(lam, V, V0, N)
        state = NetworkState(x=list(x), Q=[list(r) for r in Q], t=1)
        A = pol.decide(state, SlotCostVector(kappas, max(kappas)), None)
        if validate_allocation(A, Q, kappas, N) is not None:
            failures += 1
            continue
        got = policy_objective(A, x, Q, lam, V, V0, Kbar)
        want = _enumerate_best_objective(x, Q, kappas, lam, V, V0, N)
        if abs(got - want) > 1e-9:
            failures += 1
    return failures, n


def updatelaw_campaign(n: int, seed: int):
    """Fuzz the update laws and validator on random consistent tuples.

    Checks per tuple: queue conservation (next q = q - a + c exactly when the
    validator accepts), the age floor (ages stay >= 1, reset to 1 on upload),
    slot accounting consistency, and that validator acceptance matches a
    direct evaluation of the two feasibility constraints. Returns
    (failures, n).
    """
    rng = np.random.default_rng([seed, 13])
    failures = 0
    for _ in range(n):
        M = int(rng.integers(1, 4))
        Kbar = int(rng.integers(1, 4))
        N = int(rng.integers(1, 13))
        x = [int(v) for v in rng.integers(1, 50, size=M)]
        Q = [[int(v) for v in row] for row in rng.integers(0, 6, size=(M, Kbar))]
        c = [[int(v) for v in row] for row in rng.poisson(0.7, size=(M, Kbar))]
        kappas = [int(v) for v in rng.integers(1, 5, size=M)]
        A = new_allocation(M, Kbar)
        for m in range(M):
            for k in range(Kbar):
                # skew toward feasibility but keep violating cases in the mix
                A[m][k] = int(rng.integers(0, Q[m][k] + 2))
            A[m][Kbar] = int(rng.integers(0, 2))

        verdict = validate_allocation(A, Q, kappas, N)
        over_q = any(A[m][k] > Q[m][k] for m in range(M) for k in range(Kbar))
        used = slots_used(A, kappas)
        over_n = used > N
        if (verdict is None) != (not over_q and not over_n):
            failures += 1
            continue
        if verdict is not None:
            expect_kind = "queue_bound" if over_q else "slot_budget"
            if verdict.kind != expect_kind:
                failures += 1
                continue
            continue

        x2 = apply_aoi_update(x, A)
        q2 = apply_queue_update(Q, A, c)
        ok = all(v >= 1 for v in x2)
        for m in range(M):
            if A[m][Kbar]:
                ok = ok and x2[m] == 1
            else:
                ok = ok and x2[m] == x[m] + 1
            for k in range(Kbar):
                ok = ok and q2[m][k] == Q[m][k] - A[m][k] + c[m][k]
                ok = ok and q2[m][k] >= c[m][k]
        if not ok:
            failures += 1
    return failures, n


def run_all(seed: int = 0, knapsack_n: int = 500, dpp_n: int = 200,
            update_n: int = 100_000, dp=solve_dp):
    """All three campaigns; returns a list of (name, failures, n)."""
    results = []
    f, n = knapsack_campaign(knapsack_n, seed, dp=dp)
    results.append(("knapsack_oracle", f, n))
    f, n = dpp_campaign(dpp_n, seed)
    results.append(("policy_optimality", f, n))
    f, n = updatelaw_campaign(update_n, seed)
    results.append(("update_laws", f, n))
    return results
