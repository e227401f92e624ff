"""Exact bounded knapsack over frame slots.

The per-frame scheduling subproblem mixes count-capped items (downlink
service, one unit per request) with 0-1 items (uplink refreshes) under one
integer slot budget. Values are real and may be nonpositive; an item with
nonpositive unit value is never worth selecting.

Tie-breaking is fully deterministic: maximize value, then prefer the smaller
total weight, then the lexicographically smallest count vector in item-index
order. Both solvers honor the same order so their outputs can be compared
count-for-count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEG_INF = float("-inf")


@dataclass(frozen=True)
class KnapsackItem:
    """One selectable item.

    kind is "downlink" or "uplink"; m is the 0-based message index, k the
    1-based bucket for downlink items (None for uplink). weight is in slots,
    max_count bounds how many units may be taken.
    """
    kind: str
    m: int
    k: int | None
    unit_value: float
    weight: int
    max_count: int

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("item weight must be a positive slot count")
        if self.max_count < 0:
            raise ValueError("max_count must be nonnegative")


@dataclass(frozen=True)
class KnapsackInstance:
    items: tuple
    capacity: int


@dataclass
class KnapsackSolution:
    """counts[i] units of items[i]; totals are over the selection."""
    counts: list
    total_value: float
    total_weight: int


def solve_dp(items, capacity: int) -> KnapsackSolution:
    """Exact-weight dynamic program with deterministic traceback.

    g[j][w] holds the best value achievable with items j.. at total weight
    exactly w (-inf if w is unreachable). Scanning final weights upward with a
    strict improvement test picks the least weight among value ties, and the
    traceback takes the smallest feasible count at each item, which yields the
    lexicographically smallest optimal count vector.
    """
    if capacity < 0:
        raise ValueError("capacity must be nonnegative")
    counts = [0] * len(items)
    active = []
    for i, it in enumerate(items):
        cmax = min(it.max_count, capacity // it.weight)
        if it.unit_value > 0.0 and cmax > 0:
            active.append((i, it.unit_value, it.weight, cmax))
    if not active:
        return KnapsackSolution(counts, 0.0, 0)

    cap1 = capacity + 1
    n = len(active)
    tables = [None] * (n + 1)
    tail = [NEG_INF] * cap1
    tail[0] = 0.0
    tables[n] = tail
    for j in range(n - 1, -1, -1):
        _, v, wt, cmax = active[j]
        nxt = tables[j + 1]
        cur = nxt[:]
        for c in range(1, cmax + 1):
            add = c * v
            base = c * wt
            for w in range(base, cap1):
                cand = add + nxt[w - base]
                if cand > cur[w]:
                    cur[w] = cand
        tables[j] = cur

    row = tables[0]
    best_v = 0.0
    best_w = 0
    for w in range(cap1):
        if row[w] > best_v:
            best_v = row[w]
            best_w = w

    w = best_w
    target = best_v
    for j in range(n):
        i, v, wt, cmax = active[j]
        nxt = tables[j + 1]
        for c in range(min(cmax, w // wt) + 1):
            rem = nxt[w - c * wt]
            if rem != NEG_INF and c * v + rem == target:
                counts[i] = c
                w -= c * wt
                target = rem
                break
        else:
            raise AssertionError("knapsack traceback lost the optimum")
    return KnapsackSolution(counts, best_v, best_w)


def solve_bruteforce(items, capacity: int) -> KnapsackSolution:
    """Independent oracle: enumerate every feasible count vector.

    Vectorized breadth-first expansion one item at a time, pruning branches
    over capacity. Refuses instances whose raw count space exceeds 1e7.
    """
    if capacity < 0:
        raise ValueError("capacity must be nonnegative")
    space = 1
    for it in items:
        space *= it.max_count + 1
        if space > 10_000_000:
            raise ValueError("bruteforce count space exceeds 1e7; use solve_dp")

    weights = np.zeros(1, dtype=np.int64)
    values = np.zeros(1)
    counts = np.zeros((1, len(items)), dtype=np.int64)
    for i, it in enumerate(items):
        reps = min(it.max_count, capacity // it.weight)
        cs = np.arange(reps + 1, dtype=np.int64)
        new_w = (weights[:, None] + cs[None, :] * it.weight).ravel()
        keep = new_w <= capacity
        new_v = (values[:, None] + cs[None, :] * it.unit_value).ravel()
        new_c = np.repeat(counts, reps + 1, axis=0)
        new_c[:, i] = np.tile(cs, len(weights))
        weights = new_w[keep]
        values = new_v[keep]
        counts = new_c[keep]

    best_v = float(values.max())
    if best_v < 0.0:
        # the all-zero vector is always present, so this cannot happen
        raise AssertionError("empty selection lost")
    at_v = values == best_v
    best_w = int(weights[at_v].min())
    # expansion order is lexicographic in the count vector, so the first hit
    # is the lexicographically smallest optimum
    idx = int(np.nonzero(at_v & (weights == best_w))[0][0])
    return KnapsackSolution([int(c) for c in counts[idx]], best_v, int(weights[idx]))
