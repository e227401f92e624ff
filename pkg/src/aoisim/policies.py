"""Decision policies: map (ages, backlogs, uplink costs) to a frame allocation.

All policies emit an M x (Kbar+1) integer matrix and must stay feasible
against the observed backlog and the slot budget; the simulator validates
every frame and aborts on a violation rather than repairing it.
"""

from __future__ import annotations

import math

import numpy as np

from .knapsack import KnapsackItem, solve_dp
from .state import new_allocation
from .util import ConfigError, InfeasiblePolicyError, ceil_snap


class Policy:
    """Interface shared by every scheduling policy."""

    name = "policy"

    def decide(self, state, slot_costs, rng):
        """Allocation for the current frame. Must not mutate state."""
        raise NotImplementedError

    def notify_arrivals(self, t, c):
        """Called once per frame after arrivals land; stateful policies override."""

    def params(self) -> dict:
        return {}


class StochasticPolicy(Policy):
    """Randomized fixed-layout scheduler.

    The frame is carved into one reserved worst-case refresh slot block plus
    ceil(column-sum) slot sets per bucket. Every frame one message uploads,
    chosen uniformly; each bucket-k set independently picks message m with
    probability lam[m][k-1] / ceil(col_k) (idling on the leftover mass), so
    each queue is offered service at exactly its arrival rate in expectation.
    Construction fails when the reserved layout does not fit in a frame.
    """

    name = "stochastic"

    def __init__(self, lam, N: int, khat: int):
        arr = np.asarray(lam, dtype=float)
        self.M, self.Kbar = arr.shape
        cols = arr.sum(axis=0)
        self.sets_per_k = [ceil_snap(float(c)) for c in cols]
        reserved = khat + sum((k + 1) * s for k, s in enumerate(self.sets_per_k))
        if reserved > N:
            raise InfeasiblePolicyError(
                f"fixed layout needs {reserved} slots but frames hold {N}; "
                "the arrival matrix is outside the inner region")
        self.reserved = reserved
        self.khat = khat
        self.total_sets = sum(self.sets_per_k)
        self._cum = []
        for k in range(self.Kbar):
            s = self.sets_per_k[k]
            probs = arr[:, k] / s if s > 0 else np.zeros(self.M)
            self._cum.append(np.cumsum(probs))

    def decide(self, state, slot_costs, rng):
        M, Kbar = self.M, self.Kbar
        A = new_allocation(M, Kbar)
        A[int(rng.integers(M))][Kbar] = 1
        if self.total_sets:
            u = rng.random(self.total_sets)
            Q = state.Q
            pos = 0
            for k in range(Kbar):
                s = self.sets_per_k[k]
                if not s:
                    continue
                picks = np.searchsorted(self._cum[k], u[pos:pos + s], side="right")
                pos += s
                for m in picks:
                    # tail mass above cum[-1] maps to M: the set idles
                    if m < M and A[m][k] < Q[m][k]:
                        A[m][k] += 1
        return A

    def params(self):
        return {"reserved_slots": self.reserved, "sets_per_bucket": list(self.sets_per_k)}


class DriftPlusPenaltyPolicy(Policy):
    """Per-frame exact maximizer of queue relief against age penalty.

    Serving one bucket-k request of message m is worth lam[m][k-1]*q - V*(x+1)
    at weight k; refreshing message m is worth V*V0*x[m] at its current uplink
    cost. The bounded knapsack solver picks the best feasible mix, so the
    decision is deterministic given the state.
    """

    name = "dpp"

    def __init__(self, lam, V: float, V0: float, N: int):
        arr = np.asarray(lam, dtype=float)
        if V < 0:
            raise ConfigError("V must be nonnegative")
        if V0 <= 0:
            raise ConfigError("V0 must be positive")
        self.M, self.Kbar = arr.shape
        self.lam_rows = [list(map(float, row)) for row in arr]
        self.V = float(V)
        self.V0 = float(V0)
        self.N = int(N)

    def decide(self, state, slot_costs, rng):
        N = self.N
        Kbar = self.Kbar
        V = self.V
        vv0 = V * self.V0
        x = state.x
        Q = state.Q
        items = []
        for m in range(self.M):
            penalty = V * (x[m] + 1)
            lrow = self.lam_rows[m]
            qrow = Q[m]
            for k in range(Kbar):
                q = qrow[k]
                if not q:
                    continue
                val = lrow[k] * q - penalty
                if val > 0.0:
                    w = k + 1
                    cap = N // w
                    items.append(KnapsackItem("downlink", m, k + 1, val, w,
                                              q if q < cap else cap))
            gain = vv0 * x[m]
            if gain > 0.0:
                items.append(KnapsackItem("uplink", m, None, gain, slot_costs[m], 1))
        sol = solve_dp(items, N)
        A = new_allocation(self.M, Kbar)
        for it, c in zip(items, sol.counts):
            if c:
                if it.kind == "uplink":
                    A[it.m][Kbar] = 1
                else:
                    A[it.m][it.k - 1] = c
        return A

    def params(self):
        return {"V": self.V, "V0": self.V0}


class FixedWindowPolicy(Policy):
    """Threshold refresher with strict head-of-line FCFS downlink service.

    Message m uploads whenever its age reaches its window threshold and the
    refresh fits in the remaining budget (scanned in message order). Downlink
    slots then serve the global request ledger strictly in arrival order,
    stopping at the first head request that no longer fits.
    """

    name = "fixed_window"

    def __init__(self, thresholds, M: int, Kbar: int, N: int):
        if len(thresholds) != M:
            raise ConfigError("need one window threshold per message")
        if any(int(w) != w or w < 1 for w in thresholds):
            raise ConfigError("window thresholds must be integers >= 1")
        self.w = [int(w) for w in thresholds]
        self.M = M
        self.Kbar = Kbar
        self.N = N
        self._ledger = []
        self._head = 0

    @classmethod
    def with_default_thresholds(cls, lam, M: int, Kbar: int, N: int):
        """w_m = ceil(sqrt(2M / row rate)); messages nobody requests never refresh."""
        arr = np.asarray(lam, dtype=float)
        ws = []
        for m in range(M):
            rate = float(arr[m].sum())
            if rate <= 0.0:
                ws.append(1 << 60)
            else:
                ws.append(max(1, ceil_snap(math.sqrt(2.0 * M / rate))))
        return cls(ws, M, Kbar, N)

    def decide(self, state, slot_costs, rng):
        Kbar = self.Kbar
        A = new_allocation(self.M, Kbar)
        left = self.N
        x = state.x
        for m in range(self.M):
            if x[m] >= self.w[m] and slot_costs[m] <= left:
                A[m][Kbar] = 1
                left -= slot_costs[m]
        ledger = self._ledger
        head = self._head
        end = len(ledger)
        while head < end:
            m, k = ledger[head]
            if k > left:
                break
            A[m][k - 1] += 1
            left -= k
            head += 1
        self._head = head
        if head > 4096 and head * 2 > len(ledger):
            del ledger[:head]
            self._head = 0
        return A

    def notify_arrivals(self, t, c):
        append = self._ledger.append
        for m, crow in enumerate(c):
            for k in range(self.Kbar):
                n = crow[k]
                if n:
                    pair = (m, k + 1)
                    for _ in range(n):
                        append(pair)

    def params(self):
        return {"window_thresholds": list(self.w)}


def build_policy(cfg, khat: int, V=None, V0=None) -> Policy:
    """Instantiate the policy a config names, resolving V0 = 'auto' if needed.

    V and V0 override the config when given (sweeps reuse one config across a
    V grid).
    """
    name = cfg.policy
    if name == "stochastic":
        return StochasticPolicy(cfg.lam, cfg.N, khat)
    if name == "fixed_window":
        if cfg.window_thresholds is not None:
            return FixedWindowPolicy(cfg.window_thresholds, cfg.M, cfg.Kbar, cfg.N)
        return FixedWindowPolicy.with_default_thresholds(cfg.lam, cfg.M, cfg.Kbar, cfg.N)
    if name == "dpp":
        use_v = cfg.V if V is None else float(V)
        use_v0 = cfg.V0 if V0 is None else V0
        if use_v0 == "auto":
            from .bounds import default_V0
            from .region import epsilon_of_lambda, in_subset
            if not in_subset(cfg.lam, cfg.N, khat):
                raise ConfigError(
                    "V0 'auto' needs the arrival matrix inside the inner region; "
                    "set a numeric V0 for loads beyond it")
            eps = epsilon_of_lambda(cfg.lam, cfg.N, khat)
            use_v0 = default_V0(cfg.lam, eps, cfg.M, cfg.Kbar)
        return DriftPlusPenaltyPolicy(cfg.lam, use_v, float(use_v0), cfg.N)
    raise ConfigError(f"unknown policy {name!r}")
