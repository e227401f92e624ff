"""Scheduler-visible state and the per-frame update laws.

An allocation is an M x (Kbar+1) integer matrix: columns 0..Kbar-1 carry
downlink service counts per request bucket, the last column carries 0/1
upload flags. Ages count frames since the cached copy was generated and are
never below 1; a refresh this frame makes the copy age 1 by the next frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class NetworkState:
    """Mutable container the simulator threads through the frame loop.

    Policies receive it read-only: x[m] is the age of message m, Q[m][k-1]
    the backlog of bucket-k requests for message m, t the 1-based frame index.
    """
    x: list
    Q: list
    t: int = 1


def initial_state(M: int, Kbar: int) -> NetworkState:
    """Fresh caches (age 1 everywhere) and empty queues at frame 1."""
    return NetworkState(x=[1] * M, Q=[[0] * Kbar for _ in range(M)], t=1)


def new_allocation(M: int, Kbar: int) -> list:
    """All-zero M x (Kbar+1) decision matrix."""
    return [[0] * (Kbar + 1) for _ in range(M)]


@dataclass
class AllocationViolation:
    """First in-model constraint an allocation breaks.

    kind is "queue_bound" (serving more than the backlog at some (m, k)) or
    "slot_budget" (total slot demand above the frame budget).
    """
    kind: str
    m: int | None = None
    k: int | None = None
    detail: str = ""

    def __str__(self):
        return f"{self.kind}: {self.detail}"


def validate_allocation(A, Q, slot_costs, N: int):
    """None if A is feasible against Q and the frame budget, else the first violation.

    Constraints are scanned row-major over (m, k) queue bounds first, then the
    slot budget. Malformed input (wrong shape, negative counts, non-binary
    upload flags) raises ValueError instead: that is a broken decision, not an
    in-model violation.
    """
    M = len(Q)
    Kbar = len(Q[0]) if M else 0
    if len(A) != M:
        raise ValueError(f"allocation has {len(A)} rows, expected {M}")
    used = 0
    for m in range(M):
        row = A[m]
        if len(row) != Kbar + 1:
            raise ValueError(f"allocation row {m} has {len(row)} columns, expected {Kbar + 1}")
        up = row[Kbar]
        if up != 0 and up != 1:
            raise ValueError(f"upload flag for message {m} is {up!r}, must be 0 or 1")
        qrow = Q[m]
        for k in range(Kbar):
            a = row[k]
            if a < 0 or a != int(a):
                raise ValueError(f"service count at (m={m}, k={k + 1}) is {a!r}")
            if a > qrow[k]:
                return AllocationViolation(
                    "queue_bound", m=m, k=k + 1,
                    detail=f"serving {a} of {qrow[k]} queued requests at (m={m}, k={k + 1})")
            used += (k + 1) * a
        if up:
            used += slot_costs[m]
    if used > N:
        return AllocationViolation(
            "slot_budget", detail=f"allocation uses {used} slots of a {N}-slot frame")
    return None


def slots_used(A, slot_costs) -> int:
    """Total slot demand of an allocation at the given uplink costs."""
    Kbar = len(A[0]) - 1
    used = 0
    for m, row in enumerate(A):
        for k in range(Kbar):
            used += (k + 1) * row[k]
        if row[Kbar]:
            used += slot_costs[m]
    return used


def apply_aoi_update(x, A) -> list:
    """Next-frame ages: 1 after an upload, otherwise one frame older."""
    Kbar = len(A[0]) - 1
    return [1 if A[m][Kbar] else x[m] + 1 for m in range(len(x))]


def apply_queue_update(Q, A, c) -> list:
    """Next-frame backlogs: drain served requests, then add this frame's arrivals."""
    out = []
    for m, qrow in enumerate(Q):
        arow = A[m]
        crow = c[m]
        nrow = []
        for k in range(len(qrow)):
            left = qrow[k] - arow[k]
            if left < 0:
                left = 0
            nrow.append(left + crow[k])
        out.append(nrow)
    return out


def served_aoi_sum(x, A) -> float:
    """Summed age-on-delivery over the requests served this frame.

    A request served now ships a copy that is one frame older by delivery.
    """
    Kbar = len(A[0]) - 1
    total = 0
    for m, row in enumerate(A):
        s = 0
        for k in range(Kbar):
            s += row[k]
        total += s * (x[m] + 1)
    return float(total)
