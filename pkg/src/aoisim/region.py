"""Arrival-rate geometry: necessary and sufficient load regions, slack, volumes.

The outer region only requires the mean slot demand of arrivals to fit in a
frame. The inner region is stricter: it reserves one worst-case refresh and
whole per-bucket slot sets sized by ceilinged column sums, which is what the
randomized fixed-layout policy actually needs to exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .util import ceil_snap


def _as_matrix(lam) -> np.ndarray:
    arr = np.asarray(lam, dtype=float)
    if arr.ndim != 2:
        raise ValueError("lambda must be a 2-d matrix")
    return arr


def offered_load(lam) -> float:
    """Mean slots per frame demanded by arrivals: sum of k * lam[m][k-1]."""
    arr = _as_matrix(lam)
    k = np.arange(1, arr.shape[1] + 1, dtype=float)
    return float((arr * k).sum())


def superset_slack(lam, N: int) -> float:
    return N - offered_load(lam)


def in_superset(lam, N: int) -> bool:
    return superset_slack(lam, N) >= 0.0


def subset_slack(lam, N: int, khat: int) -> int:
    """Frame slots left after one worst-case refresh plus ceilinged bucket sets."""
    arr = _as_matrix(lam)
    cols = arr.sum(axis=0)
    used = khat
    for k, c in enumerate(cols, start=1):
        used += k * ceil_snap(float(c))
    return N - used

def in_subset(lam, N: int, khat: int) -> bool:
    return subset_slack(lam, N, khat) >= 0


def solution_exists(lam, N: int, khat: int) -> bool:
    """Whether the randomized fixed-layout policy can be constructed at this load."""
    return in_subset(lam, N, khat)


def _fits(cols, M: int, N: int, khat: int, eps: float) -> bool:
    used = khat
    for k, c in enumerate(cols, start=1):
        used += k * ceil_snap(c + M * eps)
    return used <= N


def epsilon_of_lambda(lam, N: int, khat: int, tol: float = 1e-9) -> float:
    """Largest uniform per-queue rate increase that keeps lam inside the inner region.

    Bisection brackets the threshold, then the bracket is snapped to the exact
    ceiling breakpoint (column sums jump at integers, so the supremum is
    attained at one of finitely many (n - col) / M points).
    """
    arr = _as_matrix(lam)
    M = arr.shape[0]
    cols = [float(c) for c in arr.sum(axis=0)]
    if not _fits(cols, M, N, khat, 0.0):
        raise ValueError("lambda lies outside the inner region; epsilon is undefined")
    lo, hi = 0.0, 1.0
    while _fits(cols, M, N, khat, hi):
        lo = hi
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _fits(cols, M, N, khat, mid):
            lo = mid
        else:
            hi = mid
    # the supremum sits on a ceiling breakpoint (n - col_k)/M of some column
    # (or at 0); the raw bisection point may overshoot by the snap window
    cands = [0.0]
    for c in cols:
        base = c + M * lo
        for n in range(max(0, math.floor(base) - 1), math.ceil(base) + 2):
            e = (n - c) / M
            if lo - tol <= e <= hi + tol and e >= 0.0:
                cands.append(e)
    return max(e for e in cands if _fits(cols, M, N, khat, e))


@dataclass
class RegionVerdict:
    """Membership summary for one arrival matrix."""
    in_superset: bool
    in_subset: bool
    epsilon: float | None
    superset_slack: float
    subset_slack: int

    CSV_HEADER = "in_superset,in_subset,epsilon,superset_slack,subset_slack"

    def csv_row(self) -> str:
        eps = "" if self.epsilon is None else repr(self.epsilon)
        return (f"{str(self.in_superset).lower()},{str(self.in_subset).lower()},"
                f"{eps},{self.superset_slack!r},{self.subset_slack}")


def region_verdict(lam, N: int, khat: int) -> RegionVerdict:
    inner = in_subset(lam, N, khat)
    eps = epsilon_of_lambda(lam, N, khat) if inner else None
    return RegionVerdict(
        in_superset=in_superset(lam, N),
        in_subset=inner,
        epsilon=eps,
        superset_slack=superset_slack(lam, N),
        subset_slack=subset_slack(lam, N, khat),
    )


def superset_volume_analytic(M: int, Kbar: int, N: int) -> float:
    """Exact volume of the outer region: a scaled standard simplex in M*Kbar dims."""
    d = M * Kbar
    v = float(N) ** d / math.factorial(d)
    for k in range(1, Kbar + 1):
        v /= float(k) ** M
    return v


def _mc_volume(indicator, M: int, Kbar: int, N: int, samples: int, rng, parts: int):
    """Monte Carlo volume under a vectorized membership indicator.

    Sampling box: lam[m][k-1] in [0, N/k], which contains both regions. With
    parts > 1 the draw is split into independently seeded chunks whose hit
    counts add up, so a partitioned estimate is reproducible from the same
    integer seed regardless of how work is scheduled.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if parts < 1:
        raise ValueError("parts must be >= 1")
    if parts > 1 and not isinstance(rng, (int, np.integer)):
        raise ValueError("partitioned estimation needs an integer seed, not a Generator")
    dims = np.tile(N / np.arange(1.0, Kbar + 1), (M, 1))
    box = float(dims.prod())
    counts = [samples // parts + (1 if i < samples % parts else 0) for i in range(parts)]
    hits = 0
    for i, n in enumerate(counts):
        if n == 0:
            continue
        if isinstance(rng, (int, np.integer)):
            g = np.random.default_rng([int(rng), 5, i])
        else:
            g = rng
        done = 0
        while done < n:
            batch = min(n - done, 1 << 17)
            u = g.random((batch, M, Kbar)) * dims
            hits += int(indicator(u).sum())
            done += batch
    p = hits / samples
    est = box * p
    half = 1.96 * box * math.sqrt(max(p * (1.0 - p), 0.0) / samples)
    return est, half


def superset_volume_mc(M: int, Kbar: int, N: int, samples: int, rng, parts: int = 1):
    """(estimate, 95% CI half-width) for the outer region volume."""
    k = np.arange(1.0, Kbar + 1)

    def ind(u):
        return (u * k).sum(axis=(1, 2)) <= N

    return _mc_volume(ind, M, Kbar, N, samples, rng, parts)


def subset_volume_mc(M: int, Kbar: int, N: int, Khat: int, samples: int, rng,
                     parts: int = 1):
    """(estimate, 95% CI half-width) for the inner region volume."""
    kr = np.arange(1.0, Kbar + 1)

    def ind(u):
        cols = u.sum(axis=1)
        ceils = np.ceil(cols - 1e-9)
        return Khat + (ceils * kr).sum(axis=1) <= N

    return _mc_volume(ind, M, Kbar, N, samples, rng, parts)


def subset_volume_exact(M: int, Kbar: int, N: int, Khat: int) -> float:
    """Exact inner-region volume by summing over ceiling cells.

    The region is a union of boxes indexed by the integer ceiling vector of
    the column sums; each column contributes the volume of column-sum <= n_k
    minus column-sum <= n_k - 1 over M nonnegative coordinates, which is
    (n_k^M - (n_k-1)^M) / M!. Only cheap at small dimension, hence the guard.
    """
    if M * Kbar > 3:
        raise ValueError("exact enumeration is limited to M * Kbar <= 3")
    budget = N - Khat
    if budget < 0:
        return 0.0
    fact = math.factorial(M)

    def cell(n):
        return (float(n) ** M - float(n - 1) ** M) / fact

    # Column sums in (n-1, n] reserve k*n slots; an exactly-zero column has
    # measure zero, so every column effectively contributes some n_k >= 1.
    def rec(k, left):
        if k > Kbar:
            return 1.0
        total = 0.0
        n = 1
        while k * n <= left:
            total += cell(n) * rec(k + 1, left - k * n)
            n += 1
        return total

    return rec(1, budget)
