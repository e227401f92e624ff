"""Closed-form performance guarantees for the knapsack-driven scheduler.

The bounds trade off through the penalty weight V: the age bound tightens
toward its asymptote at rate 1/V while the backlog (hence delay) bound grows
linearly in V. All formulas work from the arrival matrix, the inner-region
slack epsilon, and the drift constant C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .region import epsilon_of_lambda
from .util import ConfigError


def poisson_second_moment(lam):
    """E[c^2] per queue for Poisson arrivals: lam + lam^2, elementwise."""
    arr = np.asarray(lam, dtype=float)
    return arr + arr * arr


def constant_C(lam, second_moments, N: int) -> float:
    """Drift constant: half the summed arrival second moments weighted by rate,
    plus half the worst single-queue service burst squared, weighted by rate."""
    arr = np.asarray(lam, dtype=float)
    sm = np.asarray(second_moments, dtype=float)
    if arr.shape != sm.shape:
        raise ValueError("second_moments must match the arrival matrix shape")
    M, Kbar = arr.shape
    burst = np.empty_like(arr)
    for k in range(Kbar):
        per_frame = N // (k + 1) if N % (k + 1) == 0 else N // (k + 1) + 1
        burst[:, k] = float(per_frame) ** 2
    return 0.5 * float((arr * sm).sum()) + 0.5 * float((arr * burst).max())


def default_V0(lam, epsilon: float, M: int, Kbar: int) -> float:
    """Auto choice of the refresh weight: M * Kbar * max(lam + epsilon)."""
    arr = np.asarray(lam, dtype=float)
    return M * Kbar * float(arr.max() + epsilon)


def aoi_upper_bound(lam, epsilon: float, M: int, Kbar: int, C: float, V: float) -> float:
    """Guaranteed ceiling on long-run average age on delivery.

    Decays like C / (V * sum(lam)) onto a V-independent asymptote.
    """
    if V <= 0:
        raise ValueError("the age bound needs V > 0")
    arr = np.asarray(lam, dtype=float)
    total = float(arr.sum())
    if total <= 0:
        raise ValueError("the age bound needs a nonzero arrival matrix")
    peak = float(arr.max() + epsilon)
    return (peak * M * M * Kbar + total + C / V) / total


def delay_upper_bound(lam, epsilon: float, M: int, Kbar: int, C: float, V: float) -> float:
    """Guaranteed ceiling on long-run average request delay, in frames.

    Grows linearly in V; at epsilon = 0 the guarantee degenerates to +inf.
    """
    if V < 0:
        raise ValueError("V must be nonnegative")
    arr = np.asarray(lam, dtype=float)
    total = float(arr.sum())
    if total <= 0:
        raise ValueError("the delay bound needs a nonzero arrival matrix")
    if epsilon <= 0:
        return math.inf
    peak = float(arr.max() + epsilon)
    padded = total + arr.size * epsilon
    return ((peak * M * M * Kbar + padded) * V + C) / (epsilon * total) + 1.0


@dataclass
class BoundReport:
    """One row of the bounds table at a fixed V."""
    V: float
    C: float
    V0: float
    epsilon: float
    aoi_bound: float
    delay_bound: float

    CSV_HEADER = "V,C,V0,epsilon,aoi_bound,delay_bound"

    def csv_row(self) -> str:
        return (f"{self.V!r},{self.C!r},{self.V0!r},{self.epsilon!r},"
                f"{self.aoi_bound!r},{self.delay_bound!r}")


def bound_report(lam, N: int, khat: int, V: float, second_moments=None) -> BoundReport:
    """Convenience bundle: epsilon, C, auto V0, and both bounds at one V."""
    arr = np.asarray(lam, dtype=float)
    M, Kbar = arr.shape
    try:
        eps = epsilon_of_lambda(arr, N, khat)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    sm = second_moments if second_moments is not None else poisson_second_moment(arr)
    C = constant_C(arr, sm, N)
    return BoundReport(
        V=float(V),
        C=C,
        V0=default_V0(arr, eps, M, Kbar),
        epsilon=eps,
        aoi_bound=aoi_upper_bound(arr, eps, M, Kbar, C, V),
        delay_bound=delay_upper_bound(arr, eps, M, Kbar, C, V),
    )
