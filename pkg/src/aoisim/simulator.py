"""Frame loop and metric accounting for one simulation run.

Each frame: observe uplink costs, let the policy commit an allocation,
validate it, account served requests and slots, then age the caches, drain
and refill the queues with fresh Poisson arrivals, and advance the channel.
Averages are taken over frames past the warmup cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import DirectCostProcess, SlotCostVector, make_cost_process
from .state import NetworkState, validate_allocation
from .util import ConfigError, PolicyViolationError, stream

REPORT_HEADER = ("policy,seed,T,V,sum_arrival_rate,avg_aoi,avg_delay_formula,"
                 "avg_delay_direct,objective,slot_utility,growth_slope")

TRACE_HEADER = "t,m,k,x_m,q_mk,a_mk,c_mk,uplink_m,slots_used"

_PREGEN_CHUNK = 1 << 16


@dataclass
class RunConfig:
    """Horizon bookkeeping for one run."""
    frames: int
    warmup: int | None = None
    seed: int = 0
    trace: bool = False
    ledger: bool = True

    def resolved_warmup(self) -> int:
        w = self.frames // 10 if self.warmup is None else self.warmup
        if not 0 <= w < self.frames:
            raise ConfigError(f"warmup {w} must lie in [0, frames)")
        return w


@dataclass
class MetricsReport:
    """Post-warmup averages and diagnostics for one run."""
    policy: str
    seed: int
    frames: int
    warmup: int
    V: float
    sum_arrival_rate: float
    avg_aoi: float | None
    avg_delay_formula: float
    avg_delay_direct: float | None
    objective: float
    slot_utility: float
    growth_slope: float
    total_arrivals: int
    total_served: int
    service_rate: list
    final_q: list = field(repr=False, default_factory=list)
    trace: list | None = field(repr=False, default=None)

    def csv_row(self) -> str:
        aoi = "" if self.avg_aoi is None else repr(self.avg_aoi)
        direct = "" if self.avg_delay_direct is None else repr(self.avg_delay_direct)
        return (f"{self.policy},{self.seed},{self.frames},{self.V!r},"
                f"{self.sum_arrival_rate!r},{aoi},{self.avg_delay_formula!r},{direct},"
                f"{self.objective!r},{self.slot_utility!r},{self.growth_slope!r}")


def avg_aoi(served_age_total: float, arrivals_total: int):
    """Served age-on-delivery mass over the arrival count; absent with no arrivals."""
    if arrivals_total <= 0:
        return None
    return served_age_total / arrivals_total


def avg_delay_formula(rate_weighted_backlog_total: float, frames_counted: int,
                      rate_sum: float) -> float:
    """Rate-weighted mean backlog over the rate sum, plus one transmission frame."""
    if frames_counted <= 0:
        raise ValueError("no frames counted")
    if rate_sum <= 0.0:
        return 1.0
    return (rate_weighted_backlog_total / frames_counted) / rate_sum + 1.0


def avg_delay_direct(delay_total: int, served_total: int):
    """Mean over served requests of (departure - arrival + 1); absent if none served."""
    if served_total <= 0:
        return None
    return delay_total / served_total


def objective_value(weighted_total: float, frames_counted: int) -> float:
    """Time average of V * served-age mass plus rate-weighted backlog."""
    if frames_counted <= 0:
        raise ValueError("no frames counted")
    return weighted_total / frames_counted


def slot_utility(slots_total: int, N: int, frames_counted: int) -> float:
    """Fraction of available slots actually spent transmitting."""
    if frames_counted <= 0:
        raise ValueError("no frames counted")
    return slots_total / (N * frames_counted)


def stability_diagnostic(queue_totals) -> float:
    """Least-squares slope of total backlog over the last half of the horizon."""
    tail = np.asarray(queue_totals[len(queue_totals) // 2:], dtype=float)
    if tail.size < 2:
        return 0.0
    return float(np.polyfit(np.arange(tail.size, dtype=float), tail, 1)[0])


def run(cfg, rc: RunConfig, policy) -> MetricsReport:
    """Execute rc.frames frames of cfg under the given policy instance."""
    cfg.validate()
    M, Kbar, N = cfg.M, cfg.Kbar, cfg.N
    T = rc.frames
    if T < 1:
        raise ConfigError("frames must be >= 1")
    warmup = rc.resolved_warmup()

    rng_arrivals = stream(rc.seed, "arrivals")
    rng_channel = stream(rc.seed, "channel")
    rng_policy = stream(rc.seed, "policy")

    costs = make_cost_process(cfg)
    direct_costs = isinstance(costs, DirectCostProcess)
    lam = cfg.lam
    lam_rows = [list(map(float, row)) for row in lam]
    rate_sum = float(lam.sum())
    kvec = np.arange(1, Kbar + 1, dtype=float)
    sum_arrival_rate = float((lam * kvec).sum())
    V = cfg.V

    x = [1] * M
    Q = [[0] * Kbar for _ in range(M)]
    # the state object shares the live lists; policies see them read-only
    state = NetworkState(x=x, Q=Q, t=1)

    ledgers = [[] for _ in range(M * Kbar)] if rc.ledger else None
    heads = [0] * (M * Kbar) if rc.ledger else None

    queue_totals = []
    totals_append = queue_totals.append
    total_q = 0
    served_age_total = 0.0
    arrivals_total = 0
    backlog_weighted_total = 0.0
    objective_total = 0.0
    slots_total = 0
    delay_total = 0
    served_total = 0
    served_by_queue = [[0] * Kbar for _ in range(M)]
    trace_rows = [] if rc.trace else None

    t = 0
    while t < T:
        chunk = min(T - t, _PREGEN_CHUNK)
        c_chunk = rng_arrivals.poisson(lam, size=(chunk, M, Kbar)).tolist()
        if direct_costs:
            kap_chunk = costs.pregenerate(chunk, rng_channel)
        for i in range(chunk):
            t += 1
            state.t = t
            kap = kap_chunk[i] if direct_costs else costs.observe(rng_channel)
            sc = SlotCostVector(kap, costs.khat)
            A = policy.decide(state, sc, rng_policy)
            bad = validate_allocation(A, Q, kap, N)
            if bad is not None:
                raise PolicyViolationError(
                    f"policy {policy.name!r} at frame {t}: {bad}")
            post = t > warmup

            slots = 0
            age_mass = 0
            for m in range(M):
                row = A[m]
                served_m = 0
                for k in range(Kbar):
                    a = row[k]
                    if a:
                        served_m += a
                        slots += (k + 1) * a
                        if post:
                            served_by_queue[m][k] += a
                        if ledgers is not None:
                            li = m * Kbar + k
                            led = ledgers[li]
                            h = heads[li]
                            left = a
                            while left:
                                entry = led[h]
                                take = entry[1] if entry[1] <= left else left
                                if post:
                                    delay_total += take * (t - entry[0] + 1)
                                    served_total += take
                                left -= take
                                if take == entry[1]:
                                    h += 1
                                else:
                                    entry[1] -= take
                            if h > 512 and h * 2 > len(led):
                                del led[:h]
                                h = 0
                            heads[li] = h
                if served_m:
                    age_mass += served_m * (x[m] + 1)
                if row[Kbar]:
                    slots += kap[m]

            crow = c_chunk[i]
            arrived = 0
            if trace_rows is not None:
                for m in range(M):
                    for k in range(Kbar):
                        trace_rows.append((t, m, k + 1, x[m], Q[m][k], A[m][k],
                                           crow[m][k], A[m][Kbar], slots))

            if post:
                bw = 0.0
                for m in range(M):
                    qrow = Q[m]
                    lrow = lam_rows[m]
                    for k in range(Kbar):
                        bw += lrow[k] * qrow[k]
                served_age_total += age_mass
                backlog_weighted_total += bw
                objective_total += V * age_mass + bw
                slots_total += slots

            down_served = 0
            for m in range(M):
                row = A[m]
                if row[Kbar]:
                    x[m] = 1
                else:
                    x[m] += 1
                qrow = Q[m]
                cm = crow[m]
                for k in range(Kbar):
                    a = row[k]
                    if a:
                        down_served += a
                        left = qrow[k] - a
                        qrow[k] = (left if left > 0 else 0) + cm[k]
                    else:
                        qrow[k] += cm[k]
                    arrived += cm[k]
                if ledgers is not None:
                    base = m * Kbar
                    for k in range(Kbar):
                        n = cm[k]
                        if n:
                            ledgers[base + k].append([t, n])
            if post:
                arrivals_total += arrived
            total_q += arrived - down_served
            totals_append(total_q)
            policy.notify_arrivals(t, crow)
            if not direct_costs:
                costs.step(rng_channel)

    counted = T - warmup
    return MetricsReport(
        policy=policy.name,
        seed=rc.seed,
        frames=T,
        warmup=warmup,
        V=V,
        sum_arrival_rate=sum_arrival_rate,
        avg_aoi=avg_aoi(served_age_total, arrivals_total),
        avg_delay_formula=avg_delay_formula(backlog_weighted_total, counted, rate_sum),
        avg_delay_direct=avg_delay_direct(delay_total, served_total),
        objective=objective_value(objective_total, counted),
        slot_utility=slot_utility(slots_total, N, counted),
        growth_slope=stability_diagnostic(queue_totals),
        total_arrivals=arrivals_total,
        total_served=served_total,
        service_rate=[[served_by_queue[m][k] / counted for k in range(Kbar)]
                      for m in range(M)],
        final_q=[list(row) for row in Q],
        trace=trace_rows,
    )


def write_report_csv(path: str, reports) -> None:
    with open(path, "w") as fh:
        fh.write(REPORT_HEADER + "\n")
        for r in reports:
            fh.write(r.csv_row() + "\n")


def write_trace_csv(path: str, report: MetricsReport) -> None:
    if report.trace is None:
        raise ValueError("run was executed without trace collection")
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for row in report.trace:
            fh.write(",".join(str(v) for v in row) + "\n")
