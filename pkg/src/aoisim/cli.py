"""Command-line front end.

Subcommands: simulate (one run, one report row), sweep (load or V grids),
region (membership verdict or boundary table), bounds (guarantee table over
V), validate (oracle campaigns). Exit codes: 0 success, 1 internal error,
2 config error, 3 infeasible policy.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .bounds import (aoi_upper_bound, constant_C, default_V0, delay_upper_bound,
                     poisson_second_moment, BoundReport)
from .model import SystemConfig, current_khat, load_config
from .policies import build_policy
from .region import (RegionVerdict, epsilon_of_lambda, region_verdict)
from .simulator import REPORT_HEADER, RunConfig, run, write_trace_csv
from .util import ceil_snap, ConfigError, InfeasiblePolicyError, derived_seed, stream
from . import selfcheck


def _clone_config(cfg: SystemConfig, lam=None, V=None, policy=None) -> SystemConfig:
    return SystemConfig(
        M=cfg.M, N=cfg.N, Kbar=cfg.Kbar,
        lam=cfg.lam if lam is None else lam,
        V=cfg.V if V is None else V,
        V0=cfg.V0,
        policy=cfg.policy if policy is None else policy,
        window_thresholds=cfg.window_thresholds,
        uplink_mode=cfg.uplink_mode,
        uplink_kappa_pmf=cfg.uplink_kappa_pmf,
        lengths=cfg.lengths,
        bandwidth=cfg.bandwidth,
        slot_duration=cfg.slot_duration,
        power_sn=cfg.power_sn,
        power_bs=cfg.power_bs,
        noise_bs=cfg.noise_bs,
        noise_mu=cfg.noise_mu,
        channel_states=cfg.channel_states,
        channel_transition=cfg.channel_transition,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.policy:
        cfg = _clone_config(cfg, policy=args.policy)
    if args.V is not None:
        cfg = _clone_config(cfg, V=args.V)
    khat = current_khat(cfg)
    try:
        policy = build_policy(cfg, khat)
    except InfeasiblePolicyError:
        verdict = region_verdict(cfg.lam, cfg.N, khat)
        sys.stdout.write(RegionVerdict.CSV_HEADER + "\n" + verdict.csv_row() + "\n")
        raise
    rc = RunConfig(frames=args.frames, warmup=args.warmup, seed=args.seed,
                   trace=args.trace_out is not None)
    report = run(cfg, rc, policy)
    _emit(REPORT_HEADER + "\n" + report.csv_row() + "\n", args.out)
    if args.trace_out:
        write_trace_csv(args.trace_out, report)
    return 0


def _parse_grid(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"bad grid value in {text!r}") from exc


def _sweep_point(payload):
    cfg, frames, warmup, seed, label = payload
    khat = current_khat(cfg)
    try:
        policy = build_policy(cfg, khat)
    except (InfeasiblePolicyError, ConfigError) as exc:
        return ("skip", label, str(exc))
    rc = RunConfig(frames=frames, warmup=warmup, seed=seed, trace=False)
    return ("row", label, run(cfg, rc, policy).csv_row())


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    grid = _parse_grid(args.grid)
    if not grid:
        raise ConfigError("sweep grid is empty")
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    policies = [p.strip() for p in args.policies.split(",")] if args.policies \
        else [cfg.policy]

    if args.var == "load":
        base = stream(args.seed, "lambda").uniform(0.0, 1.0, size=(cfg.M, cfg.Kbar))
        kvec = np.arange(1, cfg.Kbar + 1, dtype=float)
        base_rate = float((base * kvec).sum())
        lams = [base * (g / base_rate) for g in grid]
        vs = [None] * len(grid)
    else:
        lams = [None] * len(grid)
        vs = list(grid)

    tasks = []
    for gi, g in enumerate(grid):
        for si in range(args.seeds):
            run_seed = derived_seed(args.seed, gi, si)
            for policy_name in policies:
                pt = _clone_config(cfg, lam=lams[gi], V=vs[gi], policy=policy_name)
                tasks.append((pt, args.frames, args.warmup, run_seed,
                              f"grid={g} seed={si} policy={policy_name}"))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]

    rows = []
    for kind, label, payload in results:
        if kind == "skip":
            sys.stderr.write(f"sweep point skipped ({label}): {payload}\n")
        else:
            rows.append(payload)
    _emit(REPORT_HEADER + "\n" + "".join(r + "\n" for r in rows), args.out)
    return 0


def cmd_region(args) -> int:
    cfg = load_config(args.config)
    khat = current_khat(cfg)
    if args.boundary:
        parts = args.boundary.split(",")
        if len(parts) != 2:
            raise ConfigError("--boundary wants two bucket indices, e.g. 1,3")
        ka, kb = (int(p) for p in parts)
        if not (1 <= ka <= cfg.Kbar and 1 <= kb <= cfg.Kbar and ka != kb):
            raise ConfigError("--boundary bucket indices must be distinct and <= Kbar")
        lines = ["lam_a,superset_b,subset_b"]
        steps = args.steps
        top = cfg.N / ka
        for i in range(steps + 1):
            la = top * i / steps
            sup = max(0.0, (cfg.N - ka * la) / kb)
            room = cfg.N - khat - ka * ceil_snap(la)
            sub = "" if room < 0 else repr(float(room // kb))
            lines.append(f"{la!r},{sup!r},{sub}")
        _emit("".join(line + "\n" for line in lines), args.out)
        return 0
    verdict = region_verdict(cfg.lam, cfg.N, khat)
    _emit(RegionVerdict.CSV_HEADER + "\n" + verdict.csv_row() + "\n", args.out)
    return 0


def cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    khat = current_khat(cfg)
    vgrid = _parse_grid(args.V_grid) if args.V_grid else [cfg.V]
    if any(v <= 0 for v in vgrid):
        raise ConfigError("bound tables need V > 0")
    try:
        eps = epsilon_of_lambda(cfg.lam, cfg.N, khat)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    C = constant_C(cfg.lam, poisson_second_moment(cfg.lam), cfg.N)
    v0 = default_V0(cfg.lam, eps, cfg.M, cfg.Kbar)
    lines = [BoundReport.CSV_HEADER]
    for v in vgrid:
        rep = BoundReport(
            V=v, C=C, V0=v0, epsilon=eps,
            aoi_bound=aoi_upper_bound(cfg.lam, eps, cfg.M, cfg.Kbar, C, v),
            delay_bound=delay_upper_bound(cfg.lam, eps, cfg.M, cfg.Kbar, C, v))
        lines.append(rep.csv_row())
    _emit("".join(line + "\n" for line in lines), args.out)
    return 0


def cmd_validate(args) -> int:
    dp = selfcheck.solve_dp
    if args.corrupt_dp:
        def dp(items, capacity):  # noqa: F811 - deliberate test hook
            sol = selfcheck.solve_dp(items, capacity)
            sol.total_value += 0.5
            return sol
    results = selfcheck.run_all(seed=args.seed, knapsack_n=args.knapsack_n,
                                dpp_n=args.dpp_n, update_n=args.update_n, dp=dp)
    bad = 0
    for name, failures, n in results:
        if failures:
            bad += 1
            print(f"{name}: FAIL ({failures}/{n} instances)")
        else:
            print(f"{name}: pass ({n} instances)")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aoisim",
        description="Frame-level scheduling simulator for a freshness-aware edge cache")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation, emit one report row")
    sim.add_argument("--config", required=True)
    sim.add_argument("--policy", default=None,
                     help="override the config policy (dpp, stochastic, fixed_window)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--frames", type=int, default=10_000)
    sim.add_argument("--warmup", type=int, default=None)
    sim.add_argument("--V", type=float, default=None, help="override the config V")
    sim.add_argument("--out", default=None, help="report CSV path (default stdout)")
    sim.add_argument("--trace-out", default=None, help="write a per-(m,k) trace CSV here")
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="grid of runs over load or V")
    sw.add_argument("--config", required=True)
    sw.add_argument("--var", choices=("load", "V"), required=True)
    sw.add_argument("--grid", required=True, help="comma-separated grid values")
    sw.add_argument("--seeds", type=int, default=1, help="seeds per grid point")
    sw.add_argument("--policies", default=None,
                    help="comma-separated policy list (default: config policy)")
    sw.add_argument("--seed", type=int, default=0, help="master seed")
    sw.add_argument("--frames", type=int, default=10_000)
    sw.add_argument("--warmup", type=int, default=None)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=cmd_sweep)

    rg = sub.add_parser("region", help="membership verdict or boundary table")
    rg.add_argument("--config", required=True)
    rg.add_argument("--boundary", default=None, metavar="KA,KB",
                    help="emit the (lam_a, lam_b) boundary table for two buckets")
    rg.add_argument("--steps", type=int, default=200)
    rg.add_argument("--out", default=None)
    rg.set_defaults(func=cmd_region)

    bd = sub.add_parser("bounds", help="guarantee table over a V grid")
    bd.add_argument("--config", required=True)
    bd.add_argument("--V-grid", dest="V_grid", default=None,
                    help="comma-separated V values (default: config V)")
    bd.add_argument("--out", default=None)
    bd.set_defaults(func=cmd_bounds)

    va = sub.add_parser("validate", help="run the oracle campaigns")
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--knapsack-n", type=int, default=500)
    va.add_argument("--dpp-n", type=int, default=200)
    va.add_argument("--update-n", type=int, default=100_000)
    va.add_argument("--corrupt-dp", action="store_true", help=argparse.SUPPRESS)
    va.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except InfeasiblePolicyError as exc:
        sys.stderr.write(f"infeasible policy: {exc}\n")
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
