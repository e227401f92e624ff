"""Render sweep and region CSVs into deterministic SVG figures.

This package consumes only the simulator's published CSV schemas; it never
imports the simulator. Output is vector-only with timestamps suppressed and a
fixed hash salt, so re-rendering the same CSV yields byte-identical files.
"""

import csv

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

plt.rcParams["svg.hashsalt"] = "aoiplots"
plt.rcParams["svg.fonttype"] = "none"

REPORT_COLUMNS = ("policy", "seed", "T", "V", "sum_arrival_rate", "avg_aoi",
                  "avg_delay_formula", "avg_delay_direct", "objective",
                  "slot_utility", "growth_slope")

BOUNDARY_COLUMNS = ("lam_a", "superset_b", "subset_b")


class SchemaError(ValueError):
    """The input CSV is empty or lacks a column the figure needs."""


def _read_rows(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header row")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _num(row, col):
    text = row[col]
    return None if text == "" else float(text)


def _series(rows, xcol, ycol):
    """Per-policy [(x, mean y over seeds)], empty y cells dropped, x sorted."""
    acc = {}
    for row in rows:
        y = _num(row, ycol)
        if y is None:
            continue
        acc.setdefault((row["policy"], float(row[xcol])), []).append(y)
    series = {}
    for policy, x in sorted(acc):
        ys = acc[(policy, x)]
        series.setdefault(policy, []).append((x, sum(ys) / len(ys)))
    if not series:
        raise SchemaError(f"column {ycol} has no usable values")
    return series


def _new_axes(xlabel, ylabel):
    fig, ax = plt.subplots(figsize=(5.4, 3.6))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def _save(fig, out_path):
    fig.savefig(out_path, format="svg", metadata={"Date": None},
                bbox_inches="tight")
    plt.close(fig)


def _line_figure(src, out_path, ycol, ylabel):
    rows = _read_rows(src, REPORT_COLUMNS)
    series = _series(rows, "sum_arrival_rate", ycol)
    fig, ax = _new_axes("sum arrival rate (slot-weighted)", ylabel)
    for policy, pts in sorted(series.items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=policy)
    ax.legend()
    _save(fig, out_path)
    return {"kind": ycol, "series": {p: len(v) for p, v in series.items()}}


def render_objective_vs_load(src, out_path):
    return _line_figure(src, out_path, "objective", "average objective")


def render_utility_vs_load(src, out_path):
    return _line_figure(src, out_path, "slot_utility", "slot utility rate")


def render_aoi_delay_vs_load(src, out_path):
    rows = _read_rows(src, REPORT_COLUMNS)
    delay = _series(rows, "sum_arrival_rate", "avg_delay_formula")
    try:
        aoi = _series(rows, "sum_arrival_rate", "avg_aoi")
    except SchemaError:
        aoi = {}
    fig, ax = _new_axes("sum arrival rate (slot-weighted)", "average age")
    ax2 = ax.twinx()
    ax2.set_ylabel("average delay (frames)")
    for policy, pts in sorted(aoi.items()):
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o",
                label=f"{policy} age")
    for policy, pts in sorted(delay.items()):
        ax2.plot([p[0] for p in pts], [p[1] for p in pts], marker="s",
                 linestyle="--", label=f"{policy} delay")
    handles = (ax.get_legend_handles_labels()[0]
               + ax2.get_legend_handles_labels()[0])
    labels = (ax.get_legend_handles_labels()[1]
              + ax2.get_legend_handles_labels()[1])
    ax.legend(handles, labels, fontsize=8)
    _save(fig, out_path)
    return {"kind": "aoi_delay",
            "series": {p: len(v) for p, v in {**aoi, **delay}.items()}}


def render_tradeoff(src, out_path):
    rows = _read_rows(src, REPORT_COLUMNS)
    # per policy: one (delay, age) point per V, seed-averaged, V ascending
    acc = {}
    for row in rows:
        age = _num(row, "avg_aoi")
        delay = _num(row, "avg_delay_formula")
        if age is None or delay is None:
            continue
        acc.setdefault((row["policy"], float(row["V"])), []).append((delay, age))
    if not acc:
        raise SchemaError("no rows carry both avg_aoi and avg_delay_formula")
    curves = {}
    for (policy, v), pts in sorted(acc.items()):
        d = sum(p[0] for p in pts) / len(pts)
        a = sum(p[1] for p in pts) / len(pts)
        curves.setdefault(policy, []).append((v, d, a))
    fig, ax = _new_axes("average delay (frames)", "average age")
    for policy, pts in sorted(curves.items()):
        ax.plot([p[1] for p in pts], [p[2] for p in pts], marker="o",
                label=policy)
        for v, d, a in pts:
            ax.annotate(f"V={v:g}", (d, a), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
    ax.legend()
    _save(fig, out_path)
    return {"kind": "tradeoff", "series": {p: len(v) for p, v in curves.items()}}


def render_region_boundary(src, out_path):
    rows = _read_rows(src, BOUNDARY_COLUMNS)
    la = [float(r["lam_a"]) for r in rows]
    sup = [float(r["superset_b"]) for r in rows]
    sub = [(float(r["lam_a"]), float(r["subset_b"])) for r in rows
           if r["subset_b"] != ""]
    fig, ax = _new_axes("arrival rate, bucket a", "arrival rate, bucket b")
    ax.plot(la, sup, label="outer boundary")
    if sub:
        ax.plot([p[0] for p in sub], [p[1] for p in sub],
                drawstyle="steps-post", linestyle="--", label="inner boundary")
    ax.legend()
    _save(fig, out_path)
    return {"kind": "region_boundary",
            "series": {"superset": len(la), "subset": len(sub)}}


KINDS = {
    "objective_vs_load": render_objective_vs_load,
    "aoi_delay_vs_load": render_aoi_delay_vs_load,
    "utility_vs_load": render_utility_vs_load,
    "tradeoff": render_tradeoff,
    "region_boundary": render_region_boundary,
}


def render(kind, src, out_path):
    """Dispatch one figure kind; returns a {series: point count} summary."""
    if kind not in KINDS:
        raise SchemaError(f"unknown figure kind {kind!r}")
    return KINDS[kind](src, out_path)
