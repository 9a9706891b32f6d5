"""Figure rendering from optimizer CSV logs.

Two figure kinds, both strictly offline: a trajectory plot (utility vs
cumulative wall time, log-log, one curve per estimator, a marker per
iteration) and a pareto plot (final utility vs total time, one polyline
per estimator family, points annotated with the estimator parameter).

The renderer never recomputes utilities; it draws exactly the numbers
in the files.  Output is byte-stable across invocations: the SVG hash
salt is pinned and date metadata is stripped.
"""

import csv
import json
import math
import os
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

matplotlib.rcParams["svg.hashsalt"] = "plotkit"

TRAJECTORY_COLUMNS = (
    "t", "wall_ms", "estimator", "param", "utility", "d_norm", "v_support"
)
PARETO_COLUMNS = ("estimator", "param", "utility", "total_wall_ms")

FAMILY_ORDER = {"SAMP": 0, "POLY": 1, "EXACT": 2}

# Fixed per-family palettes so figure colors do not depend on plot order.
SAMP_COLORS = ["#ff7f0e", "#d62728", "#bcbd22", "#8c564b", "#e377c2"]
POLY_COLORS = ["#1f77b4", "#17becf", "#9467bd", "#2ca02c"]
FAMILY_LINE_COLORS = {"SAMP": "#ff7f0e", "POLY": "#1f77b4", "EXACT": "#2ca02c"}


class SchemaError(ValueError):
    """A CSV or manifest does not match the documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # "trajectory" | "pareto"
    source: str  # manifest path (trajectory) or pareto CSV path
    output: str

    def __post_init__(self):
        if self.kind not in ("trajectory", "pareto"):
            raise ValueError(f"unknown figure kind {self.kind!r}")


def _check_columns(found, expected, path):
    found = tuple(found or ())
    if found != tuple(expected):
        missing = [c for c in expected if c not in found]
        extra = [c for c in found if c not in expected]
        raise SchemaError(
            f"{path}: bad columns (missing {missing or 'none'}, "
            f"unexpected {extra or 'none'}); expected {','.join(expected)}"
        )


def read_trajectory_csv(path):
    """Rows (t, wall_ms, utility-or-None) plus the estimator label."""
    rows = []
    label = None
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, TRAJECTORY_COLUMNS, path)
        for rec in reader:
            label = f"{rec['estimator']}{rec['param']}"
            utility = float(rec["utility"]) if rec["utility"] else None
            rows.append((int(rec["t"]), float(rec["wall_ms"]), utility))
    if not rows:
        raise SchemaError(f"{path}: no trajectory rows")
    return label, rows


def read_manifest(path):
    with open(path) as fh:
        manifest = json.load(fh)
    runs = manifest.get("runs")
    if not isinstance(runs, list):
        raise SchemaError(f"{path}: manifest has no runs list")
    ok_runs = [r for r in runs if r.get("status") == "ok" and r.get("csv")]
    if not ok_runs:
        raise SchemaError(f"{path}: manifest lists no successful runs")
    base = os.path.dirname(os.path.abspath(path))
    return [
        (r["estimator"], int(r["param"]), os.path.join(base, r["csv"]))
        for r in ok_runs
    ]


def read_pareto_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, PARETO_COLUMNS, path)
        for rec in reader:
            rows.append(
                (
                    rec["estimator"],
                    int(rec["param"]),
                    float(rec["utility"]),
                    float(rec["total_wall_ms"]),
                )
            )
    if not rows:
        raise SchemaError(f"{path}: no pareto rows")
    return rows


def plot_trajectory(manifest_path, output_path):
    """Utility vs wall time, log-log, marked per iteration.

    One curve per successful run in the manifest, legend ordered SAMP
    before POLY, parameters ascending.  Returns the figure.
    """
    entries = read_manifest(manifest_path)
    entries.sort(key=lambda e: (FAMILY_ORDER.get(e[0], 99), e[1]))
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    palette_pos = {}
    for estimator, param, csv_path in entries:
        label, rows = read_trajectory_csv(csv_path)
        xs, ys = [], []
        for _, wall_ms, utility in rows:
            if utility is None or utility <= 0 or wall_ms <= 0:
                continue
            xs.append(wall_ms)
            ys.append(utility)
        pos = palette_pos.setdefault(estimator, 0)
        palette_pos[estimator] += 1
        palette = SAMP_COLORS if estimator == "SAMP" else POLY_COLORS
        ax.plot(
            xs, ys,
            marker="o", markersize=2.5, linewidth=1.0,
            color=palette[pos % len(palette)],
            label=f"{estimator}{param}",
        )
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("wall time (ms)")
    ax.set_ylabel("estimated utility")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    _save(fig, output_path)
    return fig


def plot_pareto(pareto_path, output_path):
    """Final utility vs total time, one polyline per estimator family.

    Points are annotated with the estimator parameter; rows with equal
    times are jittered deterministically so markers never overlap.
    """
    rows = read_pareto_csv(pareto_path)
    rows.sort(key=lambda r: (FAMILY_ORDER.get(r[0], 99), r[1]))
    # Deterministic jitter on duplicate times (multiplicative, ordered).
    seen = {}
    jittered = []
    for estimator, param, utility, wall in rows:
        bump = seen.get(wall, 0)
        seen[wall] = bump + 1
        jittered.append(
            (estimator, param, utility, wall * (1.0 + 0.004 * bump))
        )
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    families = []
    for estimator, *_ in jittered:
        if estimator not in families:
            families.append(estimator)
    for family in families:
        pts = [r for r in jittered if r[0] == family]
        pts.sort(key=lambda r: r[3])
        xs = [r[3] for r in pts]
        ys = [r[2] for r in pts]
        color = FAMILY_LINE_COLORS.get(family, "#7f7f7f")
        ax.plot(xs, ys, marker="o", linewidth=1.2, color=color, label=family)
        for _, param, utility, wall in pts:
            ax.annotate(
                f"{family}{param}",
                (wall, utility),
                textcoords="offset points",
                xytext=(4, 4),
                fontsize=7,
                color=color,
            )
    ax.set_xscale("log")
    ax.set_xlabel("total wall time (ms)")
    ax.set_ylabel("final utility")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    _save(fig, output_path)
    return fig


def render(spec):
    if spec.kind == "trajectory":
        return plot_trajectory(spec.source, spec.output)
    return plot_pareto(spec.source, spec.output)


def _save(fig, output_path):
    ext = os.path.splitext(output_path)[1].lower()
    if ext not in (".svg", ".png"):
        raise ValueError(f"unsupported output format {ext!r} (svg or png)")
    metadata = {"Date": None} if ext == ".svg" else {}
    fig.savefig(output_path, dpi=150, metadata=metadata)
    plt.close(fig)
