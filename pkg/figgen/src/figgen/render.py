"""Turn a FigureSpec plus its input CSV into an image and a sidecar JSON.

The sidecar holds the exact plotted arrays, so tests and reviewers can diff
figures without comparing pixels.  Rendering groups and sorts rows; it never
recomputes probabilities, errors, or timings.
"""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .spec import FigureSpec, SpecError

__all__ = ["read_table", "build_series", "build_figure", "render"]

#: Default line styles per series index; the paper does not pin plot styles.
_MARKERS = ("o", "s", "^", "d", "v", "*", "x", "+")

_DEFAULT_LABELS = {
    "s": "sparsity s",
    "n": "signal length N",
    "iteration": "iteration",
    "recovery_probability": "recovery probability",
    "mean_nmse": "mean NMSE",
    "mean_runtime_s": "mean runtime (s)",
    "energy": "energy",
}


def read_table(path: str) -> tuple[list, list]:
    """Read a CSV into (header, rows of dicts keyed by column)."""
    with open(path) as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SpecError(f"{path}: empty CSV") from None
        rows = [dict(zip(header, rec)) for rec in reader if rec]
    return header, rows


def build_series(spec: FigureSpec, header: list, rows: list) -> list:
    """Group rows into plotted series: [{label, x: [...], y: [...]}, ...]."""
    needed = [spec.x_column, spec.y_column]
    if spec.series is not None:
        needed.append(spec.series)
    missing = [c for c in needed if c not in header]
    if missing:
        raise SpecError(
            f"{spec.input}: missing column(s) {', '.join(missing)} "
            f"required for kind {spec.kind!r}"
        )
    groups: dict = {}
    for row in rows:
        label = row[spec.series] if spec.series is not None else spec.y_column
        groups.setdefault(label, []).append(
            (float(row[spec.x_column]), float(row[spec.y_column]))
        )
    series = []
    for label in sorted(groups):
        points = sorted(groups[label])
        series.append(
            {
                "label": label,
                "x": [p[0] for p in points],
                "y": [p[1] for p in points],
            }
        )
    return series


def build_figure(spec: FigureSpec, series: list):
    """Create the matplotlib figure for already-grouped series data."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i, ser in enumerate(series):
        ax.plot(
            ser["x"], ser["y"],
            marker=_MARKERS[i % len(_MARKERS)],
            markersize=4,
            label=ser["label"],
        )
    ax.set_xlabel(spec.xlabel or _DEFAULT_LABELS.get(spec.x_column, spec.x_column))
    ax.set_ylabel(spec.ylabel or _DEFAULT_LABELS.get(spec.y_column, spec.y_column))
    if spec.title:
        ax.set_title(spec.title)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    if spec.kind == "prob_vs_sparsity" and not spec.logy:
        ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> dict:
    """Render the figure and its sidecar JSON; returns the sidecar payload."""
    header, rows = read_table(spec.input)
    series = build_series(spec, header, rows)
    if not series:
        raise SpecError(f"{spec.input}: no data rows to plot")
    fig = build_figure(spec, series)
    try:
        fig.savefig(spec.output, dpi=150)
    finally:
        plt.close(fig)
    sidecar = {
        "kind": spec.kind,
        "x_column": spec.x_column,
        "y_column": spec.y_column,
        "series": series,
    }
    with open(spec.sidecar_path, "w") as f:
        json.dump(sidecar, f, indent=2, sort_keys=True)
        f.write("\n")
    return sidecar
