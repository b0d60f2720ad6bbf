"""Figure specifications: which CSV to plot, how, and where to write it.

Specs are TOML files, e.g.::

    kind = "prob_vs_sparsity"
    input = "figures/prob_vs_sparsity.csv"
    output = "fig4.png"
    series = "method"
    xlabel = "sparsity s"
    title = "Recovery probability versus sparsity"
    logy = false
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["KINDS", "FigureSpec", "SpecError", "load_spec"]


class SpecError(ValueError):
    """Invalid or incomplete figure specification."""


#: kind -> (x column, y column, default series column or None)
KINDS = {
    "prob_vs_sparsity": ("s", "recovery_probability", "method"),
    "nmse_vs_sparsity": ("s", "mean_nmse", "method"),
    "time_vs_sparsity": ("s", "mean_runtime_s", "method"),
    "time_vs_length": ("n", "mean_runtime_s", "method"),
    "energy_trace": ("iteration", "energy", None),
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input: str
    output: str
    series: str | None = None  # column that labels one plotted line
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logx: bool = False
    logy: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(
                f"kind: {self.kind!r} is not one of {sorted(KINDS)}"
            )
        if not self.input:
            raise SpecError("input: a CSV path is required")
        if not self.output:
            raise SpecError("output: an image path is required")
        if self.series is None:
            object.__setattr__(self, "series", KINDS[self.kind][2])

    @property
    def x_column(self) -> str:
        return KINDS[self.kind][0]

    @property
    def y_column(self) -> str:
        return KINDS[self.kind][1]

    @property
    def sidecar_path(self) -> str:
        return self.output + ".json"


def load_spec(path: str) -> FigureSpec:
    """Parse a TOML spec file; relative data paths resolve against the file."""
    with open(path, "rb") as f:
        raw = tomllib.load(f)
    allowed = {"kind", "input", "output", "series", "title", "xlabel", "ylabel",
               "logx", "logy"}
    unknown = set(raw) - allowed
    if unknown:
        raise SpecError(f"unknown spec keys: {', '.join(sorted(unknown))}")
    for key in ("kind", "input", "output"):
        if key not in raw:
            raise SpecError(f"{key}: required")
    base = os.path.dirname(os.path.abspath(path))
    for key in ("input", "output"):
        if not os.path.isabs(raw[key]):
            raw[key] = os.path.join(base, raw[key])
    return FigureSpec(**raw)
