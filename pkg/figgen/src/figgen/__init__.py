"""Figure generation for the sparse phase retrieval benchmark harness."""

from .render import build_figure, build_series, read_table, render
from .spec import KINDS, FigureSpec, SpecError, load_spec

__all__ = [
    "KINDS",
    "FigureSpec",
    "SpecError",
    "load_spec",
    "read_table",
    "build_series",
    "build_figure",
    "render",
]

__version__ = "0.1.0"
