"""Figure rendering for coalescent experiment output.

Reads the CSV files written by the simulation harness and renders two
figure kinds: per-replicate scatter panels of branch-length statistics
(``fig1``) and a single-trajectory overlay with its power-law reference
curve (``fig2``).  This package talks to the simulator only through its
CSV files; it never imports it.
"""

from .figures import FigureRequest, render, render_fig1, render_fig2
from .reader import FIG1_COLUMNS, FIG2_COLUMNS, SchemaError, load_columns

__version__ = "0.1.0"

__all__ = [
    "FIG1_COLUMNS",
    "FIG2_COLUMNS",
    "FigureRequest",
    "SchemaError",
    "load_columns",
    "render",
    "render_fig1",
    "render_fig2",
]
