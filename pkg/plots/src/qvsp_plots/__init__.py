"""Figure rendering for qvsp sweep outputs.

This package consumes only the CSV files (and their JSON sidecars)
written by ``qvsp sweep``; it never computes physics itself.  All unit
conversion for display (rad -> mrad, m -> nm, m/s -> km/s) happens here.
"""

from .figures import (
    CSV_COLUMNS,
    CurveData,
    FigureSpec,
    SchemaError,
    load_figure_spec,
    read_sweep_csv,
    render_fig2,
    save_figure,
)

__all__ = [
    "CSV_COLUMNS",
    "CurveData",
    "FigureSpec",
    "SchemaError",
    "load_figure_spec",
    "read_sweep_csv",
    "render_fig2",
    "save_figure",
    "__version__",
]

__version__ = "0.1.0"
