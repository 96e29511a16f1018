"""Panel rendering from ``qvsp sweep`` CSV files.

The renderer knows three panels:

``fig2a``
    Rotation-readout magnitude versus atom velocity (km/s, log-scaled
    phase axis).
``fig2b``
    Rotation-readout magnitude versus beam width (nm, log-log), one
    curve per beam velocity with the fixed line-style convention
    dotted / dash-dot / solid for 3 / 4 / 5 km/s.
``phase-map``
    Signed rotation readout versus beam center offset (nm, linear).

Input CSVs must carry the sweep schema (``value``, ``phi_bar_rad``,
``phi_bar_omega_rad``, ``blocked_fraction``, ``err_estimate_rad``);
extra columns are ignored.  Curve velocities come from the JSON sidecar
``<csv>.json`` that ``qvsp sweep`` writes, or from an explicit entry in
the figure spec.  No physics is computed here — only unit conversion
for display (rad -> mrad, m -> nm, m/s -> km/s).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = [
    "CSV_COLUMNS",
    "CurveData",
    "FigureSpec",
    "SchemaError",
    "load_figure_spec",
    "read_sweep_csv",
    "render_fig2",
    "save_figure",
]

#: Columns every sweep CSV must provide (by name; extras are ignored).
CSV_COLUMNS = ("value", "phi_bar_rad", "phi_bar_omega_rad",
               "blocked_fraction", "err_estimate_rad")

_PANELS = ("fig2a", "fig2b", "phase-map")

#: Line-style convention for the width panel, keyed by velocity in km/s.
STYLE_BY_VELOCITY = {3.0: ":", 4.0: "-.", 5.0: "-"}
_FALLBACK_STYLE = "--"

# stable ids inside saved SVGs so that reruns are byte-identical
matplotlib.rcParams["svg.hashsalt"] = "qvsp-plots"


class SchemaError(ValueError):
    """A figure spec or input CSV violates the expected layout."""


@dataclass(frozen=True)
class CurveData:
    """One sweep curve: grid values and the rotation readout, SI units."""

    source: str
    values: tuple[float, ...]
    phi_bar_omega_rad: tuple[float, ...]
    velocity_km_per_s: float | None


@dataclass(frozen=True)
class FigureSpec:
    """Validated description of one rendered panel.

    Parameters
    ----------
    panel : {"fig2a", "fig2b", "phase-map"}
    inputs : tuple of (csv_path, velocity_km_per_s or None)
        Input CSVs in drawing order.  A velocity of None defers to the
        CSV's JSON sidecar.
    output : str
        Output image path; the renderer writes both ``.png`` and
        ``.svg`` with this stem.
    x_range, y_range : (float, float) or None
        Axis limits in display units (km/s or nm, and mrad).
    band_mrad : (float, float) or None
        Optional horizontal tolerance band, drawn shaded, in mrad.
    """

    panel: str
    inputs: tuple[tuple[str, float | None], ...]
    output: str
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    band_mrad: tuple[float, float] | None = None


def _as_range(raw, key: str) -> tuple[float, float]:
    if (not isinstance(raw, list) or len(raw) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in raw)):
        raise SchemaError(f"spec key '{key}' must be a list of 2 numbers")
    lo, hi = float(raw[0]), float(raw[1])
    if not lo < hi:
        raise SchemaError(f"spec key '{key}' must be increasing, got "
                          f"[{lo}, {hi}]")
    return lo, hi


def load_figure_spec(path: str) -> FigureSpec:
    """Read and validate a figure spec JSON file.

    Relative CSV and output paths are resolved against the current
    working directory.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read figure spec {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"figure spec {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise SchemaError("figure spec must be a JSON object")

    data = dict(data)
    panel = data.pop("panel", None)
    if panel not in _PANELS:
        raise SchemaError(f"spec key 'panel' must be one of {list(_PANELS)},"
                          f" got {panel!r}")
    raw_inputs = data.pop("inputs", None)
    if not isinstance(raw_inputs, list) or not raw_inputs:
        raise SchemaError("spec key 'inputs' must be a nonempty list")
    inputs: list[tuple[str, float | None]] = []
    for k, entry in enumerate(raw_inputs):
        if isinstance(entry, str):
            inputs.append((entry, None))
        elif isinstance(entry, dict):
            entry = dict(entry)
            csv_path = entry.pop("csv", None)
            if not isinstance(csv_path, str):
                raise SchemaError(f"spec key 'inputs[{k}].csv' must be a "
                                  "string")
            vel = entry.pop("velocity_km_per_s", None)
            if vel is not None and (isinstance(vel, bool)
                                    or not isinstance(vel, (int, float))):
                raise SchemaError(f"spec key 'inputs[{k}].velocity_km_per_s'"
                                  " must be a number")
            if entry:
                stray = sorted(entry)[0]
                raise SchemaError(f"unknown spec key 'inputs[{k}].{stray}'")
            inputs.append((csv_path, None if vel is None else float(vel)))
        else:
            raise SchemaError(f"spec key 'inputs[{k}]' must be a string or "
                              "object")
    output = data.pop("output", None)
    if not isinstance(output, str) or not output:
        raise SchemaError("spec key 'output' must be a nonempty string")
    x_range = (_as_range(data.pop("x_range"), "x_range")
               if "x_range" in data else None)
    y_range = (_as_range(data.pop("y_range"), "y_range")
               if "y_range" in data else None)
    band = (_as_range(data.pop("band_mrad"), "band_mrad")
            if "band_mrad" in data else None)
    if data:
        stray = sorted(data)[0]
        raise SchemaError(f"unknown spec key '{stray}'")
    return FigureSpec(panel=panel, inputs=tuple(inputs), output=output,
                      x_range=x_range, y_range=y_range, band_mrad=band)


def _sidecar_velocity(csv_path: Path) -> float | None:
    sidecar = Path(str(csv_path) + ".json")
    if not sidecar.exists():
        return None
    try:
        data = json.loads(sidecar.read_text(encoding="utf-8"))
        vel = data["config"]["beam"]["velocity_m_per_s"]
    except (OSError, json.JSONDecodeError, KeyError, TypeError):
        return None
    return float(vel) / 1e3


def read_sweep_csv(path: str,
                   velocity_km_per_s: float | None = None) -> CurveData:
    """Load one sweep CSV, validating the schema.

    Rows whose readout is NaN (failed sweep points) are dropped.  When
    ``velocity_km_per_s`` is None the CSV's JSON sidecar supplies the
    beam velocity, if present.

    Raises
    ------
    SchemaError
        If the file is missing, has no data rows, lacks a required
        column, or contains no finite readout values.
    """
    p = Path(path)
    if not p.exists():
        raise SchemaError(f"input CSV does not exist: {path}")
    with open(p, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in CSV_COLUMNS:
            if col not in header:
                raise SchemaError(f"missing column '{col}' in {path}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"no data rows in {path}")
    values, phis = [], []
    for row in rows:
        phi = float(row["phi_bar_omega_rad"])
        if math.isnan(phi):
            continue
        values.append(float(row["value"]))
        phis.append(phi)
    if not values:
        raise SchemaError(f"no finite readout rows in {path}")
    if velocity_km_per_s is None:
        velocity_km_per_s = _sidecar_velocity(p)
    return CurveData(source=str(path), values=tuple(values),
                     phi_bar_omega_rad=tuple(phis),
                     velocity_km_per_s=velocity_km_per_s)


def _style_for(curve: CurveData) -> tuple[str, str]:
    if curve.velocity_km_per_s is None:
        return _FALLBACK_STYLE, Path(curve.source).stem
    style = STYLE_BY_VELOCITY.get(round(curve.velocity_km_per_s, 6),
                                  _FALLBACK_STYLE)
    return style, f"v = {curve.velocity_km_per_s:g} km/s"


def render_fig2(spec: FigureSpec) -> "plt.Figure":
    """Render the requested panel and return the matplotlib figure.

    The caller owns the figure (use :func:`save_figure` to write it, and
    ``plt.close`` when done).
    """
    curves = [read_sweep_csv(path, vel) for path, vel in spec.inputs]
    fig, ax = plt.subplots(figsize=(4.8, 3.6), dpi=150)

    if spec.panel == "fig2a":
        for curve in curves:
            x = [v / 1e3 for v in curve.values]
            y = [abs(p) * 1e3 for p in curve.phi_bar_omega_rad]
            ax.plot(x, y, "-", color="tab:blue", linewidth=1.4)
        ax.set_yscale("log")
        ax.set_xlabel("atom velocity (km/s)")
        ax.set_ylabel("rotation readout magnitude (mrad)")
    elif spec.panel == "fig2b":
        for curve in curves:
            x = [v * 1e9 for v in curve.values]
            y = [abs(p) * 1e3 for p in curve.phi_bar_omega_rad]
            style, label = _style_for(curve)
            ax.plot(x, y, linestyle=style, color="black", linewidth=1.4,
                    label=label)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("beam width (nm)")
        ax.set_ylabel("rotation readout magnitude (mrad)")
        ax.legend(frameon=False, fontsize=8)
    else:  # phase-map
        for curve in curves:
            x = [v * 1e9 for v in curve.values]
            y = [p * 1e3 for p in curve.phi_bar_omega_rad]
            ax.plot(x, y, "-", color="tab:red", linewidth=1.4)
        ax.axhline(0.0, color="gray", linewidth=0.6)
        ax.set_xlabel("beam center offset (nm)")
        ax.set_ylabel("rotation readout (mrad)")

    if spec.band_mrad is not None:
        ax.axhspan(spec.band_mrad[0], spec.band_mrad[1], color="tab:green",
                   alpha=0.15, label="expected rim-spot scale")
    if spec.x_range is not None:
        ax.set_xlim(*spec.x_range)
    if spec.y_range is not None:
        ax.set_ylim(*spec.y_range)
    fig.tight_layout()
    return fig


def save_figure(fig: "plt.Figure", output: str) -> list[str]:
    """Write the figure as PNG and SVG next to each other.

    Returns the written paths.  Output bytes are deterministic for a
    given matplotlib version: SVG ids are salted and no timestamps are
    embedded.
    """
    stem = Path(output)
    if stem.suffix.lower() in (".png", ".svg"):
        stem = stem.with_suffix("")
    png = stem.with_suffix(".png")
    svg = stem.with_suffix(".svg")
    fig.savefig(png)
    fig.savefig(svg, metadata={"Date": None})
    return [str(png), str(svg)]
