"""Configuration-driven command line: single-point phases, sweeps,
material optimization, and the invariant self-test battery.

Experiment definitions live in JSON files whose keys carry explicit SI
unit suffixes (``radius_m``, ``omega_rad_per_s``, ...), so a value can
never be mistaken for nm or GHz.  Unknown keys are rejected with the
full key path.  Sweeps are written as CSV (17 significant digits, UTF-8,
LF endings) with a JSON sidecar recording the exact configuration.

Exit codes: 0 success, 1 self-test failure, 2 configuration error,
3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path as FilePath

import numpy as np

from . import __version__
from .errors import ConfigError, QvspError
from .greens import RotationSpec
from .interferometer import (
    GaussianBeam,
    SweepSpec,
    averaged_phase,
    resolve_workers,
    sweep,
)
from .materials import (
    CONSTANTS,
    K_DRUDE,
    NA_ATOM,
    AtomSpecies,
    DrudeMaterial,
    NanosphereScatterer,
    optimize_plasma_frequency,
    sphere_polarizability,
    temperature_factor,
)
from .phases import (
    Path,
    PhaseBreakdown,
    qvsp_circle_closed,
    qvsp_local_numeric,
    qvsp_nonlocal_lines_closed,
    qvsp_retardation,
    qvsp_retardation_line_closed,
    qvsp_segment_closed,
    sagnac_length,
    vdw_phase_quasistatic,
)
from .selftest import run_battery

__all__ = [
    "ExperimentConfig",
    "GeometrySection",
    "SweepSection",
    "QuadratureSection",
    "OptimizeSection",
    "CSV_HEADER",
    "cmd_phase",
    "cmd_sweep",
    "cmd_optimize_material",
    "cmd_selftest",
    "main",
]

#: Sweep CSV columns.  The first five are frozen by the output contract;
#: ``error`` holds the exception text of failed (NaN) rows and stays
#: empty otherwise.
CSV_HEADER = ("value", "phi_bar_rad", "phi_bar_omega_rad",
              "blocked_fraction", "err_estimate_rad", "error")

_ATOM_PRESETS = {"Na": NA_ATOM}
_MATERIAL_PRESETS = {"K-drude": K_DRUDE}
_GEOMETRY_KINDS = ("circle", "segment", "two-lines", "beam")


class _Section:
    """Strict reader over one JSON object: every key must be consumed."""

    def __init__(self, data, path: str):
        if not isinstance(data, dict):
            raise ConfigError(f"config section '{path}' must be a JSON "
                              f"object, got {type(data).__name__}")
        self._d = dict(data)
        self.path = path

    def has(self, key: str) -> bool:
        return key in self._d

    def take(self, key: str, required: bool = False, default=None):
        if key not in self._d:
            if required:
                raise ConfigError(f"missing required config key "
                                  f"'{self._key(key)}'")
            return default
        return self._d.pop(key)

    def take_number(self, key: str, required: bool = False, default=None,
                    positive: bool = False, nonnegative: bool = False):
        raw = self.take(key, required=required, default=None)
        if raw is None:
            return default
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"config key '{self._key(key)}' must be a "
                              f"number, got {raw!r}")
        val = float(raw)
        if positive and not val > 0:
            raise ConfigError(f"config key '{self._key(key)}' must be "
                              f"positive, got {val}")
        if nonnegative and val < 0:
            raise ConfigError(f"config key '{self._key(key)}' must be "
                              f"non-negative, got {val}")
        return val

    def take_int(self, key: str, required: bool = False, default=None,
                 minimum: int | None = None):
        raw = self.take(key, required=required, default=None)
        if raw is None:
            return default
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"config key '{self._key(key)}' must be an "
                              f"integer, got {raw!r}")
        if minimum is not None and raw < minimum:
            raise ConfigError(f"config key '{self._key(key)}' must be "
                              f">= {minimum}, got {raw}")
        return int(raw)

    def take_str(self, key: str, required: bool = False, default=None,
                 choices: tuple[str, ...] | None = None):
        raw = self.take(key, required=required, default=None)
        if raw is None:
            return default
        if not isinstance(raw, str):
            raise ConfigError(f"config key '{self._key(key)}' must be a "
                              f"string, got {raw!r}")
        if choices is not None and raw not in choices:
            raise ConfigError(f"config key '{self._key(key)}' must be one "
                              f"of {list(choices)}, got {raw!r}")
        return raw

    def subsection(self, key: str, required: bool = False):
        raw = self.take(key, required=required, default=None)
        if raw is None:
            return None
        return _Section(raw, self._key(key))

    def finish(self):
        if self._d:
            stray = sorted(self._d)[0]
            raise ConfigError(f"unknown config key '{self._key(stray)}'")

    def _key(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key


@dataclass(frozen=True)
class GeometrySection:
    """Trajectory description for single-point phase evaluation."""

    kind: str
    radius_m: float | None = None
    speed_m_per_s: float | None = None
    sense: int = 1
    samples: int | None = None
    x_offset_m: float | None = None
    z_offset_m: float = 0.0
    length_m: float | None = None


@dataclass(frozen=True)
class SweepSection:
    """Swept variable and its grid (always stored as explicit values)."""

    variable: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class QuadratureSection:
    """Beam-average grid controls."""

    base_n: int = 600
    max_refinements: int = 2
    tolerance_rad: float = 1e-6


@dataclass(frozen=True)
class OptimizeSection:
    """Plasma-frequency search bracket."""

    bracket_rad_per_s: tuple[float, float]


def _parse_atom(sec: _Section | None) -> tuple[AtomSpecies, str | None]:
    if sec is None:
        raise ConfigError("missing required config section 'atom'")
    preset = sec.take_str("preset")
    if preset is not None:
        if sec.has("alpha0_vol_m3") or sec.has("omega0_rad_per_s"):
            raise ConfigError(f"'{sec.path}' must give either a preset or "
                              "explicit values, not both")
        if preset not in _ATOM_PRESETS:
            raise ConfigError(f"unknown atom preset {preset!r} "
                              f"(known: {sorted(_ATOM_PRESETS)})")
        sec.finish()
        return _ATOM_PRESETS[preset], preset
    atom = AtomSpecies(
        alpha0_vol=sec.take_number("alpha0_vol_m3", required=True,
                                   positive=True),
        omega0=sec.take_number("omega0_rad_per_s", required=True,
                               positive=True),
    )
    sec.finish()
    return atom, None


def _parse_scatterer(sec: _Section | None
                     ) -> tuple[NanosphereScatterer, str | None]:
    if sec is None:
        raise ConfigError("missing required config section 'scatterer'")
    radius = sec.take_number("radius_m", required=True, positive=True)
    msec = sec.subsection("material", required=True)
    preset = msec.take_str("preset")
    if preset is not None:
        if msec.has("omega_p_rad_per_s") or msec.has("gamma_rad_per_s"):
            raise ConfigError(f"'{msec.path}' must give either a preset or "
                              "explicit values, not both")
        if preset not in _MATERIAL_PRESETS:
            raise ConfigError(f"unknown material preset {preset!r} "
                              f"(known: {sorted(_MATERIAL_PRESETS)})")
        msec.finish()
        material, mpreset = _MATERIAL_PRESETS[preset], preset
    else:
        material = DrudeMaterial(
            omega_p=msec.take_number("omega_p_rad_per_s", required=True,
                                     positive=True),
            gamma=msec.take_number("gamma_rad_per_s", required=True,
                                   positive=True),
        )
        msec.finish()
        mpreset = None
    sec.finish()
    return NanosphereScatterer(radius=radius, material=material), mpreset


def _parse_rotation(sec: _Section | None) -> RotationSpec:
    if sec is None:
        return RotationSpec.about_z(0.0)
    magnitude = sec.take_number("omega_rad_per_s", required=True,
                                nonnegative=True)
    axis_raw = sec.take("axis", default=[0.0, 0.0, 1.0])
    if (not isinstance(axis_raw, list) or len(axis_raw) != 3
            or any(isinstance(x, bool) or not isinstance(x, (int, float))
                   for x in axis_raw)):
        raise ConfigError(f"config key '{sec.path}.axis' must be a list of "
                          "3 numbers")
    axis = np.array([float(x) for x in axis_raw])
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        raise ConfigError(f"config key '{sec.path}.axis' must be nonzero")
    sec.finish()
    return RotationSpec(omega_vec=tuple(axis / norm * magnitude))


def _parse_geometry(sec: _Section | None) -> GeometrySection | None:
    if sec is None:
        return None
    kind = sec.take_str("kind", required=True, choices=_GEOMETRY_KINDS)
    if kind == "circle":
        geo = GeometrySection(
            kind=kind,
            radius_m=sec.take_number("radius_m", required=True,
                                     positive=True),
            speed_m_per_s=sec.take_number("speed_m_per_s", default=1.0,
                                          positive=True),
            sense=sec.take_int("sense", default=1),
            samples=sec.take_int("samples", default=4096, minimum=16),
        )
        if geo.sense not in (1, -1):
            raise ConfigError(f"config key '{sec.path}.sense' must be 1 or "
                              f"-1, got {geo.sense}")
    elif kind == "segment":
        geo = GeometrySection(
            kind=kind,
            x_offset_m=sec.take_number("x_offset_m", required=True),
            z_offset_m=sec.take_number("z_offset_m", default=0.0),
            length_m=sec.take_number("length_m", required=True,
                                     positive=True),
            speed_m_per_s=sec.take_number("speed_m_per_s", required=True,
                                          positive=True),
            samples=sec.take_int("samples", default=4001, minimum=5),
        )
    elif kind == "two-lines":
        geo = GeometrySection(
            kind=kind,
            x_offset_m=sec.take_number("x_offset_m", required=True),
        )
        if geo.x_offset_m == 0.0:
            raise ConfigError(f"config key '{sec.path}.x_offset_m' must be "
                              "nonzero")
    else:  # beam
        geo = GeometrySection(kind=kind)
    sec.finish()
    return geo


def _parse_beam(sec: _Section | None) -> GaussianBeam | None:
    if sec is None:
        return None
    try:
        beam = GaussianBeam(
            center_x=sec.take_number("center_x_m", required=True),
            width=sec.take_number("width_m", required=True, positive=True),
            velocity=sec.take_number("velocity_m_per_s", required=True,
                                     positive=True),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid '{sec.path}' section: {exc}")
    sec.finish()
    return beam


def _parse_sweep(sec: _Section | None) -> SweepSection | None:
    if sec is None:
        return None
    variable = sec.take_str("variable", required=True,
                            choices=("velocity", "width", "omega", "center"))
    has_values = sec.has("values")
    has_range = sec.has("start") or sec.has("stop") or sec.has("count")
    if has_values and has_range:
        raise ConfigError(f"'{sec.path}' must give either 'values' or "
                          "'start'/'stop'/'count', not both")
    if has_values:
        raw = sec.take("values")
        if (not isinstance(raw, list) or not raw
                or any(isinstance(x, bool) or not isinstance(x, (int, float))
                       for x in raw)):
            raise ConfigError(f"config key '{sec.path}.values' must be a "
                              "nonempty list of numbers")
        values = tuple(float(x) for x in raw)
    elif has_range:
        start = sec.take_number("start", required=True)
        stop = sec.take_number("stop", required=True)
        count = sec.take_int("count", required=True, minimum=1)
        values = tuple(float(v) for v in np.linspace(start, stop, count))
    else:
        raise ConfigError(f"'{sec.path}' needs a grid: 'values' or "
                          "'start'/'stop'/'count'")
    sec.finish()
    return SweepSection(variable=variable, values=values)


def _parse_quadrature(sec: _Section | None) -> QuadratureSection:
    if sec is None:
        return QuadratureSection()
    quad = QuadratureSection(
        base_n=sec.take_int("base_n", default=600, minimum=16),
        max_refinements=sec.take_int("max_refinements", default=2,
                                     minimum=0),
        tolerance_rad=sec.take_number("tolerance_rad", default=1e-6,
                                      positive=True),
    )
    sec.finish()
    return quad


def _parse_optimize(sec: _Section | None) -> OptimizeSection | None:
    if sec is None:
        return None
    raw = sec.take("bracket_rad_per_s", required=True)
    if (not isinstance(raw, list) or len(raw) != 2
            or any(isinstance(x, bool) or not isinstance(x, (int, float))
                   for x in raw)):
        raise ConfigError(f"config key '{sec.path}.bracket_rad_per_s' must "
                          "be a list of 2 numbers")
    lo, hi = float(raw[0]), float(raw[1])
    if not 0 < lo < hi:
        raise ConfigError(f"config key '{sec.path}.bracket_rad_per_s' must "
                          f"satisfy 0 < lo < hi, got [{lo}, {hi}]")
    sec.finish()
    return OptimizeSection(bracket_rad_per_s=(lo, hi))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment definition (parsed from a JSON file).

    ``from_dict``/``to_dict`` round-trip exactly: parsing the serialized
    form reproduces an equal config.  Unknown keys anywhere are rejected
    with the full dotted key path.
    """

    atom: AtomSpecies
    scatterer: NanosphereScatterer
    rotation: RotationSpec
    temperature_K: float
    geometry: GeometrySection | None
    beam: GaussianBeam | None
    sweep: SweepSection | None
    quadrature: QuadratureSection
    optimize: OptimizeSection | None
    atom_preset: str | None = None
    material_preset: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """Parse and validate a configuration mapping."""
        top = _Section(data, "")
        atom, atom_preset = _parse_atom(top.subsection("atom", required=True))
        scatterer, mat_preset = _parse_scatterer(
            top.subsection("scatterer", required=True))
        rotation = _parse_rotation(top.subsection("rotation"))
        temperature = top.take_number("temperature_K", default=0.0,
                                      nonnegative=True)
        geometry = _parse_geometry(top.subsection("geometry"))
        beam = _parse_beam(top.subsection("beam"))
        sweep_sec = _parse_sweep(top.subsection("sweep"))
        quadrature = _parse_quadrature(top.subsection("quadrature"))
        optimize = _parse_optimize(top.subsection("optimize"))
        top.finish()
        return cls(atom=atom, scatterer=scatterer, rotation=rotation,
                   temperature_K=temperature, geometry=geometry, beam=beam,
                   sweep=sweep_sec, quadrature=quadrature, optimize=optimize,
                   atom_preset=atom_preset, material_preset=mat_preset)

    def to_dict(self) -> dict:
        """Serialize back to the JSON mapping form."""
        out: dict = {}
        if self.atom_preset is not None:
            out["atom"] = {"preset": self.atom_preset}
        else:
            out["atom"] = {"alpha0_vol_m3": self.atom.alpha0_vol,
                           "omega0_rad_per_s": self.atom.omega0}
        if self.material_preset is not None:
            material = {"preset": self.material_preset}
        else:
            material = {"omega_p_rad_per_s": self.scatterer.material.omega_p,
                        "gamma_rad_per_s": self.scatterer.material.gamma}
        out["scatterer"] = {"radius_m": self.scatterer.radius,
                            "material": material}
        magnitude = self.rotation.magnitude
        axis = (list(np.asarray(self.rotation.vector) / magnitude)
                if magnitude > 0 else [0.0, 0.0, 1.0])
        out["rotation"] = {"omega_rad_per_s": magnitude,
                           "axis": [float(x) for x in axis]}
        out["temperature_K"] = self.temperature_K
        if self.geometry is not None:
            g = self.geometry
            if g.kind == "circle":
                out["geometry"] = {"kind": g.kind, "radius_m": g.radius_m,
                                   "speed_m_per_s": g.speed_m_per_s,
                                   "sense": g.sense, "samples": g.samples}
            elif g.kind == "segment":
                out["geometry"] = {"kind": g.kind,
                                   "x_offset_m": g.x_offset_m,
                                   "z_offset_m": g.z_offset_m,
                                   "length_m": g.length_m,
                                   "speed_m_per_s": g.speed_m_per_s,
                                   "samples": g.samples}
            elif g.kind == "two-lines":
                out["geometry"] = {"kind": g.kind,
                                   "x_offset_m": g.x_offset_m}
            else:
                out["geometry"] = {"kind": g.kind}
        if self.beam is not None:
            out["beam"] = {"center_x_m": self.beam.center_x,
                           "width_m": self.beam.width,
                           "velocity_m_per_s": self.beam.velocity}
        if self.sweep is not None:
            out["sweep"] = {"variable": self.sweep.variable,
                            "values": list(self.sweep.values)}
        out["quadrature"] = {
            "base_n": self.quadrature.base_n,
            "max_refinements": self.quadrature.max_refinements,
            "tolerance_rad": self.quadrature.tolerance_rad,
        }
        if self.optimize is not None:
            out["optimize"] = {
                "bracket_rad_per_s": list(self.optimize.bracket_rad_per_s)}
        return out


def load_config(path: str) -> ExperimentConfig:
    """Read and validate a JSON experiment file."""
    try:
        text = FilePath(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    return ExperimentConfig.from_dict(data)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _breakdown_dict(b: PhaseBreakdown) -> dict:
    return {
        "qvsp_local_rad": b.qvsp_local,
        "qvsp_retardation_rad": b.qvsp_retardation,
        "vdw_quasistatic_rad": b.vdw_quasistatic,
        "qvsp_nonlocal_rad": b.qvsp_nonlocal,
        "temperature_factor": b.temperature_factor,
        "total_rad": b.total,
        "blocked": b.blocked,
    }


def _diagnostics(atom, scatterer, r_closest, local, retardation) -> dict:
    ratio = (abs(retardation / local) if local != 0.0 else math.inf)
    return {
        "kr_closest": atom.omega0 * r_closest / CONSTANTS.c,
        "closest_approach_m": r_closest,
        "retardation_ratio": ratio,
        "sphere_radius_m": scatterer.radius,
    }


def cmd_phase(config: ExperimentConfig) -> dict:
    """Single-point phase breakdown for the configured geometry.

    Returns the report dictionary that the CLI prints as JSON: the full
    phase breakdown, the characteristic rotation length, and regime
    diagnostics (kr at closest approach, retardation/local ratio).
    """
    geo = config.geometry
    if geo is None:
        raise ConfigError("the phase command needs a 'geometry' section")
    atom, sc, rot = config.atom, config.scatterer, config.rotation
    tf = temperature_factor(atom, config.temperature_K)
    ell = sagnac_length(atom, sc, rot).ell_omega
    collected: list[str] = []

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if geo.kind == "circle":
            path = Path.circle(geo.radius_m, n=geo.samples, sense=geo.sense,
                               speed=geo.speed_m_per_s)
            local = qvsp_circle_closed(atom, sc, rot, geo.radius_m,
                                       sense=geo.sense)
            retardation = qvsp_retardation(atom, sc, rot, path)
            vdw = vdw_phase_quasistatic(atom, sc, path)
            breakdown = PhaseBreakdown.assemble(
                local, retardation, vdw, 0.0, tf)
            diag = _diagnostics(atom, sc, geo.radius_m, local, retardation)
        elif geo.kind == "segment":
            path = Path.segment(geo.x_offset_m, geo.z_offset_m, geo.length_m,
                                geo.speed_m_per_s, n=geo.samples)
            local = qvsp_local_numeric(atom, sc, rot, path)
            retardation = qvsp_retardation(atom, sc, rot, path)
            vdw = vdw_phase_quasistatic(atom, sc, path)
            breakdown = PhaseBreakdown.assemble(
                local, retardation, vdw, 0.0, tf)
            r_min = math.hypot(geo.x_offset_m, geo.z_offset_m)
            diag = _diagnostics(atom, sc, r_min, local, retardation)
            diag["infinite_line_local_rad"] = qvsp_segment_closed(
                atom, sc, rot, geo.x_offset_m, geo.z_offset_m)
        elif geo.kind == "two-lines":
            x1 = geo.x_offset_m
            local = (qvsp_segment_closed(atom, sc, rot, x1, 0.0)
                     - qvsp_segment_closed(atom, sc, rot, -x1, 0.0))
            retardation = (
                qvsp_retardation_line_closed(atom, sc, rot, x1, 0.0)
                - qvsp_retardation_line_closed(atom, sc, rot, -x1, 0.0))
            nonlocal_phase = (
                qvsp_nonlocal_lines_closed(atom, sc, rot, x1, alpha_index=1)
                - qvsp_nonlocal_lines_closed(atom, sc, rot, x1,
                                             alpha_index=2))
            # the two arms sit at the same distance: dispersive parts cancel
            breakdown = PhaseBreakdown.assemble(
                local, retardation, 0.0, nonlocal_phase, tf)
            diag = _diagnostics(atom, sc, abs(x1), local, retardation)
            d2r = sphere_polarizability(sc, atom.omega0).d2.real
            coupling = (atom.omega0 * atom.alpha0_vol * d2r
                        * rot.omega_vec[2])
            if coupling != 0.0:
                unit = coupling * math.copysign(1.0, x1) / x1**6
                diag["coefficients"] = {
                    "local_difference": local / unit,
                    "nonlocal": nonlocal_phase / unit,
                    "total": (local + nonlocal_phase) / unit,
                    "local_difference_expected": 90.0 * math.pi / 32.0,
                    "nonlocal_expected": -27.0 * math.pi / 32.0,
                    "total_expected": 63.0 * math.pi / 32.0,
                }
        else:  # beam
            if config.beam is None:
                raise ConfigError("beam geometry needs a 'beam' section")
            quad = config.quadrature
            res = averaged_phase(atom, sc, rot, config.beam,
                                 theta=config.temperature_K,
                                 base_n=quad.base_n,
                                 max_refinements=quad.max_refinements,
                                 tolerance_rad=quad.tolerance_rad)
            report = {
                "geometry": "beam",
                "phi_bar_rad": res.phi_bar,
                "phi_bar_omega_rad": res.phi_bar_omega,
                "blocked_fraction": res.blocked_fraction,
                "err_estimate_rad": res.quadrature_error_estimate,
                "ell_omega_m": ell,
                "warnings": sorted({str(w.message) for w in caught}),
            }
            return report

    report = {
        "geometry": geo.kind,
        "breakdown": _breakdown_dict(breakdown),
        "ell_omega_m": ell,
        "diagnostics": diag,
        "warnings": sorted({str(w.message) for w in caught}),
    }
    return report


def _format_cell(x: float) -> str:
    return f"{x:.17g}"


def cmd_sweep(config: ExperimentConfig, output: str,
              workers: int | None = None) -> int:
    """Run the configured sweep and write CSV + JSON sidecar.

    Returns the number of successful rows; raises ConfigError when the
    config lacks the sweep or beam sections.
    """
    if config.sweep is None:
        raise ConfigError("the sweep command needs a 'sweep' section")
    if config.beam is None:
        raise ConfigError("the sweep command needs a 'beam' section")
    quad = config.quadrature
    try:
        spec = SweepSpec(
            variable=config.sweep.variable,
            values=np.array(config.sweep.values, dtype=float),
            atom=config.atom, scatterer=config.scatterer,
            rotation=config.rotation, beam=config.beam,
            theta=config.temperature_K, base_n=quad.base_n,
            max_refinements=quad.max_refinements,
            tolerance_rad=quad.tolerance_rad,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid sweep grid: {exc}")

    rows = sweep(spec, workers=workers)

    out_path = FilePath(output)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([
                _format_cell(row.value),
                _format_cell(row.phi_bar),
                _format_cell(row.phi_bar_omega),
                _format_cell(row.blocked_fraction),
                _format_cell(row.err_estimate),
                row.error or "",
            ])

    sidecar = {
        "version": __version__,
        "config": config.to_dict(),
        "output_csv": out_path.name,
        "rows_total": len(rows),
        "rows_failed": [
            {"value": row.value, "error": row.error}
            for row in rows if row.error
        ],
        "notes": {
            "blocked_fraction": (
                "Gaussian weight removed by the sphere's geometric cross-"
                "section; phase averages renormalize over the surviving "
                "weight."),
            "err_estimate_rad": (
                "change of the readout between the two finest grid levels "
                "(phi_bar_omega for a rotating sphere, phi_bar otherwise)."),
        },
    }
    with open(str(out_path) + ".json", "w", encoding="utf-8",
              newline="") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sum(1 for row in rows if not row.error)


def cmd_optimize_material(config: ExperimentConfig) -> dict:
    """Tune the plasma frequency for maximal response curvature at w0."""
    if config.optimize is None:
        raise ConfigError("the optimize command needs an 'optimize' section")
    atom, sc = config.atom, config.scatterer
    omega_p_star = optimize_plasma_frequency(
        atom, sc.radius, sc.material.gamma,
        config.optimize.bracket_rad_per_s)
    tuned = NanosphereScatterer(
        radius=sc.radius,
        material=DrudeMaterial(omega_p=omega_p_star,
                               gamma=sc.material.gamma))
    pol = sphere_polarizability(tuned, atom.omega0)
    ell = sagnac_length(atom, tuned, config.rotation).ell_omega
    return {
        "omega_p_star_rad_per_s": omega_p_star,
        "omega_res_rad_per_s": omega_p_star / math.sqrt(3.0),
        "re_d2_alpha_at_omega0_m3_s2": pol.d2.real,
        "ell_omega_m": ell,
        "rotation_rad_per_s": config.rotation.magnitude,
    }


def cmd_selftest(inject_delta_alpha_sign_error: bool = False,
                 stream=None) -> int:
    """Run the invariant battery; return 0 on success, 1 on failure."""
    stream = stream if stream is not None else sys.stdout
    results = run_battery(
        inject_delta_alpha_sign_error=inject_delta_alpha_sign_error)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name:30s} max_dev={res.max_deviation:.3e}  "
              f"{res.detail}", file=stream)
    failed = [res.name for res in results if not res.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed",
          file=stream)
    if failed:
        print(f"selftest FAILED: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# --------------------------------------------------------------------------
# argument parsing and dispatch
# --------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qvsp",
        description=("Rotation-induced and dispersive interferometric "
                     "phases near a spinning nanosphere"),
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_phase = sub.add_parser(
        "phase", help="single-point phase breakdown as JSON")
    p_phase.add_argument("-c", "--config", required=True,
                         help="JSON experiment file")

    p_sweep = sub.add_parser(
        "sweep", help="one-parameter sweep written as CSV")
    p_sweep.add_argument("-c", "--config", required=True,
                         help="JSON experiment file")
    p_sweep.add_argument("-o", "--output", required=True,
                         help="output CSV path (JSON sidecar written "
                              "alongside)")
    p_sweep.add_argument("--threads", type=int, default=None,
                         help="worker processes (default: QVSP_THREADS "
                              "env var, else 1)")

    p_opt = sub.add_parser(
        "optimize", help="tune the plasma frequency for maximal coupling")
    p_opt.add_argument("-c", "--config", required=True,
                       help="JSON experiment file with an 'optimize' "
                            "section")

    p_self = sub.add_parser(
        "selftest", help="run the fast invariant battery")
    p_self.add_argument("--inject-delta-alpha-sign-error",
                        action="store_true", help=argparse.SUPPRESS)
    return parser


def main(argv: list[str] | None = None) -> int:
    """CLI entry point.

    Exit codes: 0 success, 1 self-test failure, 2 configuration error,
    3 numerical error.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "phase":
            report = cmd_phase(load_config(args.config))
            print(json.dumps(report, indent=2, sort_keys=True))
            return 0
        if args.command == "sweep":
            workers = resolve_workers(args.threads)
            good = cmd_sweep(load_config(args.config), args.output,
                             workers=workers)
            print(f"{good} successful rows written to {args.output}")
            return 0 if good > 0 else 3
        if args.command == "optimize":
            report = cmd_optimize_material(load_config(args.config))
            print(json.dumps(report, indent=2, sort_keys=True))
            return 0
        # selftest
        return cmd_selftest(
            inject_delta_alpha_sign_error=getattr(
                args, "inject_delta_alpha_sign_error", False))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except QvspError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
