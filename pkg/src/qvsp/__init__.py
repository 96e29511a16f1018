"""Numerical laboratory for rotation-induced and dispersive phases
imprinted on an atom interferometer by a spinning metallic nanosphere.

The package provides dispersive material response with analytic
frequency derivatives (:mod:`qvsp.materials`), dyadic propagators and
the rotation correction to the sphere's response (:mod:`qvsp.greens`),
per-path and cross-path phase functionals with closed forms
(:mod:`qvsp.phases`), Gaussian-beam averaging and parameter sweeps
(:mod:`qvsp.interferometer`), and a command-line interface with a
self-test battery (:mod:`qvsp.cli`).
"""

from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    GeometryError,
    ModelingError,
    QvspError,
    SingularityError,
    VdwRegimeWarning,
)
from .greens import (
    GREEN_NORM,
    FdtReport,
    RotationSpec,
    delta_alpha_rotation,
    fdt_check,
    free_green_full,
    free_green_vdw,
    nearfield_tensor,
    nearfield_tensor_gradient,
    scattered_green,
)
from .materials import (
    CONSTANTS,
    K_DRUDE,
    NA_ATOM,
    AtomSpecies,
    DrudeMaterial,
    NanosphereScatterer,
    PhysicalConstants,
    PolarizabilityEval,
    drude_epsilon,
    effective_alpha_I_bar,
    optimize_plasma_frequency,
    sphere_polarizability,
    temperature_factor,
    wick_static_response,
)
from .phases import (
    Path,
    PhaseBreakdown,
    SagnacLength,
    qvsp_circle_closed,
    qvsp_local_from_green,
    qvsp_local_numeric,
    qvsp_nonlocal,
    qvsp_nonlocal_lines_closed,
    qvsp_retardation,
    qvsp_retardation_line_closed,
    qvsp_segment_closed,
    sagnac_coupling,
    sagnac_length,
    total_phase_line,
    vdw_atom_atom_check,
    vdw_line_closed,
    vdw_phase_quasistatic,
)
from .interferometer import (
    AveragedPhaseResult,
    GaussianBeam,
    SweepRow,
    SweepSpec,
    averaged_phase,
    mach_zehnder_delta,
    resolve_workers,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "QvspError", "ConfigError", "GeometryError", "SingularityError",
    "BracketError", "ConvergenceError", "ModelingError", "VdwRegimeWarning",
    # materials
    "PhysicalConstants", "CONSTANTS", "DrudeMaterial", "NanosphereScatterer",
    "AtomSpecies", "PolarizabilityEval", "NA_ATOM", "K_DRUDE",
    "drude_epsilon", "sphere_polarizability", "effective_alpha_I_bar",
    "wick_static_response", "optimize_plasma_frequency", "temperature_factor",
    # greens
    "GREEN_NORM", "RotationSpec", "FdtReport", "nearfield_tensor",
    "nearfield_tensor_gradient", "free_green_vdw", "free_green_full",
    "delta_alpha_rotation", "scattered_green", "fdt_check",
    # phases
    "Path", "PhaseBreakdown", "SagnacLength", "sagnac_coupling",
    "sagnac_length", "qvsp_local_numeric", "qvsp_circle_closed",
    "qvsp_segment_closed", "qvsp_local_from_green", "qvsp_retardation",
    "qvsp_retardation_line_closed", "vdw_phase_quasistatic",
    "vdw_line_closed", "vdw_atom_atom_check", "qvsp_nonlocal",
    "qvsp_nonlocal_lines_closed", "total_phase_line",
    # interferometer
    "GaussianBeam", "SweepSpec", "SweepRow", "AveragedPhaseResult",
    "averaged_phase", "sweep", "resolve_workers", "mach_zehnder_delta",
]
