"""Gaussian-beam averaging of straight-line phases, parameter sweeps,
and the two-arm differential signal.

A collimated atom beam crossing the nanosphere region is modeled as a
transverse Gaussian weight over parallel straight trajectories; each
trajectory carries the closed-form phase breakdown of
:func:`qvsp.phases.total_phase_line`.  Trajectories whose transverse
offset falls inside the sphere's geometric cross-section are removed
(absorption) and the remaining weight renormalized; the ensemble phase
is the circular mean of the surviving trajectory phases.

All grid reductions use numpy's deterministic pairwise summation on
fixed-shape arrays, so repeated evaluations are bit-identical.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConvergenceError, GeometryError, ModelingError, QvspError
from .greens import RotationSpec
from .materials import (
    AtomSpecies,
    NanosphereScatterer,
    temperature_factor,
)
from .phases import _line_closed_coefficients

__all__ = [
    "GaussianBeam",
    "AveragedPhaseResult",
    "SweepSpec",
    "SweepRow",
    "averaged_phase",
    "sweep",
    "mach_zehnder_delta",
]


@dataclass(frozen=True)
class GaussianBeam:
    """Transverse Gaussian trajectory ensemble.

    Parameters
    ----------
    center_x : float
        Beam-center transverse offset along x, m.
    width : float
        Gaussian width w of the trajectory weight
        exp(-((x - center_x)^2 + z^2) / (2 w^2)), m; positive.
    velocity : float
        Common longitudinal speed of the trajectories, m/s; positive.
    """

    center_x: float
    width: float
    velocity: float

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("beam width must be positive")
        if not self.velocity > 0:
            raise ValueError("beam velocity must be positive")


@dataclass(frozen=True)
class AveragedPhaseResult:
    """Beam-averaged phase readout.

    Attributes
    ----------
    phi_bar : float
        Circular mean of the total per-trajectory phase over the
        surviving (unblocked) weight, rad; always in (-pi, pi].
    phi_bar_omega : float
        Rotation-induced part: phi_bar minus the same average with the
        rotation switched off.  Exactly 0.0 for zero rotation.
    blocked_fraction : float
        Fraction of the Gaussian weight falling inside the sphere's
        geometric cross-section; in [0, 1).
    quadrature_error_estimate : float
        Change of the readout between the two finest grid levels, rad.
        The readout is phi_bar_omega for a rotating sphere, phi_bar
        otherwise: the sharp absorption boundary limits the raw circular
        mean to first-order convergence when it crosses the beam core,
        while the boundary error cancels in the on/off difference.
    """

    phi_bar: float
    phi_bar_omega: float
    blocked_fraction: float
    quadrature_error_estimate: float


#: x-rows per accumulation block in the grid average.  Fixed so that the
#: reduction order — and therefore the output bits — do not depend on
#: available memory.
_GRID_BLOCK_ROWS = 256


def _grid_averages(atom, scatterer, rotation, beam, theta, n):
    """Circular means on an n x n transverse grid.

    Returns (phi_bar_on, phi_bar_off, blocked_fraction); the "off"
    average ignores the rotation-induced terms.  The grid is processed
    in fixed-size blocks of x-rows with pairwise reductions inside each
    block, keeping memory bounded and the result deterministic.
    """
    cx, w = beam.center_x, beam.width
    x = np.linspace(cx - 6.0 * w, cx + 6.0 * w, n)
    z = np.linspace(-6.0 * w, 6.0 * w, n)

    c_loc, c_ret, c_vdw, om_x, om_z = _line_closed_coefficients(
        atom, scatterer, rotation)
    tf = temperature_factor(atom, theta)
    a2 = scatterer.radius**2
    z2 = z * z
    gz = np.exp(-z2 / (2.0 * w * w))

    wt_total = 0.0
    wt_open = 0.0
    sums = np.zeros(4)  # sin/cos of phi_on, sin/cos of phi_off
    for lo in range(0, n, _GRID_BLOCK_ROWS):
        xb = x[lo:lo + _GRID_BLOCK_ROWS, None]
        weight = np.exp(-((xb - cx) ** 2) / (2.0 * w * w)) * gz
        rp2 = xb * xb + z2
        mask = rp2 > a2
        wt_total += float(np.sum(weight))
        wt_masked = weight * mask
        wt_open += float(np.sum(wt_masked))

        rp2_safe = np.where(rp2 > 0.0, rp2, 1.0)
        inv5 = rp2_safe**-2.5
        phi_off = (c_vdw / beam.velocity) * inv5
        lever = om_z * xb - om_x * z
        phi_rot = (c_loc * inv5 / rp2_safe + c_ret * inv5) * lever
        phi_on = tf * phi_rot + phi_off
        sums[0] += float(np.sum(wt_masked * np.sin(phi_on)))
        sums[1] += float(np.sum(wt_masked * np.cos(phi_on)))
        sums[2] += float(np.sum(wt_masked * np.sin(phi_off)))
        sums[3] += float(np.sum(wt_masked * np.cos(phi_off)))

    if wt_open == 0.0:
        raise GeometryError("every trajectory with nonzero weight is "
                            "blocked by the sphere")
    blocked = 1.0 - wt_open / wt_total
    return (math.atan2(sums[0], sums[1]), math.atan2(sums[2], sums[3]),
            blocked)


def averaged_phase(atom: AtomSpecies, scatterer: NanosphereScatterer,
                   rotation: RotationSpec, beam: GaussianBeam,
                   theta: float = 0.0, base_n: int = 600,
                   max_refinements: int = 2,
                   tolerance_rad: float = 1e-6) -> AveragedPhaseResult:
    """Beam-averaged interferometric phase for a Gaussian ensemble.

    Averages the closed-form straight-line phases over the transverse
    Gaussian weight on [center_x - 6w, center_x + 6w] x [-6w, 6w],
    excluding blocked trajectories (transverse offset inside the sphere
    cross-section) and renormalizing.  The grid is refined by doubling
    until successive levels agree to ``tolerance_rad``.

    Parameters
    ----------
    theta : float
        Temperature, K; scales only the rotation-induced local terms.
    base_n : int
        Grid points per axis at the coarsest level.
    max_refinements : int
        Maximum number of grid doublings.
    tolerance_rad : float
        Acceptable change between successive grid levels, rad.

    Returns
    -------
    AveragedPhaseResult

    Raises
    ------
    GeometryError
        If the beam core (center +- 5 widths) lies entirely inside the
        sphere cross-section, or no weighted trajectory survives.
    ConvergenceError
        If the finest grid still changes by more than ``tolerance_rad``;
        the diagnostics carry the per-level values.
    """
    if abs(beam.center_x) + 5.0 * beam.width <= scatterer.radius:
        raise GeometryError(
            "beam core entirely blocked: |center_x| + 5 width = "
            f"{abs(beam.center_x) + 5.0 * beam.width:.3e} m lies inside the "
            f"sphere cross-section (radius {scatterer.radius:.3e} m)"
        )
    rotating = rotation.magnitude != 0.0

    levels = []
    n = base_n
    history = []
    err = math.inf
    for level in range(max_refinements + 1):
        on, off, blocked = _grid_averages(atom, scatterer, rotation, beam,
                                          theta, n)
        phi_bar = on
        phi_bar_omega = (on - off) if rotating else 0.0
        levels.append((n, phi_bar, phi_bar_omega, blocked))
        history.append({"n": n, "phi_bar": phi_bar,
                        "phi_bar_omega": phi_bar_omega})
        if level > 0:
            prev = levels[-2]
            err = (abs(phi_bar_omega - prev[2]) if rotating
                   else abs(phi_bar - prev[1]))
            if err <= tolerance_rad:
                break
        n *= 2
    else:
        raise ConvergenceError(
            f"beam average did not settle to {tolerance_rad:.1e} rad after "
            f"{max_refinements} refinements (last change {err:.2e} rad)",
            error_estimate=err,
            diagnostics={"levels": history},
        )

    n_fin, phi_bar, phi_bar_omega, blocked = levels[-1]
    return AveragedPhaseResult(
        phi_bar=phi_bar,
        phi_bar_omega=phi_bar_omega,
        blocked_fraction=blocked,
        quadrature_error_estimate=err,
    )


# --------------------------------------------------------------------------
# parameter sweeps
# --------------------------------------------------------------------------

_SWEEP_VARIABLES = ("velocity", "width", "omega", "center")


@dataclass(frozen=True)
class SweepSpec:
    """Full experiment record for a one-parameter sweep.

    Parameters
    ----------
    variable : {"velocity", "width", "omega", "center"}
        Which knob the grid drives: beam speed (m/s), beam width (m),
        rotation rate magnitude (rad/s; the rotation axis is kept), or
        beam center offset (m).  A center sweep with a narrow beam
        traces the phase profile across the sphere's shadow; trajectories
        through the shadow come back as blocked/failed rows.
    values : ndarray
        Strictly monotone grid of that variable; strictly positive
        except for "center", which may cross zero.
    atom, scatterer, rotation, beam, theta
        The base experiment; the swept quantity in it is ignored in
        favor of each grid value.
    base_n, max_refinements, tolerance_rad
        Quadrature controls passed to :func:`averaged_phase`.
    """

    variable: str
    values: np.ndarray
    atom: AtomSpecies
    scatterer: NanosphereScatterer
    rotation: RotationSpec
    beam: GaussianBeam
    theta: float = 0.0
    base_n: int = 600
    max_refinements: int = 2
    tolerance_rad: float = 1e-6

    def __post_init__(self):
        if self.variable not in _SWEEP_VARIABLES:
            raise ValueError(
                f"variable must be one of {_SWEEP_VARIABLES}, "
                f"got {self.variable!r}"
            )
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("values must be a nonempty 1-D grid")
        if self.variable != "center" and not np.all(vals > 0.0):
            raise ValueError("grid values must be strictly positive")
        d = np.diff(vals)
        if vals.size > 1 and not (np.all(d > 0.0) or np.all(d < 0.0)):
            raise ValueError("grid values must be strictly monotone")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SweepRow:
    """One sweep output row; failed rows carry NaNs and the error text."""

    value: float
    phi_bar: float
    phi_bar_omega: float
    blocked_fraction: float
    err_estimate: float
    error: str | None = None


def _experiment_at(spec: SweepSpec, value: float):
    """The (atom, scatterer, rotation, beam) tuple with the swept
    variable set to ``value``."""
    beam = spec.beam
    rotation = spec.rotation
    if spec.variable == "velocity":
        beam = replace(beam, velocity=float(value))
    elif spec.variable == "width":
        beam = replace(beam, width=float(value))
    elif spec.variable == "center":
        beam = replace(beam, center_x=float(value))
    else:
        mag = rotation.magnitude
        axis = (np.asarray(rotation.vector) / mag if mag > 0.0
                else np.array([0.0, 0.0, 1.0]))
        rotation = RotationSpec(omega_vec=tuple(axis * float(value)))
    return spec.atom, spec.scatterer, rotation, beam


def _sweep_row(args) -> SweepRow:
    spec, value = args
    atom, scatterer, rotation, beam = _experiment_at(spec, value)
    try:
        res = averaged_phase(atom, scatterer, rotation, beam,
                             theta=spec.theta, base_n=spec.base_n,
                             max_refinements=spec.max_refinements,
                             tolerance_rad=spec.tolerance_rad)
    except QvspError as exc:
        return SweepRow(value=float(value), phi_bar=math.nan,
                        phi_bar_omega=math.nan, blocked_fraction=math.nan,
                        err_estimate=math.nan,
                        error=f"{type(exc).__name__}: {exc}")
    return SweepRow(value=float(value), phi_bar=res.phi_bar,
                    phi_bar_omega=res.phi_bar_omega,
                    blocked_fraction=res.blocked_fraction,
                    err_estimate=res.quadrature_error_estimate, error=None)


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else QVSP_THREADS, else 1."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("QVSP_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"QVSP_THREADS must be an integer, got {env!r}")
    return 1


def sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    """Run the sweep, one beam average per grid value, in grid order.

    A failing row (geometry, convergence, ...) is recorded with NaNs and
    its error message; it does not abort the remaining rows.

    Parameters
    ----------
    workers : int, optional
        Process count for row-parallel evaluation; defaults to the
        QVSP_THREADS environment variable, else serial.
    """
    nworkers = resolve_workers(workers)
    jobs = [(spec, v) for v in spec.values]
    if nworkers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            return list(pool.map(_sweep_row, jobs))
    return [_sweep_row(j) for j in jobs]


# --------------------------------------------------------------------------
# two-arm differential signal
# --------------------------------------------------------------------------


def mach_zehnder_delta(atom: AtomSpecies, scatterer: NanosphereScatterer,
                       rotation: RotationSpec, beam: GaussianBeam,
                       far_arm_distance: float, theta: float = 0.0) -> float:
    """Rotation-induced differential phase between the two arms.

    The near arm is the given beam; the far arm is the same beam
    displaced to ``far_arm_distance``, far enough that its
    rotation-induced average is negligible.  Returns the near-arm minus
    far-arm rotation-induced circular means, rad.

    Raises
    ------
    ModelingError
        If the far arm is closer than 100 x (center_x + 5 width), or its
        rotation-induced average is not below 1e-12 rad (the two-arm
        model would then be inconsistent).
    """
    near_extent = beam.center_x + 5.0 * beam.width
    if far_arm_distance <= 100.0 * near_extent:
        raise ModelingError(
            "far arm too close for a one-sided readout: "
            f"{far_arm_distance:.3e} m <= 100 x (center_x + 5 width) = "
            f"{100.0 * near_extent:.3e} m"
        )
    near = averaged_phase(atom, scatterer, rotation, beam, theta=theta)
    far_beam = replace(beam, center_x=far_arm_distance)
    far = averaged_phase(atom, scatterer, rotation, far_beam, theta=theta)
    if abs(far.phi_bar_omega) >= 1e-12:
        raise ModelingError(
            "far arm still sees the rotation: |phi_bar_omega| = "
            f"{abs(far.phi_bar_omega):.3e} rad >= 1e-12 rad"
        )
    return near.phi_bar_omega - far.phi_bar_omega
