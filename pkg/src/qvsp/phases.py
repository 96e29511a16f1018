"""Interferometric phase functionals for an atom passing a spinning
nanosphere.

Implemented contributions, all in radians and all in the volume
convention for polarizabilities (m^3):

* rotation-induced geometric phase along a single path (closed forms for
  circles and infinite straight lines, generic sampled-path quadrature,
  and an independent finite-difference pipeline built on the dyadic
  propagators);
* its leading retardation correction;
* the quasistatic dispersive (van der Waals) phase;
* the cross-path (non-local) rotation-induced phase for a two-path
  interferometer;
* the thermal enhancement factor and the single-line total breakdown.

Sign and orientation conventions: the nanosphere spins at the origin
with angular velocity ``rotation.vector``; paths are oriented by their
sample order; the rotation-induced phase is odd under path reversal and
exactly linear in the rotation rate, while the dispersive phase is even
under reversal and rotation-independent.

All final quadrature reductions use exact floating-point summation
(``math.fsum``), which makes the reversal sign flip and the rotation
linearity bit-exact, not merely approximate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    GeometryError,
    SingularityError,
    VdwRegimeWarning,
)
from .greens import GREEN_NORM, LEVI_CIVITA, RotationSpec, scattered_green
from .materials import (
    CONSTANTS,
    AtomSpecies,
    NanosphereScatterer,
    effective_alpha_I_bar,
    sphere_polarizability,
    temperature_factor,
)

__all__ = [
    "Path",
    "PhaseBreakdown",
    "SagnacLength",
    "sagnac_coupling",
    "sagnac_length",
    "qvsp_local_numeric",
    "qvsp_circle_closed",
    "qvsp_segment_closed",
    "qvsp_local_from_green",
    "qvsp_retardation",
    "qvsp_retardation_line_closed",
    "vdw_phase_quasistatic",
    "vdw_line_closed",
    "vdw_atom_atom_check",
    "qvsp_nonlocal",
    "qvsp_nonlocal_lines_closed",
    "total_phase_line",
]


# --------------------------------------------------------------------------
# paths
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Path:
    """Oriented, sampled trajectory of the atom.

    Parameters
    ----------
    positions : (N, 3) ndarray
        Sample positions, m.  Stored read-only.
    velocities : (N, 3) ndarray, optional
        Sample velocities, m/s.  Required by the dynamical (time-integral)
        phases; the geometric phases fall back to a chord rule when absent.
    times : (N,) ndarray, optional
        Strictly increasing sample times, s.
    parametrization : {"uniform-time", "arc-length"}
        How the samples were generated (metadata for quadrature choices).
    closed : bool
        True for a loop; the final sample must then *not* repeat the first
        (periodic quadrature supplies the wrap-around segment).
    orientation : int
        +1 for the constructed direction, flipped by :meth:`reversed`.
    analytic : str
        Tag for paths with a known closed form ("circle", "segment",
        "generic"); analytic-tagged paths get a strict quadrature
        error budget.
    """

    positions: np.ndarray
    velocities: np.ndarray | None = None
    times: np.ndarray | None = None
    parametrization: str = "uniform-time"
    closed: bool = False
    orientation: int = 1
    analytic: str = "generic"

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 2:
            raise ValueError("positions must be an (N >= 2, 3) array")
        if not np.all(np.linalg.norm(np.diff(pos, axis=0), axis=1) > 0.0):
            raise ValueError("consecutive path samples must be distinct")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if self.velocities is not None:
            vel = np.array(self.velocities, dtype=float)
            if vel.shape != pos.shape:
                raise ValueError("velocities must match positions in shape")
            vel.setflags(write=False)
            object.__setattr__(self, "velocities", vel)
        if self.times is not None:
            t = np.array(self.times, dtype=float)
            if t.shape != (pos.shape[0],):
                raise ValueError("times must be an (N,) array")
            if not np.all(np.diff(t) > 0.0):
                raise ValueError("times must be strictly increasing")
            t.setflags(write=False)
            object.__setattr__(self, "times", t)
        if self.parametrization not in ("uniform-time", "arc-length"):
            raise ValueError(
                "parametrization must be 'uniform-time' or 'arc-length'"
            )

    def __len__(self) -> int:
        return self.positions.shape[0]

    @classmethod
    def circle(
        cls,
        radius: float,
        n: int = 4096,
        sense: int = 1,
        speed: float = 1.0,
        analytic: str = "circle",
    ) -> "Path":
        """Closed circular loop of given radius in the z = 0 plane.

        Parameters
        ----------
        radius : float
            Circle radius, m.
        n : int
            Number of samples (the endpoint is excluded; periodic
            quadrature closes the loop).  Even n enables the coarse-grid
            error estimate.
        sense : int
            +1 counterclockwise (as seen from +z), -1 clockwise.
        speed : float
            Traversal speed, m/s (must be positive; the geometric phase
            does not depend on it).
        """
        if radius <= 0:
            raise ValueError("radius must be positive")
        if speed <= 0:
            raise ValueError("speed must be positive")
        if sense not in (1, -1):
            raise ValueError("sense must be +1 or -1")
        period = 2.0 * math.pi * radius / speed
        t = np.arange(n) * (period / n)
        ang = sense * (speed / radius) * t
        pos = radius * np.column_stack([np.cos(ang), np.sin(ang),
                                        np.zeros(n)])
        vel = sense * speed * np.column_stack([-np.sin(ang), np.cos(ang),
                                               np.zeros(n)])
        return cls(positions=pos, velocities=vel, times=t,
                   parametrization="uniform-time", closed=True,
                   orientation=1, analytic=analytic)

    @classmethod
    def segment(
        cls,
        x_offset: float,
        z_offset: float,
        length: float,
        speed: float,
        n: int = 4001,
        direction: int = 1,
        analytic: str = "segment",
    ) -> "Path":
        """Straight segment parallel to the y axis at (x_offset, z_offset).

        Runs from y = -length/2 to +length/2 for direction = +1 (reversed
        for -1) at constant speed.  Odd n enables Richardson refinement.
        """
        if length <= 0:
            raise ValueError("length must be positive")
        if speed <= 0:
            raise ValueError("speed must be positive")
        if direction not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        ys = np.linspace(-length / 2.0, length / 2.0, n)
        if direction < 0:
            ys = ys[::-1]
        pos = np.column_stack([np.full(n, float(x_offset)), ys,
                               np.full(n, float(z_offset))])
        t = np.arange(n) * (length / (n - 1) / speed)
        vel = np.tile([0.0, direction * speed, 0.0], (n, 1))
        return cls(positions=pos, velocities=vel, times=t,
                   parametrization="uniform-time", closed=False,
                   orientation=1, analytic=analytic)

    @classmethod
    def from_samples(
        cls,
        positions,
        velocities=None,
        times=None,
        closed: bool = False,
        parametrization: str = "uniform-time",
        analytic: str = "generic",
    ) -> "Path":
        """Wrap explicit sample arrays as a path."""
        return cls(positions=positions, velocities=velocities, times=times,
                   parametrization=parametrization, closed=closed,
                   orientation=1, analytic=analytic)

    def reversed(self) -> "Path":
        """The same geometric path traversed in the opposite direction.

        Uniform time grids are reused unchanged (the reversed traversal is
        re-clocked on the identical grid), which keeps the sign flip of
        the rotation-induced phases bit-exact.
        """
        pos = self.positions[::-1]
        vel = None if self.velocities is None else -self.velocities[::-1]
        t = None
        if self.times is not None:
            t = (self.times if _is_uniform(self.times)
                 else self.times[-1] - self.times[::-1])
        return Path(positions=pos, velocities=vel, times=t,
                    parametrization=self.parametrization, closed=self.closed,
                    orientation=-self.orientation, analytic=self.analytic)


# --------------------------------------------------------------------------
# quadrature helpers (exactly summed)
# --------------------------------------------------------------------------


def _fsum(a) -> float:
    return math.fsum(np.asarray(a, dtype=float).ravel())


def _trapezoid_weights(t: np.ndarray) -> np.ndarray:
    w = np.empty_like(t)
    w[0] = 0.5 * (t[1] - t[0])
    w[-1] = 0.5 * (t[-1] - t[-2])
    w[1:-1] = 0.5 * (t[2:] - t[:-2])
    return w


def _is_uniform(t: np.ndarray) -> bool:
    d = np.diff(t)
    return bool(np.all(np.abs(d - d[0]) <= 1e-9 * np.abs(d[0])))


def _integrate_time_series(samples: np.ndarray, t: np.ndarray,
                           closed: bool) -> tuple[float, float]:
    """Quadrature of sampled f(t) dt with a coarse-grid error estimate.

    Closed paths use the periodic rectangle/trapezoid rule (superconvergent
    for smooth loops); open uniform paths get one Richardson extrapolation.
    Returns (value, error_estimate).
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if closed:
        h = (t[-1] - t[0]) / (n - 1)
        fine = _fsum(samples) * h
        coarse = _fsum(samples[::2]) * (2.0 * h)
        return fine, abs(fine - coarse) / 3.0
    w = _trapezoid_weights(t)
    fine = _fsum(samples * w)
    idx = np.r_[np.arange(0, n - 1, 2), n - 1]
    coarse = _fsum(samples[idx] * _trapezoid_weights(t[idx]))
    if n % 2 == 1 and _is_uniform(t):
        return fine + (fine - coarse) / 3.0, abs(fine - coarse) / 3.0
    return fine, abs(fine - coarse)


def _integrate_chord(field: np.ndarray, positions: np.ndarray,
                     closed: bool) -> tuple[float, float]:
    """Line integral of a sampled vector field along the polygonal path.

    Uses the rearranged chord (secant-trapezoid) rule: each sample is
    dotted with half the chord joining its neighbours.  One Richardson
    step against the stride-2 subsample supplies value and error.
    """

    def polygon(f, p):
        if closed:
            nxt = np.roll(p, -1, axis=0)
            prv = np.roll(p, 1, axis=0)
            return _fsum(np.einsum("ij,ij->i", f, 0.5 * (nxt - prv)))
        inner = np.einsum("ij,ij->i", f[1:-1], 0.5 * (p[2:] - p[:-2]))
        ends = (f[0] @ (0.5 * (p[1] - p[0]))
                + f[-1] @ (0.5 * (p[-1] - p[-2])))
        return _fsum(np.r_[inner, ends])

    fine = polygon(field, positions)
    if closed:
        coarse = polygon(field[::2], positions[::2])
    else:
        n = positions.shape[0]
        idx = np.r_[np.arange(0, n - 1, 2), n - 1]
        coarse = polygon(field[idx], positions[idx])
    return fine + (fine - coarse) / 3.0, abs(fine - coarse) / 3.0


def _path_integral_of_field(field: np.ndarray, path: Path
                            ) -> tuple[float, float]:
    """∫ field · dr along the path; time form when velocities are known."""
    if path.velocities is not None and path.times is not None:
        samples = np.einsum("ij,ij->i", field, path.velocities)
        return _integrate_time_series(samples, path.times, path.closed)
    return _integrate_chord(field, path.positions, path.closed)


# --------------------------------------------------------------------------
# validation shared by the quasistatic path ops
# --------------------------------------------------------------------------

#: fraction of the reduced transition wavelength beyond which the
#: quasistatic (nonretarded) kernels are advisory-flagged.
_QUASISTATIC_SAFE_FRACTION = 0.2


def _validate_path(atom: AtomSpecies, scatterer: NanosphereScatterer,
                   path: Path, warn: bool = True) -> np.ndarray:
    """Radii of the path samples, with geometry and regime checks."""
    r = np.linalg.norm(path.positions, axis=1)
    if np.any(r < 1e-15):
        raise SingularityError("path touches the scatterer at the origin")
    if np.any(r <= scatterer.radius):
        raise GeometryError(
            "path enters the scatterer: min |r| = "
            f"{r.min():.3e} m <= radius {scatterer.radius:.3e} m"
        )
    if warn and r.max() > _QUASISTATIC_SAFE_FRACTION * CONSTANTS.c / atom.omega0:
        warnings.warn(
            VdwRegimeWarning(
                "path extends beyond the conservative quasistatic range "
                f"(max |r| = {r.max():.3e} m > "
                f"{_QUASISTATIC_SAFE_FRACTION:.1f} * c/omega0); nonretarded "
                "kernels are used regardless"
            ),
            stacklevel=3,
        )
    return r


def _enforce_analytic_budget(path: Path, value: float, err: float) -> None:
    if path.analytic == "generic" or value == 0.0:
        return
    if err > 1e-8 * abs(value):
        raise ConvergenceError(
            "quadrature on an analytic-tagged path missed the 1e-8 relative "
            f"budget (estimate {err:.2e} vs value {value:.6e}); increase the "
            "sample count",
            error_estimate=err,
        )


# --------------------------------------------------------------------------
# coupling strength and characteristic length
# --------------------------------------------------------------------------


def sagnac_coupling(atom: AtomSpecies, scatterer: NanosphereScatterer,
                    rotation: RotationSpec) -> float:
    """Signed strength w0 * alpha0V * Re d2(alpha)(w0) * |Omega|, m^6.

    The sixth root of its magnitude is the characteristic length at which
    the rotation-induced phase reaches O(1); its sign is the sign of the
    response-curvature Re d^2(alpha)/dw^2 at the atomic frequency.
    """
    d2r = sphere_polarizability(scatterer, atom.omega0).d2.real
    return atom.omega0 * atom.alpha0_vol * d2r * rotation.magnitude


@dataclass(frozen=True)
class SagnacLength:
    """Characteristic length scale of the rotation-induced phase.

    Attributes
    ----------
    ell_omega : float
        |w0 * alpha0V * Re d2(alpha)(w0) * Omega|^(1/6), m.  Its sixth
        power is linear in the rotation rate.
    """

    ell_omega: float


def sagnac_length(atom: AtomSpecies, scatterer: NanosphereScatterer,
                  rotation: RotationSpec) -> SagnacLength:
    """Characteristic length: |coupling|^(1/6)."""
    return SagnacLength(
        ell_omega=abs(sagnac_coupling(atom, scatterer, rotation)) ** (1.0 / 6.0)
    )


def _coupling_planar(atom, scatterer, rotation) -> float:
    """w0 * alpha0V * Re d2 * Omega_z — the signed coupling entering every
    closed form for paths in the z = 0 plane."""
    d2r = sphere_polarizability(scatterer, atom.omega0).d2.real
    return atom.omega0 * atom.alpha0_vol * d2r * rotation.omega_vec[2]


# --------------------------------------------------------------------------
# rotation-induced local phase
# --------------------------------------------------------------------------


def qvsp_local_numeric(atom: AtomSpecies, scatterer: NanosphereScatterer,
                       rotation: RotationSpec, path: Path) -> float:
    """Rotation-induced geometric phase along one path, by quadrature.

    Evaluates (9/2) * w0 * alpha0V * Re d2(alpha)(w0) *
    ∮ dr · (Omega × r) / r^8 over the sampled path.  The integral is
    purely geometric: independent of the traversal speed, odd under path
    reversal, and exactly linear in Omega.

    Parameters
    ----------
    atom, scatterer, rotation
        Probe atom, spinning sphere, and its angular velocity.
    path : Path
        Sampled trajectory; every sample must lie outside the sphere.

    Returns
    -------
    float
        Phase, rad.

    Raises
    ------
    SingularityError
        If the path touches the origin.
    GeometryError
        If any sample lies inside the scatterer.
    ConvergenceError
        If an analytic-tagged path misses the 1e-8 quadrature budget.

    Warns
    -----
    VdwRegimeWarning
        If the path extends beyond the conservative nonretarded range.
    """
    r = _validate_path(atom, scatterer, path)
    field = np.cross(np.broadcast_to(rotation.vector, path.positions.shape),
                     path.positions) / r[:, None] ** 8
    value, err = _path_integral_of_field(field, path)
    _enforce_analytic_budget(path, value, err)
    d2r = sphere_polarizability(scatterer, atom.omega0).d2.real
    return 4.5 * atom.omega0 * atom.alpha0_vol * d2r * value


def qvsp_circle_closed(atom: AtomSpecies, scatterer: NanosphereScatterer,
                       rotation: RotationSpec, radius: float,
                       sense: int = 1) -> float:
    """Closed form of the rotation-induced phase for a circular loop.

    For a circle of radius R in the z = 0 plane: sense * 9π * (w0 alpha0V
    Re d2 * Omega_z) / R^6, with sense = +1 for counterclockwise traversal
    (co-rotating with a +z rotation axis).

    Raises
    ------
    GeometryError
        If the circle does not enclose the sphere at a safe distance
        (radius <= scatterer radius).
    """
    if sense not in (1, -1):
        raise ValueError("sense must be +1 or -1")
    if radius <= scatterer.radius:
        raise GeometryError(
            f"circle radius {radius:.3e} m must exceed sphere radius "
            f"{scatterer.radius:.3e} m"
        )
    return sense * 9.0 * math.pi * _coupling_planar(atom, scatterer,
                                                    rotation) / radius**6


def qvsp_segment_closed(atom: AtomSpecies, scatterer: NanosphereScatterer,
                        rotation: RotationSpec, x1: float, z1: float
                        ) -> float:
    """Infinite-line limit of the rotation-induced phase for a straight path.

    For a line parallel to y at transverse offset (x1, z1), traversed
    toward +y:  45π/32 * w0 alpha0V Re d2 * (Omega_z x1 − Omega_x z1)
    / (x1² + z1²)^{7/2}.  Odd in x1 (for a +z rotation axis) and equal to
    the L → ∞ limit of the finite-segment quadrature.

    Raises
    ------
    SingularityError
        If (x1, z1) = (0, 0).
    """
    rp2 = x1 * x1 + z1 * z1
    if rp2 == 0.0:
        raise SingularityError("straight line through the origin")
    d2r = sphere_polarizability(scatterer, atom.omega0).d2.real
    lever = rotation.omega_vec[2] * x1 - rotation.omega_vec[0] * z1
    return (45.0 * math.pi / 32.0) * atom.omega0 * atom.alpha0_vol * d2r \
        * lever / rp2**3.5


_GREEN_PARTS = ("total", "dipole", "field")


def qvsp_local_from_green(atom: AtomSpecies, scatterer: NanosphereScatterer,
                          rotation: RotationSpec, path: Path,
                          part: str = "total") -> float:
    """Rotation-induced phase via finite differences on the propagators.

    Independent pipeline for the same quantity as
    :func:`qvsp_local_numeric`: integrates

        (4π)² * (w0 alpha0V / 2) * ∫ dt  v · ∇_r' ∂_w Im Tr δG(r, r', w)

    with r' = r(t) and w = w0, where δG is the one-bounce propagator
    carrying only the rotation correction (nonretarded legs), and both
    derivatives are 5-point central finite differences with steps
    h_w = 1e-5 * w0 and h_x = 1e-5 * |r|.

    Parameters
    ----------
    part : {"total", "dipole", "field"}
        "total": the full phase.  "dipole": the source-fluctuation half,
        evaluated on the positive-frequency branch with half the
        prefactor.  "field": the field-fluctuation half, evaluated on the
        mirrored (negative-frequency) branch; reality of the time-domain
        response makes it equal to the dipole half, so each is half the
        total — an independently computed structural identity.

    Returns
    -------
    float
        Phase, rad.

    Raises
    ------
    ValueError
        For an unknown part, or a path without velocities and times.
    SingularityError, GeometryError
        As for :func:`qvsp_local_numeric`.
    """
    if part not in _GREEN_PARTS:
        raise ValueError(f"part must be one of {_GREEN_PARTS}, got {part!r}")
    if path.velocities is None or path.times is None:
        raise ValueError("the finite-difference pipeline needs a path with "
                         "velocities and times")
    radii = _validate_path(atom, scatterer, path)
    w0 = atom.omega0
    center_w = w0 if part in ("total", "dipole") else -w0
    scale = 1.0 if part == "total" else 0.5

    hw = 1e-5 * w0
    c5 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    off = np.array([-2.0, -1.0, 1.0, 2.0])

    def dw_im_trace(r_fixed, rp):
        acc = 0.0
        for cw, ow in zip(c5, off):
            g = scattered_green(scatterer, rotation, r_fixed, rp,
                                center_w + ow * hw, mode="omega-part-only")
            acc += cw * np.trace(g).imag
        return acc / hw

    samples = np.empty(len(path))
    for k, (r_k, v_k, rnorm) in enumerate(zip(path.positions,
                                              path.velocities, radii)):
        hx = 1e-5 * rnorm
        if hx == 0.0:
            raise SingularityError("finite-difference step underflow at the "
                                   "origin")
        grad = np.zeros(3)
        for ax in range(3):
            for co, o in zip(c5, off):
                rp = np.array(r_k)
                rp[ax] += o * hx
                grad[ax] += co * dw_im_trace(r_k, rp)
            grad[ax] /= hx
        samples[k] = float(v_k @ grad)

    value, _ = _integrate_time_series(samples, path.times, path.closed)
    return scale * GREEN_NORM * (w0 * atom.alpha0_vol / 2.0) * value


def qvsp_retardation(atom: AtomSpecies, scatterer: NanosphereScatterer,
                     rotation: RotationSpec, path: Path) -> float:
    """Leading retardation correction to the rotation-induced phase.

    Evaluates 3 * w0² * alpha0V * Re d(alpha)/dw (w0) / c² *
    ∮ dr · (Omega × r) / r^6.  Same symmetries and errors as
    :func:`qvsp_local_numeric`; at nanosphere-experiment scales its
    magnitude is below 1e-2 of the local phase.
    """
    r = _validate_path(atom, scatterer, path)
    field = np.cross(np.broadcast_to(rotation.vector, path.positions.shape),
                     path.positions) / r[:, None] ** 6
    value, err = _path_integral_of_field(field, path)
    _enforce_analytic_budget(path, value, err)
    d1r = sphere_polarizability(scatterer, atom.omega0).d1.real
    return 3.0 * atom.omega0**2 * atom.alpha0_vol * d1r / CONSTANTS.c**2 \
        * value


def qvsp_retardation_line_closed(atom: AtomSpecies,
                                 scatterer: NanosphereScatterer,
                                 rotation: RotationSpec, x1: float,
                                 z1: float) -> float:
    """Infinite-line closed form of the retardation correction.

    9π/8 * w0² alpha0V Re d1 * (Omega_z x1 − Omega_x z1) / (c² r⊥^5).
    """
    rp2 = x1 * x1 + z1 * z1
    if rp2 == 0.0:
        raise SingularityError("straight line through the origin")
    d1r = sphere_polarizability(scatterer, atom.omega0).d1.real
    lever = rotation.omega_vec[2] * x1 - rotation.omega_vec[0] * z1
    return (9.0 * math.pi / 8.0) * atom.omega0**2 * atom.alpha0_vol * d1r \
        * lever / (CONSTANTS.c**2 * rp2**2.5)


# --------------------------------------------------------------------------
# quasistatic dispersive (van der Waals) phase
# --------------------------------------------------------------------------


def _vdw_kernel_coefficient(omega0: float, alpha0_vol: float,
                            weight_real: float, weight_ibar: float) -> float:
    """Coefficient of the 1/r^6 dispersive kernel: (3/2) w0 a0V (wR + wI)."""
    return 1.5 * omega0 * alpha0_vol * (weight_real + weight_ibar)


def _vdw_coefficient(atom: AtomSpecies, scatterer: NanosphereScatterer
                     ) -> float:
    """Dispersive kernel coefficient for the sphere: the dispersive and
    dissipative spectral weights both evaluated at the atomic frequency."""
    alpha_r = sphere_polarizability(scatterer, atom.omega0).value.real
    alpha_ibar = effective_alpha_I_bar(scatterer, atom.omega0)
    return _vdw_kernel_coefficient(atom.omega0, atom.alpha0_vol,
                                   alpha_r, alpha_ibar)


def vdw_phase_quasistatic(atom: AtomSpecies, scatterer: NanosphereScatterer,
                          path: Path) -> float:
    """Quasistatic dispersive phase accumulated along a moving path.

    Evaluates (3/2) * w0 * alpha0V * (Re alpha(w0) + alpha_I_bar) *
    ∫ dt / r(t)^6 — a dynamical phase: inversely proportional to the
    speed, independent of the rotation, and invariant under path
    reversal.

    Parameters
    ----------
    path : Path
        Must be time-parametrized (times present); zero dwell speed is
        rejected at construction.

    Raises
    ------
    ValueError
        If the path carries no time samples.
    SingularityError, GeometryError
        As for :func:`qvsp_local_numeric`.

    Warns
    -----
    VdwRegimeWarning
        If the path extends beyond the conservative nonretarded range.
    """
    if path.times is None:
        raise ValueError("the dispersive phase is a time integral; the path "
                         "must carry sample times")
    r = _validate_path(atom, scatterer, path)
    value, _ = _integrate_time_series(1.0 / r**6, path.times, path.closed)
    return _vdw_coefficient(atom, scatterer) * value


def vdw_line_closed(atom: AtomSpecies, scatterer: NanosphereScatterer,
                    x1: float, z1: float, speed: float) -> float:
    """Infinite-line closed form of the dispersive phase.

    (9π/16) * w0 alpha0V (Re alpha(w0) + alpha_I_bar) / (v r⊥^5).
    """
    if speed <= 0:
        raise ValueError("speed must be positive")
    rp2 = x1 * x1 + z1 * z1
    if rp2 == 0.0:
        raise SingularityError("straight line through the origin")
    return _vdw_coefficient(atom, scatterer) * (3.0 * math.pi / 8.0) \
        / (speed * rp2**2.5)


def vdw_atom_atom_check(atom: AtomSpecies) -> float:
    """Dispersive 1/r^6 kernel coefficient with a twin ground-state atom.

    Replaces the sphere's two spectral weights by the atom's own
    (alpha0V/4 each) in the same kernel factory, giving exactly
    (3/4) * w0 * alpha0V² — the known two-atom dispersive coefficient.
    Units: rad · m^6 / s (multiplies ∫ dt / r^6).
    """
    quarter = atom.alpha0_vol / 4.0
    return _vdw_kernel_coefficient(atom.omega0, atom.alpha0_vol,
                                   quarter, quarter)


# --------------------------------------------------------------------------
# cross-path (non-local) rotation-induced phase
# --------------------------------------------------------------------------


def qvsp_nonlocal(atom: AtomSpecies, scatterer: NanosphereScatterer,
                  rotation: RotationSpec, path_alpha: Path,
                  path_beta: Path) -> float:
    """Cross-path rotation-induced phase between two synchronized paths.

    Evaluates (w0 alpha0V Re d2 / 2) * ∫ dt  ξ(t) · Omega /
    (r_a(t)³ r_b(t)⁴), where the geometric vector is the tensor
    contraction

        ξ_m = r_b * ε_klm  v_b,i  T⁰_jk(r̂_a)  ∂_i T⁰_lj(r_b),

    built from the bare near-field tensor T⁰ = 3 r̂ r̂ − 1 and its
    analytic gradient.  A two-path interferometer reports the
    antisymmetrized combination: (this value for paths 1,2) minus (the
    value for paths 2,1).

    Parameters
    ----------
    path_alpha : Path
        The path whose position enters through T⁰(r̂_a) and 1/r_a³.
    path_beta : Path
        The path supplying position, velocity, and the tensor gradient;
        must carry velocities and share path_alpha's exact time samples.

    Raises
    ------
    ValueError
        For missing times/velocities or mismatched time grids.
    SingularityError, GeometryError
        If either path touches the origin / enters the sphere.
    """
    if path_alpha.times is None or path_beta.times is None:
        raise ValueError("both paths must be time-parametrized")
    if not np.array_equal(path_alpha.times, path_beta.times):
        raise ValueError("cross-path quadrature requires a common clock: "
                         "time grids differ")
    if path_beta.velocities is None:
        raise ValueError("path_beta must carry velocities")
    ra = _validate_path(atom, scatterer, path_alpha)
    rb = _validate_path(atom, scatterer, path_beta, warn=False)

    ua = path_alpha.positions / ra[:, None]
    ub = path_beta.positions / rb[:, None]
    eye = np.eye(3)
    t0a = 3.0 * np.einsum("nj,nk->njk", ua, ua) - eye
    grad = 3.0 * (
        np.einsum("il,nj->nilj", eye, ub)
        + np.einsum("ij,nl->nilj", eye, ub)
        - 2.0 * np.einsum("ni,nj,nl->nilj", ub, ub, ub)
    ) / rb[:, None, None, None]
    contracted = np.einsum("ni,njk,nilj->nkl", path_beta.velocities, t0a,
                           grad, optimize=True)
    xi = rb[:, None] * np.einsum("klm,nkl->nm", LEVI_CIVITA, contracted)
    samples = (xi @ rotation.vector) / (ra**3 * rb**4)

    closed = path_alpha.closed and path_beta.closed
    value, _ = _integrate_time_series(samples, path_alpha.times, closed)
    d2r = sphere_polarizability(scatterer, atom.omega0).d2.real
    return 0.5 * atom.omega0 * atom.alpha0_vol * d2r * value


def qvsp_nonlocal_lines_closed(atom: AtomSpecies,
                               scatterer: NanosphereScatterer,
                               rotation: RotationSpec, x1: float,
                               alpha_index: int = 1) -> float:
    """Closed form of the cross-path phase for symmetric parallel lines.

    For infinite lines at x = ±x1 (z = 0) traversed toward +y with a
    common clock and rotation along z:

        −27π (−1)^{alpha_index+1} * (w0 alpha0V Re d2 * Omega_z) / (64 x1⁶),

    where alpha_index = 1 places the T⁰(r̂_a) leg on the +x1 line.  The
    interferometric combination (index 1 minus index 2) is then
    −27π/32 times the planar coupling over x1⁶.
    """
    if alpha_index not in (1, 2):
        raise ValueError("alpha_index must be 1 or 2")
    if x1 == 0.0:
        raise SingularityError("coincident lines through the origin")
    sgn = 1.0 if alpha_index == 1 else -1.0
    return -27.0 * math.pi * sgn * _coupling_planar(atom, scatterer,
                                                    rotation) / (64.0 * x1**6)


# --------------------------------------------------------------------------
# assembled single-line breakdown
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseBreakdown:
    """Per-contribution record of the interferometric phase, rad.

    total = temperature_factor * (qvsp_local + qvsp_retardation)
            + qvsp_nonlocal + vdw_quasistatic

    — the thermal factor multiplies only the rotation-induced local
    terms.  ``blocked`` marks transverse offsets inside the sphere's
    geometric cross-section (values are then formal continuations).
    """

    qvsp_local: float
    qvsp_retardation: float
    vdw_quasistatic: float
    qvsp_nonlocal: float
    temperature_factor: float
    total: float
    blocked: bool = False

    @classmethod
    def assemble(cls, qvsp_local: float, qvsp_retardation: float,
                 vdw_quasistatic: float, qvsp_nonlocal: float = 0.0,
                 temperature_factor: float = 1.0,
                 blocked: bool = False) -> "PhaseBreakdown":
        """Build the record with the total computed from its invariant."""
        total = temperature_factor * (qvsp_local + qvsp_retardation) \
            + qvsp_nonlocal + vdw_quasistatic
        return cls(qvsp_local=qvsp_local, qvsp_retardation=qvsp_retardation,
                   vdw_quasistatic=vdw_quasistatic,
                   qvsp_nonlocal=qvsp_nonlocal,
                   temperature_factor=temperature_factor, total=total,
                   blocked=blocked)


def total_phase_line(atom: AtomSpecies, scatterer: NanosphereScatterer,
                     rotation: RotationSpec, x: float, z: float, v: float,
                     theta: float = 0.0) -> PhaseBreakdown:
    """Closed-form phase breakdown for an infinite straight trajectory.

    The trajectory runs parallel to y at transverse offset (x, z) with
    speed v toward +y.  Offsets inside the sphere's cross-section are
    flagged blocked rather than rejected (the beam-averaging layer
    assigns them zero weight).

    Parameters
    ----------
    x, z : float
        Transverse offsets, m; (0, 0) is rejected.
    v : float
        Speed, m/s; must be positive.
    theta : float
        Temperature, K (applied to the rotation-induced local terms only).

    Returns
    -------
    PhaseBreakdown
    """
    if v <= 0:
        raise ValueError("speed must be positive")
    rp2 = x * x + z * z
    if rp2 == 0.0:
        raise SingularityError("trajectory through the origin")
    return PhaseBreakdown.assemble(
        qvsp_local=qvsp_segment_closed(atom, scatterer, rotation, x, z),
        qvsp_retardation=qvsp_retardation_line_closed(atom, scatterer,
                                                      rotation, x, z),
        vdw_quasistatic=vdw_line_closed(atom, scatterer, x, z, v),
        qvsp_nonlocal=0.0,
        temperature_factor=temperature_factor(atom, theta),
        blocked=bool(rp2 <= scatterer.radius**2),
    )


def _line_closed_coefficients(atom: AtomSpecies,
                              scatterer: NanosphereScatterer,
                              rotation: RotationSpec
                              ) -> tuple[float, float, float, float, float]:
    """Coefficients for vectorized straight-line phase fields.

    Returns (c_loc, c_ret, c_vdw, omega_x, omega_z) with

        phi_rot(x, z) = (c_loc / r⊥⁷ + c_ret / r⊥⁵) * (omega_z x − omega_x z)
        phi_vdw(x, z, v) = c_vdw / (v r⊥⁵).
    """
    pol = sphere_polarizability(scatterer, atom.omega0)
    base = atom.omega0 * atom.alpha0_vol
    c_loc = (45.0 * math.pi / 32.0) * base * pol.d2.real
    c_ret = (9.0 * math.pi / 8.0) * base * atom.omega0 * pol.d1.real \
        / CONSTANTS.c**2
    c_vdw = _vdw_coefficient(atom, scatterer) * (3.0 * math.pi / 8.0)
    return c_loc, c_ret, c_vdw, rotation.omega_vec[0], rotation.omega_vec[2]
