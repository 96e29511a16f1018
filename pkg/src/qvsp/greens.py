"""Dyadic electromagnetic Green's functions for a point scatterer at the
origin.

Dyadics are plain complex (3, 3) numpy arrays.  Under the volume
convention for polarizabilities the free-space propagators are normalized
as field/(4*pi*eps0)-per-source-dipole-volume, which makes their entries
carry 1/m^3; a scattered propagator (leg * alpha * leg) then carries
1/m^3 as well.  The single conversion constant GREEN_NORM = (4*pi)^2
restores the normalization of a scattered-field overlap integral in the
phase formulas (it is the product of the two 4*pi's stripped from the
propagator legs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularityError
from .materials import CONSTANTS, NanosphereScatterer, _alpha_any

__all__ = [
    "GREEN_NORM",
    "Dyadic3",
    "RotationSpec",
    "free_green_vdw",
    "free_green_full",
    "nearfield_tensor",
    "nearfield_tensor_gradient",
    "delta_alpha_rotation",
    "scattered_green",
    "FdtReport",
    "fdt_check",
    "LEVI_CIVITA",
]

#: product of the two 4*pi propagator normalizations entering a
#: scattered-field overlap; multiplies the motional phase integrals.
GREEN_NORM = (4.0 * math.pi) ** 2

#: dyadics are plain (3, 3) complex arrays
Dyadic3 = np.ndarray

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class RotationSpec:
    """Angular velocity of the nanosphere about its symmetry axis.

    Parameters
    ----------
    omega_vec : (float, float, float)
        Angular velocity vector, rad/s.  Enters every phase linearly.
    """

    omega_vec: tuple[float, float, float]

    def __post_init__(self):
        v = tuple(float(x) for x in self.omega_vec)
        object.__setattr__(self, "omega_vec", v)

    @classmethod
    def about_z(cls, magnitude: float) -> "RotationSpec":
        return cls((0.0, 0.0, float(magnitude)))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.omega_vec, dtype=float)

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.omega_vec))


def _separation(r, rp):
    R = np.asarray(r, dtype=float) - np.asarray(rp, dtype=float)
    d = float(np.linalg.norm(R))
    if d < 1e-30:
        raise SingularityError("coincident evaluation points")
    return R, d


def nearfield_tensor(unit_r: np.ndarray) -> np.ndarray:
    """Bare near-field tensor 3*n n - I for a unit vector n."""
    u = np.asarray(unit_r, dtype=float)
    return 3.0 * np.outer(u, u) - np.eye(3)


def nearfield_tensor_gradient(r: np.ndarray) -> np.ndarray:
    """Analytic spatial gradient of the bare tensor 3*rhat rhat - I.

    Returns g with g[i, l, j] = d/dx_i (3 rhat_l rhat_j - delta_lj)
                          = 3 (delta_il rhat_j + delta_ij rhat_l
                               - 2 rhat_i rhat_j rhat_l) / r.
    """
    rv = np.asarray(r, dtype=float)
    rn = float(np.linalg.norm(rv))
    if rn < 1e-30:
        raise SingularityError("gradient requested at the origin")
    rh = rv / rn
    d = np.eye(3)
    return 3.0 * (
        np.einsum("il,j->ilj", d, rh)
        + np.einsum("ij,l->ilj", d, rh)
        - 2.0 * np.einsum("i,j,l->ilj", rh, rh, rh)
    ) / rn


def free_green_vdw(r: np.ndarray, rp: np.ndarray) -> Dyadic3:
    """Nonretarded (near-field) free-space propagator.

    Returns (3 Rhat Rhat - I) / (4*pi*R^3) with R = r - rp.  This is the
    zero-frequency limit of the full propagator and the workhorse kernel
    of every quasistatic phase.

    Raises
    ------
    SingularityError
        If r and rp coincide.
    """
    R, d = _separation(r, rp)
    return nearfield_tensor(R / d).astype(complex) / (4.0 * math.pi * d**3)


def free_green_full(r: np.ndarray, rp: np.ndarray, omega: float) -> Dyadic3:
    """Retarded free-space propagator at frequency omega (either sign).

    e^{ikR}/(4*pi*R^3) * [(k^2R^2 + ikR - 1) I - (k^2R^2 + 3ikR - 3)
    Rhat Rhat], k = omega/c.  Reduces to ``free_green_vdw`` as kR -> 0.

    Raises
    ------
    SingularityError
        If r and rp coincide.
    """
    R, d = _separation(r, rp)
    u = R / d
    kr = omega / CONSTANTS.c * d
    uu = np.outer(u, u)
    diag = (kr**2 + 1j * kr - 1.0) * np.eye(3)
    aniso = (kr**2 + 3j * kr - 3.0) * uu
    return np.exp(1j * kr) / (4.0 * math.pi * d**3) * (diag - aniso)


def _delta_alpha_any(scatterer, rotation, omega) -> Dyadic3:
    """Rotation correction for any real omega != 0 (parity diagnostics)."""
    wres2 = scatterer.material.omega_p**2 / 3.0
    gamma = scatterer.material.gamma
    den = wres2 - omega**2 - 1j * gamma * omega
    d1 = scatterer.radius**3 * wres2 * (2.0 * omega + 1j * gamma) / den**2
    eps_omega = np.einsum("lmn,n->lm", LEVI_CIVITA, rotation.vector)
    return 1j * d1 * eps_omega


def delta_alpha_rotation(
    scatterer: NanosphereScatterer, rotation: RotationSpec, omega: float
) -> Dyadic3:
    """Rotation-induced antisymmetric correction to the polarizability.

    delta_alpha_lm(w) = i * d(alpha)/dw * sum_n eps_lmn Omega_n: purely
    off-diagonal, antisymmetric, and exactly linear in the rotation rate.

    Parameters
    ----------
    scatterer : NanosphereScatterer
    rotation : RotationSpec
    omega : float
        Frequency, rad/s; must be positive.

    Returns
    -------
    (3, 3) complex ndarray, m^3 units.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return _delta_alpha_any(scatterer, rotation, omega)


_MODES = ("full", "vdw-propagators", "omega-part-only")


def scattered_green(
    scatterer: NanosphereScatterer,
    rotation: RotationSpec,
    r: np.ndarray,
    rp: np.ndarray,
    omega: float,
    mode: str = "full",
) -> Dyadic3:
    """One-bounce propagator through the spinning sphere at the origin.

    G(r, rp, w) = G0(r, 0) . alpha(w) . G0(0, rp), where alpha is the
    sphere's polarizability tensor including the rotation correction.

    Parameters
    ----------
    mode : {"full", "vdw-propagators", "omega-part-only"}
        "full": retarded legs, full polarizability tensor.
        "vdw-propagators": near-field legs, full tensor.
        "omega-part-only": near-field legs, rotation correction alone
        (isolates the rotation-dependent part of the response).

    Raises
    ------
    SingularityError
        If r or rp sits at the origin.
    ValueError
        For an unknown mode.

    Notes
    -----
    Negative omega is accepted (the closed-form response extends to
    w < 0) so that frequency-parity diagnostics can probe both signs.
    """
    if mode not in _MODES:
        raise ValueError(f"mode must be one of {_MODES}, got {mode!r}")
    origin = np.zeros(3)
    delta = _delta_alpha_any(scatterer, rotation, omega)
    if mode == "omega-part-only":
        alpha_tensor = delta
    else:
        alpha_tensor = _alpha_any(scatterer, omega) * np.eye(3) + delta
    if mode == "full":
        leg_in = free_green_full(r, origin, omega)
        leg_out = free_green_full(origin, rp, omega)
    else:
        leg_in = free_green_vdw(r, origin)
        leg_out = free_green_vdw(origin, rp)
    return leg_in @ alpha_tensor @ leg_out


@dataclass(frozen=True)
class FdtReport:
    """Frequency-parity diagnostics of the scattered propagator trace.

    re_even_dev / im_odd_dev: relative violation of Re-trace evenness and
    Im-trace oddness between +omega and -omega.  hadamard_fold_dev:
    relative jump of the sign-folded fluctuation trace 2*sgn(w)*Im Tr G
    across w = 0+.
    """

    re_even_dev: float
    im_odd_dev: float
    hadamard_fold_dev: float

    @property
    def max_deviation(self) -> float:
        return max(self.re_even_dev, self.im_odd_dev, self.hadamard_fold_dev)


def fdt_check(
    scatterer: NanosphereScatterer,
    rotation: RotationSpec,
    r: np.ndarray,
    rp: np.ndarray,
    omega: float,
) -> FdtReport:
    """Verify the parity structure linking response and fluctuations.

    The fluctuation (Hadamard) kernel is 2*sgn(w) Im of the response
    kernel; consistency requires Re Tr G even in w and Im Tr G odd.  Both
    are checked numerically at +-omega, along with continuity of the
    sign-folded fluctuation trace across w -> 0.

    Returns
    -------
    FdtReport
    """
    if omega == 0:
        raise ValueError("parity check needs omega != 0")
    w = abs(float(omega))
    tp = np.trace(scattered_green(scatterer, rotation, r, rp, w, mode="full"))
    tm = np.trace(scattered_green(scatterer, rotation, r, rp, -w, mode="full"))

    def rel(num, den):
        scale = max(abs(den), 1e-300)
        return abs(num) / scale

    re_dev = rel(tp.real - tm.real, tp.real)
    im_dev = rel(tp.imag + tm.imag, tp.imag)

    eps = 1e-9 * w
    tpe = np.trace(scattered_green(scatterer, rotation, r, rp, eps, mode="full"))
    tme = np.trace(scattered_green(scatterer, rotation, r, rp, -eps, mode="full"))
    had_p = 2.0 * tpe.imag
    had_m = -2.0 * tme.imag
    had_dev = rel(had_p - had_m, had_p if had_p != 0 else 1.0)
    return FdtReport(re_even_dev=re_dev, im_odd_dev=im_dev,
                     hadamard_fold_dev=had_dev)
