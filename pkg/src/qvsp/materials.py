"""Dielectric and polarizability models for a Drude nanosphere and a
two-level atom.

All polarizabilities are handled in the *volume convention*: the stored
quantity is alpha/(4*pi*eps0), carrying units of m^3.  Every downstream
phase formula is then free of eps0 and of 1e-40-scale intermediates.

The sphere's dipole polarizability in this convention is

    alpha(w) = a^3 * (eps(w) - 1) / (eps(w) + 2)
             = a^3 * w_res^2 / (w_res^2 - w^2 - i*gamma*w),

with the dipole plasmon resonance at w_res = omega_p / sqrt(3).  The second
line (an exact Lorentzian) is what the closed-form frequency derivatives
are computed from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.constants import Boltzmann, c as c_light, hbar
from scipy.integrate import quad

from .errors import BracketError, ConvergenceError

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "DrudeMaterial",
    "NanosphereScatterer",
    "AtomSpecies",
    "PolarizabilityEval",
    "NA_ATOM",
    "K_DRUDE",
    "drude_epsilon",
    "sphere_polarizability",
    "effective_alpha_I_bar",
    "wick_static_response",
    "optimize_plasma_frequency",
    "temperature_factor",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used by the phase formulas (SI, CODATA).

    eps0 never appears explicitly: it is absorbed into the volume
    convention for all polarizabilities.
    """

    c: float = c_light          # speed of light, m/s
    hbar: float = hbar          # reduced Planck constant, J*s
    kB: float = Boltzmann       # Boltzmann constant, J/K


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class DrudeMaterial:
    """Drude metal: eps(w) = 1 - omega_p^2 / (w * (w + i*gamma)).

    Parameters
    ----------
    omega_p : float
        Plasma frequency, rad/s.
    gamma : float
        Relaxation rate, rad/s.  Must satisfy 0 < gamma < omega_p.
    """

    omega_p: float
    gamma: float

    def __post_init__(self):
        if not self.omega_p > 0:
            raise ValueError(f"omega_p must be positive, got {self.omega_p}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.gamma < self.omega_p:
            raise ValueError("metallic regime requires gamma < omega_p")

    @property
    def omega_res(self) -> float:
        """Dipole plasmon resonance of a small sphere, omega_p/sqrt(3)."""
        return self.omega_p / math.sqrt(3.0)


@dataclass(frozen=True)
class NanosphereScatterer:
    """Spherical Drude scatterer small enough for the dipole response.

    Parameters
    ----------
    radius : float
        Sphere radius, m.
    material : DrudeMaterial
    """

    radius: float
    material: DrudeMaterial

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class AtomSpecies:
    """Two-level atom characterized by its static response.

    Parameters
    ----------
    alpha0_vol : float
        Static volume polarizability alpha0/(4*pi*eps0), m^3.
    omega0 : float
        Transition frequency, rad/s.
    """

    alpha0_vol: float
    omega0: float

    def __post_init__(self):
        if not self.alpha0_vol > 0:
            raise ValueError("alpha0_vol must be positive")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")


@dataclass(frozen=True)
class PolarizabilityEval:
    """Sphere polarizability and its first two frequency derivatives.

    Attributes
    ----------
    value : complex
        Volume polarizability at ``at_omega``, m^3.
    d1 : complex
        d(alpha)/dw, m^3*s.
    d2 : complex
        d^2(alpha)/dw^2, m^3*s^2.
    at_omega : float
        Evaluation frequency, rad/s.
    """

    value: complex
    d1: complex
    d2: complex
    at_omega: float


# Sodium probe atom: static volume polarizability and principal transition.
NA_ATOM = AtomSpecies(alpha0_vol=2.4e-29, omega0=3.198e15)

# Potassium-like Drude metal with the plasma frequency tuned so that the
# sphere's response derivative is extremal at the sodium transition.
K_DRUDE = DrudeMaterial(omega_p=5.549e15, gamma=2.795e13)


def _epsilon_any(material: DrudeMaterial, omega: float) -> complex:
    """Drude permittivity, valid for any real omega != 0 (parity checks)."""
    return 1.0 - material.omega_p**2 / (omega * (omega + 1j * material.gamma))


def drude_epsilon(material: DrudeMaterial, omega: float) -> complex:
    """Drude dielectric function eps(w) = 1 - omega_p^2/(w*(w + i*gamma)).

    Parameters
    ----------
    material : DrudeMaterial
    omega : float
        Frequency, rad/s; must be positive.

    Returns
    -------
    complex
        eps(omega); its imaginary part is positive for omega > 0
        (passivity).

    Raises
    ------
    ValueError
        If omega is not positive.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    return _epsilon_any(material, omega)


def _lorentz_denominator(scatterer: NanosphereScatterer, omega) -> complex:
    m = scatterer.material
    wres2 = m.omega_p**2 / 3.0
    return wres2 - omega**2 - 1j * m.gamma * omega


def _alpha_any(scatterer: NanosphereScatterer, omega):
    """Volume polarizability a^3*w_res^2/D(w); valid for any real omega."""
    wres2 = scatterer.material.omega_p**2 / 3.0
    return scatterer.radius**3 * wres2 / _lorentz_denominator(scatterer, omega)


def _alpha_imag(scatterer: NanosphereScatterer, omega):
    """Im alpha(w) for w > 0, vectorized: a^3*w_res^2*gamma*w/|D|^2."""
    m = scatterer.material
    wres2 = m.omega_p**2 / 3.0
    w = np.asarray(omega, dtype=float)
    den = (wres2 - w**2) ** 2 + (m.gamma * w) ** 2
    return scatterer.radius**3 * wres2 * m.gamma * w / den


def _alpha_real(scatterer: NanosphereScatterer, omega):
    m = scatterer.material
    wres2 = m.omega_p**2 / 3.0
    w = np.asarray(omega, dtype=float)
    den = (wres2 - w**2) ** 2 + (m.gamma * w) ** 2
    return scatterer.radius**3 * wres2 * (wres2 - w**2) / den


def sphere_polarizability(
    scatterer: NanosphereScatterer, omega: float
) -> PolarizabilityEval:
    """Dipole polarizability of the sphere with analytic derivatives.

    The Drude sphere response is an exact Lorentzian
    a^3*w_res^2/(w_res^2 - w^2 - i*gamma*w), so the first and second
    frequency derivatives are evaluated in closed form (no finite
    differences).

    Parameters
    ----------
    scatterer : NanosphereScatterer
    omega : float
        Frequency, rad/s; must be positive.

    Returns
    -------
    PolarizabilityEval
        value, d1 = d(alpha)/dw and d2 = d^2(alpha)/dw^2 at ``omega``.

    Raises
    ------
    ValueError
        If omega is not positive.
    """
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega}")
    wres2 = scatterer.material.omega_p**2 / 3.0
    gamma = scatterer.material.gamma
    a3w = scatterer.radius**3 * wres2
    d = _lorentz_denominator(scatterer, omega)
    dprime = 2.0 * omega + 1j * gamma        # = -dD/dw
    value = a3w / d
    d1 = a3w * dprime / d**2
    d2 = a3w * (2.0 / d**2 + 2.0 * dprime**2 / d**3)
    return PolarizabilityEval(value=value, d1=d1, d2=d2, at_omega=omega)


def _fd5_alpha_imag(scatterer, omega, h):
    coef = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    off = np.array([-2.0, -1.0, 1.0, 2.0])
    return float(
        sum(cf * _alpha_imag(scatterer, omega + o * h) for cf, o in zip(coef, off))
        / h
    )


def _alpha_I_bar_impl(scatterer, omega0, window_halfwidths=10.0,
                      cutoff_mult=1e3, epsrel=1e-12):
    """Principal-value transform of Im alpha with windowed subtraction.

    Computes  (1/pi) * PV int_0^inf Im alpha(w) * [1/(w - w0) - 1/(w + w0)] dw
    by splitting off a window [w0 - D, w0 + D] around the pole (D = 10*gamma),
    subtracting the constant Im alpha(w0) there (its principal value over the
    symmetric window vanishes identically), and integrating the four smooth
    remainders adaptively.  The decades above the window are log-mapped and
    truncated at cutoff_mult*omega_p with the analytic 1/w^5 tail added back.

    Returns (value, error_estimate).
    """
    m = scatterer.material
    wres = m.omega_res
    wres2 = m.omega_p**2 / 3.0
    delta = min(window_halfwidths * m.gamma, 0.5 * omega0)
    lam = cutoff_mult * m.omega_p
    lo, hi = omega0 - delta, omega0 + delta

    def kernel(w):
        return _alpha_imag(scatterer, w) * (1.0 / (w - omega0) - 1.0 / (w + omega0))

    def pts(a, b):
        return [wres] if a < wres < b else None

    i1, e1 = quad(kernel, 0.0, lo, limit=800, points=pts(0.0, lo),
                  epsabs=0.0, epsrel=epsrel)
    i3, e3 = quad(lambda u: kernel(np.exp(u)) * np.exp(u),
                  np.log(hi), np.log(lam), limit=800,
                  points=[np.log(wres)] if hi < wres < lam else None,
                  epsabs=0.0, epsrel=epsrel)

    # window: regular part and the pole part with the constant subtracted
    i2a, e2a = quad(lambda w: -_alpha_imag(scatterer, w) / (w + omega0),
                    lo, hi, limit=800, points=pts(lo, hi),
                    epsabs=0.0, epsrel=epsrel)
    ai0 = float(_alpha_imag(scatterer, omega0))
    dai0 = _fd5_alpha_imag(scatterer, omega0, 1e-6 * omega0)
    window_pts = sorted({omega0} | ({wres} if lo < wres < hi else set()))

    def subtracted(w):
        if abs(w - omega0) < 1e-8 * omega0:
            return dai0
        return (float(_alpha_imag(scatterer, w)) - ai0) / (w - omega0)

    i2b, e2b = quad(subtracted, lo, hi, limit=800, points=window_pts,
                    epsabs=0.0, epsrel=epsrel)

    tail = 2.0 * omega0 * scatterer.radius**3 * wres2 * m.gamma / (4.0 * lam**4)
    value = (i1 + i2a + i2b + i3 + tail) / np.pi
    err = (e1 + e2a + e2b + e3) / np.pi
    return value, err


@lru_cache(maxsize=64)
def _alpha_I_bar_cached(scatterer, omega0, rel_tol):
    value, err = _alpha_I_bar_impl(scatterer, omega0)
    scale = abs(float(_alpha_real(scatterer, omega0)))
    if err > rel_tol * scale:
        raise ConvergenceError(
            "effective dissipative response integral did not converge: "
            f"error estimate {err:.3e} m^3 exceeds {rel_tol:.1e} * "
            f"Re alpha = {rel_tol * scale:.3e} m^3",
            error_estimate=err,
        )
    return value


def effective_alpha_I_bar(
    scatterer: NanosphereScatterer, omega0: float, rel_tol: float = 1e-10
) -> float:
    """Effective static weight of the sphere's dissipative response.

    Evaluates the principal-value frequency transform

        (1/pi) * PV int_0^inf Im alpha(w) [1/(w - w0) - 1/(w + w0)] dw,

    which folds the dissipative spectrum onto the atomic transition
    frequency w0.  It enters the quasistatic dispersive (van der Waals)
    phase on the same footing as Re alpha(w0).  For a narrow plasmon
    resonance tuned near w0 the transform approaches Re alpha(w0) itself —
    oscillator-strength conservation concentrates the spectral weight at
    the resonance — so their ratio is close to one at the few-percent
    level for the bundled potassium-like parameters.

    Parameters
    ----------
    scatterer : NanosphereScatterer
    omega0 : float
        Atomic transition frequency, rad/s; must be positive.
    rel_tol : float
        Quadrature error budget relative to Re alpha(omega0).

    Returns
    -------
    float
        The transform value, m^3.

    Raises
    ------
    ValueError
        If omega0 is not positive.
    ConvergenceError
        If the quadrature error estimate exceeds the budget.
    """
    if not omega0 > 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    return _alpha_I_bar_cached(scatterer, float(omega0), float(rel_tol))


def _alpha_I_bar_unfolded(scatterer, omega0, cutoff_mult=1e3, epsrel=1e-12):
    """Same transform without the positive-frequency fold (test support).

    Integrates (1/pi) PV int_R sgn(w) Im alpha(w)/(w - w0) dw directly over
    both half-lines, using the parity Im alpha(-w) = -Im alpha(w).
    """
    m = scatterer.material
    wres = m.omega_res
    delta = min(10.0 * m.gamma, 0.5 * omega0)
    lam = cutoff_mult * m.omega_p
    lo, hi = omega0 - delta, omega0 + delta

    def pos(w):
        return _alpha_imag(scatterer, w) / (w - omega0)

    p1, _ = quad(pos, 0.0, lo, limit=800,
                 points=[wres] if wres < lo else None, epsabs=0.0, epsrel=epsrel)
    p3, _ = quad(lambda u: pos(np.exp(u)) * np.exp(u), np.log(hi), np.log(lam),
                 limit=800, points=[np.log(wres)] if hi < wres < lam else None,
                 epsabs=0.0, epsrel=epsrel)
    ai0 = float(_alpha_imag(scatterer, omega0))
    dai0 = _fd5_alpha_imag(scatterer, omega0, 1e-6 * omega0)

    def subtracted(w):
        if abs(w - omega0) < 1e-8 * omega0:
            return dai0
        return (float(_alpha_imag(scatterer, w)) - ai0) / (w - omega0)

    p2, _ = quad(subtracted, lo, hi, limit=800,
                 points=sorted({omega0} | ({wres} if lo < wres < hi else set())),
                 epsabs=0.0, epsrel=epsrel)

    # negative half-line: sgn(w) * Im alpha(w) = +Im alpha(|w|), pole-free
    def neg(w):
        return _alpha_imag(scatterer, -w) / (w - omega0)

    n1, _ = quad(neg, -hi, 0.0, limit=800,
                 points=[-wres] if wres < hi else None, epsabs=0.0, epsrel=epsrel)
    n2, _ = quad(lambda u: neg(-np.exp(u)) * (-np.exp(u)), np.log(lam),
                 np.log(hi), limit=800,
                 points=[np.log(wres)] if hi < wres < lam else None,
                 epsabs=0.0, epsrel=epsrel)
    return (p1 + p2 + p3 + n1 + n2) / np.pi


def _alpha_I_bar_brute(scatterer, omega0, n=2_000_000, cutoff_mult=1e3):
    """Dense-grid principal-value sum (independent test oracle).

    Log-spaced grid over [1e-3*w0, cutoff*omega_p]; the pole is handled by
    subtracting Im alpha(w0) times a narrow Gaussian centered at w0, whose
    principal value vanishes by symmetry.
    """
    m = scatterer.material
    lam = cutoff_mult * m.omega_p
    w = np.logspace(np.log10(1e-3 * omega0), np.log10(lam), n)
    ai = _alpha_imag(scatterer, w)
    ai0 = float(_alpha_imag(scatterer, omega0))
    reg = ai0 * np.exp(-((w - omega0) ** 2) / (2.0 * (5.0 * m.gamma) ** 2))
    f = (ai - reg) / (w - omega0) - ai / (w + omega0)
    return float(np.trapezoid(f, w) / np.pi)


def wick_static_response(scatterer: NanosphereScatterer, omega0: float) -> float:
    """Imaginary-frequency average of the sphere response at scale omega0.

    Evaluates (2*w0/pi) * int_0^inf alpha(i*x) / (w0^2 + x^2) dx, the
    positive, dissipation-free weight that controls ground-state dispersion
    forces.  Identity used as a cross-check:  Re alpha(w0) minus the
    principal-value transform of Im alpha equals this integral.

    Returns
    -------
    float
        The average, m^3 (always positive).
    """
    if not omega0 > 0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    m = scatterer.material
    wres2 = m.omega_p**2 / 3.0
    a3w = scatterer.radius**3 * wres2

    def integrand(t):
        x = omega0 * np.tan(t)
        alpha_ix = a3w / (wres2 + x**2 + m.gamma * x)
        # dx = w0 sec^2 t dt and 1/(w0^2 + x^2) = cos^2 t / w0^2, so the
        # measure collapses to dt / w0
        return alpha_ix / omega0

    val, _ = quad(integrand, 0.0, np.pi / 2, limit=400, epsabs=0.0, epsrel=1e-12)
    return 2.0 * omega0 / np.pi * val


def optimize_plasma_frequency(
    atom: AtomSpecies,
    radius: float,
    gamma: float,
    bracket: tuple[float, float],
    rel_tol: float = 1e-6,
    max_iter: int = 200,
) -> float:
    """Plasma frequency maximizing the sphere's response-curvature at w0.

    The rotation-induced phase scales with |Re d^2(alpha)/dw^2| evaluated
    at the atomic transition; this tunes omega_p by golden-section search
    so that this curvature magnitude is maximal.

    Parameters
    ----------
    atom : AtomSpecies
        Supplies the evaluation frequency omega0.
    radius : float
        Sphere radius, m (scales the objective but not the argmax).
    gamma : float
        Drude relaxation rate, rad/s.
    bracket : (float, float)
        Search interval for omega_p, rad/s.  Must contain exactly one
        interior maximum; checked via the endpoint derivative signs.
    rel_tol : float
        Relative tolerance on the returned omega_p.
    max_iter : int
        Iteration cap for the golden-section loop.

    Returns
    -------
    float
        The maximizing plasma frequency, rad/s.

    Raises
    ------
    BracketError
        If the endpoint derivatives do not indicate an interior maximum.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0 < lo < hi):
        raise BracketError(f"need 0 < lo < hi, got ({lo}, {hi})")

    def objective(omega_p):
        sc = NanosphereScatterer(radius=radius,
                                 material=DrudeMaterial(omega_p=omega_p, gamma=gamma))
        return abs(sphere_polarizability(sc, atom.omega0).d2.real)

    h = (hi - lo) * 1e-7
    if h == 0.0 or not (objective(lo + h) > objective(lo)
                        and objective(hi - h) > objective(hi)):
        raise BracketError(
            "bracket endpoints do not slope toward an interior maximum of "
            "|Re d2(alpha)/dw2|(omega0)"
        )

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(max_iter):
        if (b - a) <= rel_tol * 0.5 * (a + b):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = objective(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = objective(x1)
    return 0.5 * (a + b)


def temperature_factor(atom: AtomSpecies, theta: float) -> float:
    """Thermal enhancement factor coth(hbar*omega0 / (2*kB*theta)).

    Parameters
    ----------
    atom : AtomSpecies
    theta : float
        Temperature, K; must be non-negative.  theta = 0 returns exactly 1.

    Returns
    -------
    float

    Raises
    ------
    ValueError
        If theta is negative.
    """
    if theta < 0:
        raise ValueError(f"temperature must be non-negative, got {theta}")
    if theta == 0.0:
        return 1.0
    x = CONSTANTS.hbar * atom.omega0 / (2.0 * CONSTANTS.kB * theta)
    # coth(x) = 1 + 2/(e^{2x} - 1); the expm1 overflow at large x cleanly
    # saturates the factor at exactly 1.
    with np.errstate(over="ignore"):
        return 1.0 + 2.0 / float(np.expm1(2.0 * x))
