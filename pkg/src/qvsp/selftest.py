"""Fast invariant battery guarding the physics kernels.

Every check asserts a structural identity that the implementation must
satisfy independently of any particular experiment: response passivity
and frequency parity, analytic-derivative correctness, propagator
reciprocity, the exact cancellation that removes the quasistatic
rotation signal at coincident points, closed forms against coarse
quadratures, the two-atom reduction of the dispersive kernel, thermal
factor anchor points, and the material-optimizer invariances.

The battery runs in a few seconds; ``qvsp selftest`` exposes it on the
command line.  ``run_battery(inject_delta_alpha_sign_error=True)``
deliberately corrupts one off-diagonal element of the rotation response
before the coincident-point cancellation check — a mutation hook that
test suites use to prove the check has teeth.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import VdwRegimeWarning
from .greens import (
    RotationSpec,
    delta_alpha_rotation,
    fdt_check,
    free_green_full,
    free_green_vdw,
    scattered_green,
)
from .materials import (
    CONSTANTS,
    K_DRUDE,
    NA_ATOM,
    NanosphereScatterer,
    drude_epsilon,
    effective_alpha_I_bar,
    optimize_plasma_frequency,
    sphere_polarizability,
    temperature_factor,
    wick_static_response,
)
from .phases import (
    Path,
    qvsp_circle_closed,
    qvsp_local_numeric,
    qvsp_nonlocal,
    qvsp_nonlocal_lines_closed,
    qvsp_segment_closed,
    vdw_atom_atom_check,
)

__all__ = ["CheckResult", "run_battery"]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one invariant check.

    Attributes
    ----------
    name : str
        Stable identifier of the invariant.
    passed : bool
    max_deviation : float
        Largest violation observed, in the units stated by ``detail``
        (usually relative).
    detail : str
        One-line human-readable account including the tolerance.
    """

    name: str
    passed: bool
    max_deviation: float
    detail: str


def _result(name, dev, tol, note):
    return CheckResult(name=name, passed=bool(dev < tol),
                       max_deviation=float(dev),
                       detail=f"{note}; max deviation {dev:.3e} (tol {tol:.0e})")


_ATOM = NA_ATOM
_SPHERE = NanosphereScatterer(radius=50e-9, material=K_DRUDE)
_ROT = RotationSpec.about_z(2.0 * math.pi * 5e9)


def _check_passivity():
    grid = np.logspace(13, 17, 400)
    mins = min(
        min(drude_epsilon(_SPHERE.material, float(w)).imag for w in grid),
        min(sphere_polarizability(_SPHERE, float(w)).value.imag for w in grid),
    )
    dev = max(0.0, -mins)
    return _result("passivity", dev, 1e-300,
                   "Im eps and Im alpha positive on 400 log-spaced points"
                   if mins > 0 else "negative absorption found")


def _check_response_parity():
    r = np.array([1.2e-7, 0.0, 0.0])
    rp = np.array([0.0, 1.1e-7, 0.3e-7])
    rep = fdt_check(_SPHERE, _ROT, r, rp, _ATOM.omega0)
    dev = max(rep.re_even_dev, rep.im_odd_dev)
    return _result("response-parity", dev, 1e-12,
                   "Re Tr G even / Im Tr G odd under omega -> -omega")


def _check_fluctuation_fold():
    r = np.array([0.8e-7, 0.5e-7, -0.2e-7])
    rp = np.array([-0.3e-7, 1.0e-7, 0.6e-7])
    rep = fdt_check(_SPHERE, _ROT, r, rp, _ATOM.omega0)
    return _result("fluctuation-fold", rep.hadamard_fold_dev, 1e-12,
                   "sign-folded fluctuation trace continuous across w = 0")


def _check_derivative_stencils():
    w0 = _ATOM.omega0
    h = 1e-6 * w0
    pol = sphere_polarizability(_SPHERE, w0)

    def val(w):
        return sphere_polarizability(_SPHERE, w).value

    c1 = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
    o1 = np.array([-2.0, -1.0, 1.0, 2.0])
    fd1 = sum(c * val(w0 + o * h) for c, o in zip(c1, o1)) / h
    h2 = 1e-5 * w0  # wider step: the d2 stencil divides roundoff by h^2
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    o2 = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    fd2 = sum(c * val(w0 + o * h2) for c, o in zip(c2, o2)) / h2**2
    dev = max(abs(fd1 - pol.d1) / abs(pol.d1),
              abs(fd2 - pol.d2) / abs(pol.d2))
    return _result("derivative-stencils", dev, 1e-8,
                   "analytic d1/d2 vs 5-point finite-difference stencils")


def _check_reciprocity():
    rng = np.random.default_rng(20260825)
    worst = 0.0
    for _ in range(25):
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        a *= 2e-7 / np.linalg.norm(a)
        b *= 1.5e-7 / np.linalg.norm(b)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        fwd = RotationSpec(omega_vec=tuple(axis * 3e10))
        rev = RotationSpec(omega_vec=tuple(-axis * 3e10))
        g1 = scattered_green(_SPHERE, fwd, a, b, _ATOM.omega0, mode="full")
        g2 = scattered_green(_SPHERE, rev, b, a, _ATOM.omega0, mode="full").T
        worst = max(worst,
                    float(np.linalg.norm(g1 - g2) / np.linalg.norm(g1)))
    return _result("reciprocity", worst, 1e-13,
                   "G(r, r'; Omega) = G(r', r; -Omega)^T on 25 random pairs")


def _check_nearfield_limit():
    w0 = _ATOM.omega0
    scale = 1e-4 * CONSTANTS.c / w0  # kr = 1e-4
    r = np.array([1.0, 0.4, -0.3])
    rp = np.array([0.2, -1.0, 0.5])
    r *= scale / np.linalg.norm(r)
    rp *= 1.3 * scale / np.linalg.norm(rp)
    gf = free_green_full(r, rp, w0)
    gv = free_green_vdw(r, rp)
    nv = float(np.linalg.norm(gv))
    dev = max(float(np.linalg.norm(gf.real - gv)) / nv,
              float(np.linalg.norm(gf.imag)) / nv * 1e-2)
    return _result("nearfield-limit", dev, 1e-6,
                   "retarded propagator -> quasistatic dyad at kr = 1e-4")


def _check_rotation_null_trace(inject):
    rng = np.random.default_rng(31415926)
    origin = np.zeros(3)
    worst = 0.0
    for _ in range(100):
        r = rng.normal(size=3)
        r *= float(rng.uniform(0.8e-7, 4e-7)) / np.linalg.norm(r)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        rot = RotationSpec(omega_vec=tuple(axis * float(rng.uniform(1e9, 1e11))))
        delta = delta_alpha_rotation(_SPHERE, rot, _ATOM.omega0)
        if inject:
            delta = delta.copy()
            delta[0, 1] = -delta[0, 1]
        leg_in = free_green_vdw(r, origin)
        leg_out = free_green_vdw(origin, r)
        trace = np.trace(leg_in @ delta @ leg_out)
        scale = (np.linalg.norm(leg_in) * np.linalg.norm(delta)
                 * np.linalg.norm(leg_out))
        worst = max(worst, float(abs(trace)) / float(scale))
    return _result("rotation-null-trace", worst, 1e-14,
                   "Tr[G0 . delta_alpha . G0] vanishes at coincident points "
                   "(100 random configurations)"
                   + ("; sign error injected" if inject else ""))


def _check_circle_closed_form():
    num = qvsp_local_numeric(_ATOM, _SPHERE, _ROT, Path.circle(1.5e-7, n=2048))
    ref = qvsp_circle_closed(_ATOM, _SPHERE, _ROT, 1.5e-7)
    dev = abs(num - ref) / abs(ref)
    return _result("circle-closed-form", dev, 1e-10,
                   "loop quadrature (n = 2048) vs circle closed form")


def _check_segment_closed_form():
    x1 = 1.5e-7
    num = qvsp_local_numeric(_ATOM, _SPHERE, _ROT,
                             Path.segment(x1, 0.0, 100.0 * x1, 5e3, n=2001))
    ref = qvsp_segment_closed(_ATOM, _SPHERE, _ROT, x1, 0.0)
    dev = abs(num - ref) / abs(ref)
    return _result("segment-closed-form", dev, 1e-6,
                   "finite segment (L = 100 x1, n = 2001) vs infinite-line "
                   "closed form")


def _check_two_line_identity():
    exact_ok = (90 - 27 == 63)
    x1 = 1.5e-7
    pa = Path.segment(x1, 0.0, 30.0 * x1, 5e3, n=6001, analytic="generic")
    pb = Path.segment(-x1, 0.0, 30.0 * x1, 5e3, n=6001, analytic="generic")
    num = qvsp_nonlocal(_ATOM, _SPHERE, _ROT, pa, pb)
    ref = qvsp_nonlocal_lines_closed(_ATOM, _SPHERE, _ROT, x1, alpha_index=1)
    dev = abs(num - ref) / abs(ref)
    if not exact_ok:
        dev = math.inf
    return _result("two-line-identity", dev, 1e-6,
                   "cross-path quadrature vs parallel-line closed form; "
                   "coefficient identity 90 - 27 = 63 exact")


def _check_atom_atom_reduction():
    got = vdw_atom_atom_check(_ATOM)
    want = 0.75 * _ATOM.omega0 * _ATOM.alpha0_vol**2
    dev = 0.0 if got == want else abs(got - want) / abs(want)
    return _result("atom-atom-reduction", dev, 1e-300,
                   "dispersive kernel with twin-atom weights equals "
                   "(3/4) w0 alpha0V^2 bit-exactly")


def _check_thermal_factor_points():
    t_unit = temperature_factor(_ATOM, 0.0)
    theta = CONSTANTS.hbar * _ATOM.omega0 / (2.0 * CONSTANTS.kB * math.log(3.0))
    t_anchor = temperature_factor(_ATOM, theta)
    t_cold = temperature_factor(_ATOM, 300.0)
    dev = max(abs(t_unit - 1.0), abs(t_anchor - 1.25), abs(t_cold - 1.0) * 1e6)
    return _result("thermal-factor-points", dev, 1e-12,
                   "coth factor: exactly 1 at theta = 0, 5/4 at the ln 3 "
                   "point, 1 + <1e-18 at 300 K")


def _check_optimizer_radius_invariance():
    gamma = K_DRUDE.gamma
    w0 = _ATOM.omega0
    # lower edge inset past the |Re d2| zero crossing sitting near
    # sqrt(3) * w0, where the cusp defeats the endpoint-slope guard
    bracket = (math.sqrt(3.0) * (w0 + 0.1 * gamma),
               math.sqrt(3.0) * (w0 + 1.7 * gamma))
    opt50 = optimize_plasma_frequency(_ATOM, 50e-9, gamma, bracket)
    opt35 = optimize_plasma_frequency(_ATOM, 35e-9, gamma, bracket)
    dev = max(abs(opt50 - opt35) / opt50,
              abs(opt50 - 5.549e15) / 5.549e15)
    return _result("optimizer-radius-invariance", dev, 5e-3,
                   "argmax of |Re d2| independent of sphere radius and "
                   "within 0.5% of the 5.549e15 rad/s anchor")


def _check_static_weight_identity():
    w0 = _ATOM.omega0
    alpha_r = sphere_polarizability(_SPHERE, w0).value.real
    abar = effective_alpha_I_bar(_SPHERE, w0)
    wick = wick_static_response(_SPHERE, w0)
    ratio = abar / alpha_r
    ratio_dev = 0.0 if 0.98 <= ratio <= 1.02 else abs(ratio - 1.0)
    ident_dev = abs((alpha_r - abar) - wick) / wick
    dev = max(ratio_dev, ident_dev)
    return _result("static-weight-identity", dev, 1e-6,
                   f"dissipative/dispersive weight ratio {ratio:.6f} in "
                   "[0.98, 1.02]; subtraction identity matches the "
                   "imaginary-frequency average")


def run_battery(inject_delta_alpha_sign_error: bool = False
                ) -> list[CheckResult]:
    """Run every invariant check and return their results in order.

    Parameters
    ----------
    inject_delta_alpha_sign_error : bool
        Corrupt one off-diagonal element of the rotation response before
        the coincident-point cancellation check (mutation hook; the
        ``rotation-null-trace`` check must then fail).

    Returns
    -------
    list of CheckResult
    """
    checks = [
        _check_passivity,
        _check_response_parity,
        _check_fluctuation_fold,
        _check_derivative_stencils,
        _check_reciprocity,
        _check_nearfield_limit,
        lambda: _check_rotation_null_trace(inject_delta_alpha_sign_error),
        _check_circle_closed_form,
        _check_segment_closed_form,
        _check_two_line_identity,
        _check_atom_atom_reduction,
        _check_thermal_factor_points,
        _check_optimizer_radius_invariance,
        _check_static_weight_identity,
    ]
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", VdwRegimeWarning)
        for check in checks:
            try:
                results.append(check())
            except Exception as exc:  # a crashing check is a failing check
                name = getattr(check, "__name__", "anonymous-check")
                results.append(CheckResult(
                    name=name.replace("_check_", "").replace("_", "-"),
                    passed=False, max_deviation=math.inf,
                    detail=f"raised {type(exc).__name__}: {exc}"))
    return results
