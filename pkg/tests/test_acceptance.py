"""End-to-end acceptance battery.

One test per headline capability; each records a PASS/FAIL line that the
terminal summary prints, then asserts at the stated tolerance.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from qvsp import (
    CONSTANTS,
    GaussianBeam,
    K_DRUDE,
    NA_ATOM,
    NanosphereScatterer,
    Path,
    RotationSpec,
    SweepSpec,
    averaged_phase,
    delta_alpha_rotation,
    effective_alpha_I_bar,
    free_green_vdw,
    optimize_plasma_frequency,
    qvsp_circle_closed,
    qvsp_local_from_green,
    qvsp_local_numeric,
    qvsp_nonlocal,
    qvsp_retardation,
    qvsp_segment_closed,
    sphere_polarizability,
    sweep,
    temperature_factor,
    vdw_atom_atom_check,
    vdw_line_closed,
    vdw_phase_quasistatic,
)
from qvsp.phases import qvsp_nonlocal_lines_closed

WORKERS = 4


def test_circular_loop_closed_form(atom, sphere50, rot, record_acceptance):
    radius = 1.5e-7
    start = time.perf_counter()
    numeric = qvsp_local_numeric(atom, sphere50, rot,
                                 Path.circle(radius, n=10000))
    closed = qvsp_circle_closed(atom, sphere50, rot, radius)
    elapsed = time.perf_counter() - start
    rel = abs(numeric / closed - 1.0)
    ok = rel < 1e-8 and elapsed < 1.0
    record_acceptance(
        "circular-loop closed form", ok,
        f"1e4-sample loop vs closed form: rel dev {rel:.2e} "
        f"(tol 1e-8) in {elapsed * 1e3:.0f} ms")
    assert rel < 1e-8
    assert elapsed < 1.0


def test_straight_line_closed_form(atom, sphere50, rot, record_acceptance):
    x1 = 1.5e-7
    start = time.perf_counter()
    closed = qvsp_segment_closed(atom, sphere50, rot, x1, 0.0)
    numeric = qvsp_local_numeric(
        atom, sphere50, rot, Path.segment(x1, 0.0, 100 * x1, 1.0, n=2001))
    elapsed = time.perf_counter() - start
    rel = abs(numeric / closed - 1.0)
    ok = rel < 1e-2 and elapsed < 1.0
    record_acceptance(
        "straight-line closed form", ok,
        f"segment of 100x the offset vs infinite line: rel dev {rel:.2e} "
        f"(tol 1e-2) in {elapsed * 1e3:.0f} ms")
    assert rel < 1e-2
    assert elapsed < 1.0


def test_two_path_rational_coefficients(atom, sphere50, rot,
                                        record_acceptance):
    x1 = 1.5e-7
    length, n = 30 * x1, 6001
    plus = Path.segment(x1, 0.0, length, 1.0, n=n, analytic="generic")
    minus = Path.segment(-x1, 0.0, length, 1.0, n=n, analytic="generic")
    d2r = sphere_polarizability(sphere50, atom.omega0).d2.real
    unit = atom.omega0 * atom.alpha0_vol * d2r * rot.omega_vec[2] / x1**6

    local = (qvsp_local_numeric(atom, sphere50, rot, plus)
             - qvsp_local_numeric(atom, sphere50, rot, minus)) / unit
    cross = (qvsp_nonlocal(atom, sphere50, rot, plus, minus)
             - qvsp_nonlocal(atom, sphere50, rot, minus, plus)) / unit
    dev_local = abs(local / (90 * math.pi / 32) - 1.0)
    dev_cross = abs(cross / (-27 * math.pi / 32) - 1.0)

    # the rational bookkeeping is exact: 90/32 - 27/32 = 63/32
    exact = (Fraction(90, 32) - Fraction(27, 32) == Fraction(63, 32))
    closed_total = (
        qvsp_segment_closed(atom, sphere50, rot, x1, 0.0)
        - qvsp_segment_closed(atom, sphere50, rot, -x1, 0.0)
        + qvsp_nonlocal_lines_closed(atom, sphere50, rot, x1, 1)
        - qvsp_nonlocal_lines_closed(atom, sphere50, rot, x1, 2)) / unit
    dev_total = abs(closed_total / (63 * math.pi / 32) - 1.0)

    ok = dev_local < 1e-6 and dev_cross < 1e-6 and exact and dev_total < 1e-13
    record_acceptance(
        "two-path rational coefficients", ok,
        f"90pi/32 dev {dev_local:.2e}, -27pi/32 dev {dev_cross:.2e} "
        f"(tol 1e-6); 90-27=63 exact: {exact}")
    assert dev_local < 1e-6
    assert dev_cross < 1e-6
    assert exact
    assert dev_total < 1e-13


def test_independent_propagator_pipeline(atom, sphere50, rot,
                                         record_acceptance):
    circle = Path.circle(1.5e-7, n=128)
    seg = Path.segment(1.5e-7, 0.0, 20 * 1.5e-7, 1.0, n=201,
                       analytic="generic")
    dev_circle = abs(qvsp_local_from_green(atom, sphere50, rot, circle)
                     / qvsp_local_numeric(atom, sphere50, rot, circle) - 1.0)
    dev_seg = abs(qvsp_local_from_green(atom, sphere50, rot, seg)
                  / qvsp_local_numeric(atom, sphere50, rot, seg) - 1.0)
    total = qvsp_local_from_green(atom, sphere50, rot, circle)
    dipole = qvsp_local_from_green(atom, sphere50, rot, circle,
                                   part="dipole")
    halves = (dipole == 0.5 * total)
    ok = dev_circle < 1e-4 and dev_seg < 1e-4 and halves
    record_acceptance(
        "independent propagator pipeline", ok,
        f"finite-difference route vs geometric: circle dev {dev_circle:.2e},"
        f" segment dev {dev_seg:.2e} (tol 1e-4); source half == total/2: "
        f"{halves}")
    assert dev_circle < 1e-4
    assert dev_seg < 1e-4
    assert halves


def test_static_rotation_null(atom, sphere50, record_acceptance):
    rng = np.random.default_rng(271828)
    origin = np.zeros(3)
    worst = 0.0
    for _ in range(100):
        r = rng.normal(size=3)
        r *= float(rng.uniform(0.8e-7, 4e-7)) / np.linalg.norm(r)
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        rot = RotationSpec(tuple(axis * float(rng.uniform(1e9, 1e11))))
        delta = delta_alpha_rotation(sphere50, rot, atom.omega0)
        leg_in = free_green_vdw(r, origin)
        leg_out = free_green_vdw(origin, r)
        trace = abs(np.trace(leg_in @ delta @ leg_out))
        scale = (np.linalg.norm(leg_in) * np.linalg.norm(delta)
                 * np.linalg.norm(leg_out))
        worst = max(worst, float(trace / scale))
    ok = worst < 1e-14
    record_acceptance(
        "static rotation null", ok,
        f"spin leaves the coincident-point response untouched: worst "
        f"normalized trace {worst:.2e} over 100 configurations (tol 1e-14)")
    assert worst < 1e-14


def test_dispersive_kernel_anchors(atom, sphere50, record_acceptance):
    want = 0.75 * atom.omega0 * atom.alpha0_vol**2
    got = vdw_atom_atom_check(atom)
    exact = (got == want)
    x1, speed = 1.5e-7, 3.0
    closed = vdw_line_closed(atom, sphere50, x1, 0.0, speed)
    numeric = vdw_phase_quasistatic(
        atom, sphere50,
        Path.segment(x1, 0.0, 200 * x1, speed, n=8001, analytic="generic"))
    rel = abs(numeric / closed - 1.0)
    ok = exact and rel < 1e-2
    record_acceptance(
        "dispersive kernel anchors", ok,
        f"twin-atom reduction exact: {exact}; line quadrature vs closed "
        f"form rel dev {rel:.2e} (tol 1e-2)")
    assert exact
    assert rel < 1e-2


def test_material_optimum(atom, record_acceptance):
    gamma = K_DRUDE.gamma
    bracket = (math.sqrt(3.0) * (atom.omega0 + 0.1 * gamma),
               math.sqrt(3.0) * (atom.omega0 + 1.7 * gamma))
    star = optimize_plasma_frequency(atom, 50e-9, gamma, bracket)
    dev = abs(star / 5.549e15 - 1.0)
    sphere = NanosphereScatterer(50e-9, K_DRUDE)
    ratio = (effective_alpha_I_bar(sphere, atom.omega0)
             / sphere_polarizability(sphere, atom.omega0).value.real)
    ok = dev < 5e-3 and 0.98 < ratio < 1.02
    record_acceptance(
        "material optimum", ok,
        f"optimal plasma frequency {star:.4e} rad/s, dev {dev:.1e} from "
        f"5.549e15 (tol 5e-3); static weight ratio {ratio:.4f} in "
        f"[0.98, 1.02]")
    assert dev < 5e-3
    assert 0.98 < ratio < 1.02


def test_focused_beam_phenomenology(atom, sphere35, sphere50, rot,
                                    record_acceptance):
    start = time.perf_counter()
    notes = []

    # tightly focused rim spot: readout within a factor 2 of 1e-4 rad
    spot = GaussianBeam(center_x=35e-9, width=8e-9, velocity=5000.0)
    res = averaged_phase(atom, sphere35, rot, spot)
    mag = abs(res.phi_bar_omega)
    spot_ok = 0.5e-4 <= mag <= 2e-4
    notes.append(f"rim spot |readout| {mag:.3e} rad in [5e-5, 2e-4]")

    # wide beam on the larger sphere: linear growth with velocity
    wide = GaussianBeam(center_x=50e-9, width=100e-9, velocity=1000.0)
    rows_v = sweep(SweepSpec(
        variable="velocity", values=np.linspace(1000.0, 10000.0, 19),
        atom=atom, scatterer=sphere50, rotation=rot, beam=wide),
        workers=WORKERS)
    mags_v = [abs(r.phi_bar_omega) for r in rows_v]
    growth_ok = (all(r.error is None for r in rows_v)
                 and all(b > a for a, b in zip(mags_v, mags_v[1:]))
                 and mags_v[-1] / mags_v[0] > 10.0)
    notes.append(f"velocity growth x{mags_v[-1] / mags_v[0]:.0f} over "
                 f"[1, 10] km/s, monotone: {growth_ok}")

    # focusing enhancement: narrow spots beat wide beams by large factors
    widths = np.geomspace(8e-9, 1e-7, 20)
    enhancements = []
    for v in (3000.0, 4000.0, 5000.0):
        beam = GaussianBeam(center_x=35e-9, width=8e-9, velocity=v)
        rows_w = sweep(SweepSpec(
            variable="width", values=widths, atom=atom, scatterer=sphere35,
            rotation=rot, beam=beam), workers=WORKERS)
        assert all(r.error is None for r in rows_w)
        mags_w = [abs(r.phi_bar_omega) for r in rows_w]
        enhancements.append(mags_w[0] / mags_w[-1])
    enh_ok = all(e > 100.0 for e in enhancements)
    notes.append("width-focusing enhancement "
                 + "/".join(f"x{e:.0f}" for e in enhancements))

    # slow-velocity suppression dips from dispersive phase wrapping
    rows_s = sweep(SweepSpec(
        variable="velocity", values=np.linspace(250.0, 1250.0, 21),
        atom=atom, scatterer=sphere50, rotation=rot,
        beam=GaussianBeam(center_x=50e-9, width=100e-9, velocity=250.0)),
        workers=WORKERS)
    mags_s = [abs(r.phi_bar_omega) for r in rows_s]
    dips = [
        (rows_s[i].value, min(mags_s[i - 1], mags_s[i + 1]) / mags_s[i])
        for i in range(1, len(mags_s) - 1)
        if mags_s[i] < mags_s[i - 1] and mags_s[i] < mags_s[i + 1]
    ]
    dip_ok = any(contrast >= 1.5 for _, contrast in dips)
    notes.append("suppression dips at "
                 + ", ".join(f"{v:.0f} m/s (x{c:.1f})" for v, c in dips))

    elapsed = time.perf_counter() - start
    ok = spot_ok and growth_ok and enh_ok and dip_ok and elapsed < 600.0
    record_acceptance(
        "focused-beam phenomenology", ok,
        "; ".join(notes) + f"; total {elapsed:.1f} s (budget 600 s)")
    assert spot_ok
    assert growth_ok
    assert enh_ok
    assert dip_ok
    assert elapsed < 600.0


def test_geometric_invariances(atom, sphere50, rot, record_acceptance):
    radius = 1.5e-7
    slow = qvsp_local_numeric(atom, sphere50, rot,
                              Path.circle(radius, n=1024, speed=1.0))
    fast = qvsp_local_numeric(atom, sphere50, rot,
                              Path.circle(radius, n=1024, speed=1e4))
    v_dev = abs(fast / slow - 1.0)

    loop = Path.circle(radius, n=512)
    base = qvsp_local_numeric(atom, sphere50, rot, loop)
    reversal_exact = (qvsp_local_numeric(atom, sphere50, rot,
                                         loop.reversed()) == -base)
    linear_exact = (qvsp_local_numeric(
        atom, sphere50, RotationSpec.about_z(2 * rot.magnitude), loop)
        == 2.0 * base)
    null_exact = (qvsp_local_numeric(
        atom, sphere50, RotationSpec.about_z(0.0), loop) == 0.0)
    ret_ratio = abs(qvsp_retardation(atom, sphere50, rot, loop) / base)

    ok = (v_dev < 1e-10 and reversal_exact and linear_exact and null_exact
          and ret_ratio < 1e-2)
    record_acceptance(
        "geometric invariances", ok,
        f"speed 1 vs 1e4 m/s dev {v_dev:.2e} (tol 1e-10); reversal flip "
        f"exact: {reversal_exact}; rate doubling exact: {linear_exact}; "
        f"zero-rate null exact: {null_exact}; retardation/local "
        f"{ret_ratio:.1e} < 1e-2")
    assert v_dev < 1e-10
    assert reversal_exact and linear_exact and null_exact
    assert ret_ratio < 1e-2


def test_thermal_occupancy_factor(atom, record_acceptance):
    exact_cold = (temperature_factor(atom, 0.0) == 1.0)
    theta_ln3 = CONSTANTS.hbar * atom.omega0 / (2 * CONSTANTS.kB
                                                * math.log(3.0))
    dev_ln3 = abs(temperature_factor(atom, theta_ln3) - 1.25)
    excess_room = temperature_factor(atom, 300.0) - 1.0
    ok = exact_cold and dev_ln3 < 1e-12 and 0.0 <= excess_room < 1e-20
    record_acceptance(
        "thermal occupancy factor", ok,
        f"zero-temperature factor exactly 1: {exact_cold}; ln-3 point dev "
        f"{dev_ln3:.1e} (tol 1e-12); room-temperature excess "
        f"{excess_room:.1e} < 1e-20")
    assert exact_cold
    assert dev_ln3 < 1e-12
    assert 0.0 <= excess_room < 1e-20
