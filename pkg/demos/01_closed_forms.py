"""Closed-form benchmarks: circle, straight line, and symmetric pair.

Runs each analytic result against the corresponding discretized-path
quadrature and prints the relative agreement, then shows the rational
coefficients of the symmetric two-line budget.
"""

import math
import warnings

import numpy as np

from qvsp import (
    K_DRUDE,
    NA_ATOM,
    NanosphereScatterer,
    Path,
    RotationSpec,
    qvsp_circle_closed,
    qvsp_local_numeric,
    qvsp_nonlocal_lines_closed,
    qvsp_segment_closed,
    sagnac_length,
)
from qvsp.errors import VdwRegimeWarning

# the closed forms are nonretarded by construction; comparing them on
# paths beyond the conservative quasistatic range is the whole point here
warnings.simplefilter("ignore", VdwRegimeWarning)


def main():
    atom = NA_ATOM
    sphere = NanosphereScatterer(radius=50e-9, material=K_DRUDE)
    rotation = RotationSpec.about_z(2 * math.pi * 5e9)
    ell = sagnac_length(atom, sphere, rotation).ell_omega
    print(f"sphere radius 50 nm, rotation 2pi*5 GHz about z")
    print(f"characteristic rotation length: {ell * 1e9:.4f} nm\n")

    radius = 1.5e-7
    closed = qvsp_circle_closed(atom, sphere, rotation, radius)
    numeric = qvsp_local_numeric(atom, sphere, rotation,
                                 Path.circle(radius, n=4096))
    print(f"circle (R = {radius * 1e9:.0f} nm):")
    print(f"  closed form  {closed:+.12e} rad")
    print(f"  quadrature   {numeric:+.12e} rad")
    print(f"  rel. difference {abs(numeric / closed - 1.0):.2e}\n")

    x1 = 1.5e-7
    length = 100 * x1
    closed = qvsp_segment_closed(atom, sphere, rotation, x1, 0.0)
    numeric = qvsp_local_numeric(
        atom, sphere, rotation,
        Path.segment(x1, 0.0, length, speed=1.0, n=4001))
    print(f"straight line (offset {x1 * 1e9:.0f} nm, length 100x offset):")
    print(f"  infinite-line closed form  {closed:+.12e} rad")
    print(f"  finite-segment quadrature  {numeric:+.12e} rad")
    print(f"  rel. difference {abs(numeric / closed - 1.0):.2e}\n")

    # symmetric pair at +-x1: per-line and cross contributions carry
    # exact rational coefficients in units of the planar coupling / x1^6
    from qvsp.materials import sphere_polarizability
    d2r = sphere_polarizability(sphere, atom.omega0).d2.real
    unit = (atom.omega0 * atom.alpha0_vol * d2r
            * rotation.omega_vec[2]) / x1**6
    local_diff = (qvsp_segment_closed(atom, sphere, rotation, x1, 0.0)
                  - qvsp_segment_closed(atom, sphere, rotation, -x1, 0.0))
    nonlocal_diff = (
        qvsp_nonlocal_lines_closed(atom, sphere, rotation, x1, alpha_index=1)
        - qvsp_nonlocal_lines_closed(atom, sphere, rotation, x1,
                                     alpha_index=2))
    print("symmetric two-line interferometer (coefficients of "
          "coupling / x1^6):")
    print(f"  single-sphere difference  {local_diff / unit:+.9f}   "
          f"(expected 90 pi/32 = {90 * math.pi / 32:+.9f})")
    print(f"  cross-path contribution   {nonlocal_diff / unit:+.9f}   "
          f"(expected -27 pi/32 = {-27 * math.pi / 32:+.9f})")
    print(f"  observable total          "
          f"{(local_diff + nonlocal_diff) / unit:+.9f}   "
          f"(expected 63 pi/32 = {63 * math.pi / 32:+.9f})")


if __name__ == "__main__":
    main()
