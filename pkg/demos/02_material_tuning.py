"""Material tuning: where does the rotation coupling peak?

Scans the Drude plasma frequency at fixed damping and locates the value
maximizing the curvature of the polarizability at the atomic frequency,
which sets the rotation coupling.  Compares the golden-section optimum
with the scan and reports the resulting phase-length scale.
"""

import math

import numpy as np

from qvsp import (
    K_DRUDE,
    NA_ATOM,
    DrudeMaterial,
    NanosphereScatterer,
    RotationSpec,
    optimize_plasma_frequency,
    sagnac_length,
    sphere_polarizability,
)


def main():
    atom = NA_ATOM
    radius = 50e-9
    gamma = K_DRUDE.gamma
    rotation = RotationSpec.about_z(2 * math.pi * 5e9)

    # coarse scan of the objective |Re d2 alpha/dw2|(omega0)
    grid = np.linspace(5.40e15, 5.75e15, 15)
    print("plasma frequency scan (damping fixed at the potassium value):")
    for omega_p in grid:
        sphere = NanosphereScatterer(
            radius, DrudeMaterial(omega_p=omega_p, gamma=gamma))
        d2r = sphere_polarizability(sphere, atom.omega0).d2.real
        bar = "#" * int(60 * abs(d2r) / 1.1e-46)
        print(f"  {omega_p:.3e} rad/s  |Re d2|={abs(d2r):.3e}  {bar}")

    bracket = (math.sqrt(3.0) * (atom.omega0 + 0.1 * gamma),
               math.sqrt(3.0) * (atom.omega0 + 1.7 * gamma))
    omega_p_star = optimize_plasma_frequency(atom, radius, gamma, bracket)
    tuned = NanosphereScatterer(
        radius, DrudeMaterial(omega_p=omega_p_star, gamma=gamma))
    pol = sphere_polarizability(tuned, atom.omega0)
    ell = sagnac_length(atom, tuned, rotation).ell_omega

    print(f"\noptimal plasma frequency : {omega_p_star:.6e} rad/s")
    print(f"dipole resonance          : {omega_p_star / math.sqrt(3):.6e} "
          f"rad/s (atom at {atom.omega0:.6e})")
    print(f"Re d2 alpha/dw2 at omega0 : {pol.d2.real:.6e} m^3 s^2")
    print(f"rotation length at 5 GHz  : {ell * 1e9:.4f} nm")
    print(f"\nstock potassium sphere for comparison:")
    stock = NanosphereScatterer(radius, K_DRUDE)
    print(f"  plasma frequency {K_DRUDE.omega_p:.6e} rad/s, rotation "
          f"length {sagnac_length(atom, stock, rotation).ell_omega * 1e9:.4f} nm")


if __name__ == "__main__":
    main()
