"""
Flexural modes of a suspended nanotube
--------------------------------------

Roots of the Euler-Bernoulli frequency equation for both supports, and what
they imply for a 2 um multiwall tube.
"""

import numpy as np

from nvtube import NANOTUBE, BoundaryCondition, beam_mode, cross_section, frequency_root

for bc in BoundaryCondition:
    roots = [frequency_root(bc, n) for n in range(5)]
    print(f"{bc.value:>15}: " + "  ".join(f"{r:.4f}" for r in roots))

# Higher roots approach (n + 1/2) pi or (n + 3/2) pi
print("doubly clamped, n=4 vs 11 pi/2:", frequency_root(BoundaryCondition.DOUBLY_CLAMPED, 4) - 5.5 * np.pi)

cs = cross_section(NANOTUBE)
print(f"\narea {cs.area:.4g} m^2, second moment {cs.moment:.4g} m^4")

for bc in BoundaryCondition:
    m = beam_mode(NANOTUBE, bc, 0)
    print(f"{bc.value:>15}: f0 = {m.omega / 2 / np.pi / 1e6:8.3f} MHz, "
          f"m = {m.mass:.3g} kg, u_zp = {m.u_zp:.3g} m")

# A softer mode: the 2 MHz, 7e-21 kg mode used in the coupling estimates
m = beam_mode(NANOTUBE, BoundaryCondition.DOUBLY_CLAMPED, 0, mass=7e-21, omega=2 * np.pi * 2e6)
print(f"\n2 MHz mode: u_zp = {m.u_zp:.4g} m")
