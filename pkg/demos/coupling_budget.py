"""
Spin-phonon coupling and the gate error budget
----------------------------------------------

A current-carrying wire next to the tube turns motion into a field gradient
at the NV. We look at g(d), then at the dispersive exchange and its errors.
"""

import numpy as np

from nvtube import (beam_mode, NANOTUBE, BoundaryCondition, effective_spin_spin, gate_budget,
                    mech_damping, phonon_induced_decay, spin_phonon_g, thermal_occupation)

TWO_PI = 2 * np.pi
mode = beam_mode(NANOTUBE, BoundaryCondition.DOUBLY_CLAMPED, 0, mass=7e-21, omega=TWO_PI * 2e6)

for d in (10e-9, 20e-9, 30e-9, 60e-9):
    g = spin_phonon_g(60e-6, d, mode.mass, mode.omega)
    print(f"d = {d * 1e9:4.0f} nm   g/2pi = {g / TWO_PI / 1e3:7.2f} kHz")

n_th = thermal_occupation(0.01, mode.omega)
gamma_m = mech_damping(mode.omega, 1e5)
print(f"\nn_th at 10 mK = {n_th:.1f}, gamma_m/2pi = {gamma_m / TWO_PI:.1f} Hz")

# Round numbers: g/2pi = 100 kHz, splitting 1 MHz above the mode
g = TWO_PI * 100e3
split = mode.omega + TWO_PI * 1e6
lam = effective_spin_spin(g, split, mode.omega)
decay = phonon_induced_decay(100, gamma_m, g, split, mode.omega)
t_sw, f = gate_budget(lam, decay, 1e-3)
print(f"lambda_eff/2pi = {lam / TWO_PI / 1e3:.1f} kHz, Gamma/2pi = {decay / TWO_PI:.1f} Hz")
print(f"T_sw = {t_sw * 1e6:.1f} us, F = 1 - {t_sw * decay:.4f} - {t_sw / 1e-3:.4f} = {f:.4f}")

# Dephasing at T2 = 1 ms dominates; phonon-induced decay is a small correction
for t2 in (1e-3, 5e-3, 1e-2):
    print(f"T2 = {t2 * 1e3:4.0f} ms -> F = {gate_budget(lam, decay, t2)[1]:.4f}")
