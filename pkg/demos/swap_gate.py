"""
SWAP through the bright-state pathway
-------------------------------------

Two driven NVs with phonon-mediated exchange, reduced to nine levels. The
|0,1> -> |1,0> transfer goes through |+> and |->; |1,1> is decoupled.
"""

import numpy as np

from nvtube import config_from_dict
from nvtube.hamiltonians import TwoQubitModel, h_subspace4, swap_rabi_for_full_transfer
from nvtube.scenarios import run_swap

res = run_swap(config_from_dict({"simulation": {"samples": 401}}))
s = res.report.summary
print(f"T_sw = {s['T_sw_s'] * 1e6:.2f} us")
print(f"P(1,0) at T_sw = {s['transfer_probability']:.4f}, "
      f"peak {s['peak_transfer_probability']:.4f} at {s['peak_transfer_time_s'] * 1e6:.2f} us")
print(f"|1,1> deviation {s['state_11_max_deviation']:.1e}, "
      f"|0,0> return {s['state_00_return_probability']:.6f}")

# With zero detuning the drive that closes both loops exactly at pi/lambda
lam = 2 * np.pi * 10e3
rabi = swap_rabi_for_full_transfer(lam)
h = h_subspace4(TwoQubitModel(rabi, rabi, lam))
w, v = np.linalg.eigh(h)
u = v @ np.diag(np.exp(-1j * w * np.pi / lam)) @ v.conj().T
print(f"\nOmega = {rabi / lam:.4f} lambda -> P(1,0) = {abs(u[3, 0]) ** 2:.12f}")

# Adding phonon-induced decay and T2 dephasing
cfg = config_from_dict({"simulation": {"samples": 201},
                        "scenario": {"swap": {"dissipation": True, "decay_over_2pi_Hz": 20.0}}})
s = run_swap(cfg).report.summary
print(f"budget F = {s['fidelity_budget']['F']:.4f}, "
      f"simulated P(1,0) = {s['simulated_transfer_probability']:.4f}")
