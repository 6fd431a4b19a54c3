"""
Vacuum Rabi oscillations with a thermal mode
--------------------------------------------

A bright NV state exchanging one phonon with the tube. The closed run starts
from a weakly thermal mode; the open run adds the hot bath (n_th = 100).
"""

import numpy as np

from nvtube import config_from_dict
from nvtube.scenarios import run_rabi, thermal_jc_population

cfg = config_from_dict({"simulation": {"n_max": 26, "samples": 401},
                        "scenario": {"rabi": {"periods": 3}}})
res = run_rabi(cfg)
s = res.report.summary
g = 2 * np.pi * s["g_over_2pi_Hz"]
closed = res.trajectories["closed"]
open_ = res.trajectories["dissipative"]

# Closed dynamics against the thermal average of cos^2(g sqrt(n+1) t)
ref = thermal_jc_population(closed.times, g, 0.2)
print("closed vs analytic, max |dP_B| =", np.abs(closed.expect["P_B"] - ref).max())

print("period maxima, closed:     ", np.round(s["closed_period_maxima"], 3))
print("period maxima, dissipative:", np.round(s["dissipative_period_maxima"], 3))

# Heating: the mode population climbs towards n_th at rate gamma_m
print("<n> at the end:", open_.expect["n_phonon"][-1])
print("first closed minimum at t g / pi =", s["closed_first_minimum_s"] * g / np.pi)
