"""Spin-phonon coupling of NV centres to a carbon-nanotube resonator.

Beam mechanics, coupling rates, Hamiltonians, Lindblad dynamics and
scenario runners for phonon-mediated spin-spin gates.
"""

from .beam import (NANOTUBE, BeamGeometry, BoundaryCondition, beam_mode, cross_section,
                   effective_mass, eigenfrequency, frequency_root, zero_point_amplitude)
from .config import Config, ConfigError, config_from_dict, load_config
from .constants import CONST
from .coupling import (DeviceParams, DerivedRates, ValidityWarning, derive_rates,
                       effective_spin_spin, gate_budget, lambda_shift, mech_damping,
                       phonon_induced_decay, spin_phonon_g, thermal_occupation)
from .dynamics import (LindbladTerm, MasterEquation, PhysicsValidityError, Trajectory,
                       evolve_closed, evolve_liouvillian, evolve_master, liouvillian,
                       thermal_state)

__all__ = [
    "NANOTUBE", "BeamGeometry", "BoundaryCondition", "beam_mode", "cross_section",
    "effective_mass", "eigenfrequency", "frequency_root", "zero_point_amplitude",
    "Config", "ConfigError", "config_from_dict", "load_config", "CONST",
    "DeviceParams", "DerivedRates", "ValidityWarning", "derive_rates", "effective_spin_spin",
    "gate_budget", "lambda_shift", "mech_damping", "phonon_induced_decay", "spin_phonon_g",
    "thermal_occupation", "LindbladTerm", "MasterEquation", "PhysicsValidityError",
    "Trajectory", "evolve_closed", "evolve_liouvillian", "evolve_master", "liouvillian",
    "thermal_state",
]
