"""Physical constants (SI, CODATA via scipy) and package-wide tolerances."""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    mu_B: float = _sc.physical_constants["Bohr magneton"][0]
    g_s: float = 2.0
    mu_0: float = _sc.mu_0
    k_B: float = _sc.k
    #: NV zero-field splitting, rad/s
    D: float = 2 * math.pi * 2.87e9


CONST = PhysicalConstants()

EPS_HERM = 1e-10
EPS_TRACE = 1e-9
EPS_POS = 1e-8
TRUNCATION_LIMIT = 1e-6
