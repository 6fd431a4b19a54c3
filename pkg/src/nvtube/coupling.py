"""Closed-form device formulas for the NV spin / current-carrying nanotube system.

All angular frequencies and rates are in rad/s. Functions that rely on a
perturbative regime (dispersive drive, dispersive spin-phonon exchange) emit a
:class:`ValidityWarning` instead of raising when outside it, so invalid regimes
stay explorable.
"""

from dataclasses import dataclass, asdict
import math
import warnings

from .beam import BeamMode
from .constants import CONST

#: Ratio used for every "much larger than" validity check.
VALIDITY_RATIO = 5.0


class ValidityWarning(UserWarning):
    """A formula is being evaluated outside its approximation regime."""


def wire_field(current: float, distance: float) -> float:
    """Field magnitude (T) of an infinite straight wire."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return CONST.mu_0 * current / (2 * math.pi * distance)


def wire_gradient(current: float, distance: float) -> float:
    """Radial field gradient (T/m) of an infinite straight wire."""
    if not distance > 0:
        raise ValueError(f"distance must be positive, got {distance}")
    return CONST.mu_0 * current / (2 * math.pi * distance**2)


def spin_phonon_g(current: float, distance: float, mass: float, omega: float) -> float:
    """Single spin-phonon coupling g (rad/s).

    ``g = mu_B g_s mu_0 I / (2 pi sqrt(2 hbar m omega) d^2)``
    """
    if current < 0:
        raise ValueError(f"current must be non-negative, got {current}")
    if not (distance > 0 and mass > 0 and omega > 0):
        raise ValueError("distance, mass and frequency must be positive")
    c = CONST
    return (c.mu_B * c.g_s * c.mu_0 * current
            / (2 * math.pi * math.sqrt(2 * c.hbar * mass * omega) * distance**2))


def thermal_occupation(temperature: float, omega: float) -> float:
    """Bose-Einstein occupation; exactly 0 at T = 0."""
    if not omega > 0:
        raise ValueError(f"frequency must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = CONST.hbar * omega / (CONST.k_B * temperature)
    return 1.0 / math.expm1(x)


def mech_damping(omega: float, q: float) -> float:
    if not q > 0:
        raise ValueError(f"quality factor must be positive, got {q}")
    return omega / q


def drive_params(drive_field: float, static_field: float, nanotube_field: float,
                 drive_frequency: float, zfs: float = CONST.D):
    """Rabi frequency and the two detunings of the driven |0> <-> |+-1> transitions.

    Returns
    -------
    (Omega, delta_plus, delta_minus) in rad/s.
    """
    zeeman = CONST.mu_B * CONST.g_s * (static_field + nanotube_field) / CONST.hbar
    delta_plus = zfs + zeeman - drive_frequency
    delta_minus = zfs - zeeman - drive_frequency
    omega = math.sqrt(2) / 4 * CONST.mu_B * CONST.g_s * drive_field / CONST.hbar
    return omega, delta_plus, delta_minus


def lambda_shift(omega: float, delta: float) -> float:
    """Effective bright/dark splitting ``2 Omega^2 / Delta`` (sign follows Delta)."""
    if delta == 0:
        raise ValueError("detuning must be non-zero")
    if abs(delta) < VALIDITY_RATIO * abs(omega):
        warnings.warn(f"|Delta| = {abs(delta):.3g} is not >> Omega = {abs(omega):.3g}",
                      ValidityWarning, stacklevel=2)
    return 2 * omega**2 / delta


def _dispersive_detuning(g, splitting, omega_nt):
    det = abs(splitting - omega_nt)
    if det == 0:
        raise ValueError("Lambda == omega_nt is resonant, not dispersive")
    if det < VALIDITY_RATIO * abs(g):
        warnings.warn(f"|Lambda - omega_nt| = {det:.3g} is not >> g = {abs(g):.3g}",
                      ValidityWarning, stacklevel=3)
    return det


def effective_spin_spin(g: float, splitting: float, omega_nt: float) -> float:
    """Phonon-mediated exchange ``g^2 / |Lambda - omega_nt|``."""
    return g**2 / _dispersive_detuning(g, splitting, omega_nt)


def phonon_induced_decay(n_th: float, gamma_m: float, g: float, splitting: float,
                         omega_nt: float) -> float:
    """Spin decoherence from virtual-phonon heating, ``n_th gamma_m g^2 / |Lambda - omega_nt|^2``."""
    det = _dispersive_detuning(g, splitting, omega_nt)
    return n_th * gamma_m * g**2 / det**2


def gate_budget(lambda_eff: float, decay: float, t2: float):
    """SWAP duration and linear fidelity estimate.

    Returns ``(T_sw, F)`` with ``T_sw = pi / lambda_eff`` and
    ``F = 1 - T_sw * Gamma - T_sw / T2`` clamped to [0, 1].
    """
    if not lambda_eff > 0:
        raise ValueError(f"lambda_eff must be positive, got {lambda_eff}")
    if not t2 > 0:
        raise ValueError(f"T2 must be positive, got {t2}")
    t_sw = math.pi / lambda_eff
    f = 1.0 - t_sw * decay - t_sw / t2
    return t_sw, min(1.0, max(0.0, f))


def coherence_length(q: float, length: float) -> float:
    """Phonon mean free path estimate ``Q L`` in metres."""
    if not (q > 0 and length > 0):
        raise ValueError("Q and L must be positive")
    return q * length


@dataclass(frozen=True)
class DeviceParams:
    """Full device record. Frequencies/rates in rad/s, fields in T, lengths in m.

    ``splitting`` optionally fixes Lambda directly instead of deriving it from
    the drive; ``length`` is the nanotube length used for the long-wire check
    and the coherence length.
    """

    current: float
    distance: float
    mode: BeamMode
    length: float
    temperature: float = 0.01
    quality_factor: float = 1e5
    static_field: float = 0.0
    drive_field: float = 0.0
    drive_frequency: float = CONST.D
    spin_dephasing: float = 2 * math.pi * 1e3
    t2: float = 1e-3
    splitting: float | None = None

    def __post_init__(self):
        if self.current < 0:
            raise ValueError(f"current must be non-negative, got {self.current}")
        if not self.distance > 0:
            raise ValueError(f"distance must be positive, got {self.distance}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be non-negative, got {self.temperature}")
        if not self.quality_factor > 0:
            raise ValueError(f"quality factor must be positive, got {self.quality_factor}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")


@dataclass(frozen=True)
class DerivedRates:
    g: float
    Omega: float
    delta_plus: float
    delta_minus: float
    delta: float
    Lambda: float
    n_th: float
    gamma_m: float
    lambda_eff: float
    Gamma: float
    l_c: float
    t_sw: float
    fidelity: float
    flags: dict

    def as_dict(self) -> dict:
        return asdict(self)


def derive_rates(dev: DeviceParams) -> DerivedRates:
    """Evaluate every closed-form rate for a device, with explicit validity flags."""
    w = dev.mode.omega
    g = spin_phonon_g(dev.current, dev.distance, dev.mode.mass, w)
    b_nt = wire_field(dev.current, dev.distance)
    rabi, dp, dm = drive_params(dev.drive_field, dev.static_field, b_nt, dev.drive_frequency)
    delta = 0.5 * (dp + dm)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        if dev.splitting is not None:
            lam = float(dev.splitting)
        elif delta != 0:
            lam = lambda_shift(rabi, delta)
        else:
            lam = math.nan
        n_th = thermal_occupation(dev.temperature, w)
        gamma_m = mech_damping(w, dev.quality_factor)
        if math.isfinite(lam) and lam != w:
            lam_eff = effective_spin_spin(g, lam, w)
            decay = phonon_induced_decay(n_th, gamma_m, g, lam, w)
        else:
            lam_eff = decay = math.nan
    if lam_eff > 0:
        t_sw, fid = gate_budget(lam_eff, decay, dev.t2)
    else:
        t_sw = fid = math.nan
    flags = {
        "symmetric_detuning": bool(math.isclose(dp, dm, rel_tol=0, abs_tol=1e-9 * max(1.0, abs(dp)))),
        "drive_dispersive": bool(delta != 0 and abs(delta) >= VALIDITY_RATIO * abs(rabi)),
        "dispersive": bool(math.isfinite(lam) and abs(lam - w) >= VALIDITY_RATIO * g),
        "long_wire": bool(dev.length >= 10 * dev.distance),
        "strong_coupling": bool(g > max(dev.spin_dephasing, n_th * gamma_m)),
    }
    return DerivedRates(
        g=g, Omega=rabi, delta_plus=dp, delta_minus=dm, delta=delta, Lambda=lam,
        n_th=n_th, gamma_m=gamma_m, lambda_eff=lam_eff, Gamma=decay,
        l_c=coherence_length(dev.quality_factor, dev.length),
        t_sw=t_sw, fidelity=fid, flags=flags)
