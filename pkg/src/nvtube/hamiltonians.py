"""Hamiltonian builders (angular-frequency units, hbar = 1).

Basis orderings are fixed per builder:

* ``h_full_rotating``: bare spin ``|0>, |+1>, |-1>`` then Fock
* ``h_dressed``: ``|G>, |D>, |E>`` then Fock
* qubit builders: ``|B>, |D>`` per spin, Fock last
* ``h_nine_level``: ``|0,1>, |+>, |->, |1,0>, |0,0>, |1,1>, |B,B>, |0,B>, |B,0>``
  where the logical qubit is ``|0>_q = |0>`` and ``|1>_q = |D>``
"""

from dataclasses import dataclass
import math

import numpy as np

from .operators import annihilation, kron, spin_operators, three_level

_SPIN = spin_operators()
SX = _SPIN.sigma_plus + _SPIN.sigma_minus


def _fock_ops(n_max):
    a = annihilation(n_max)
    return a, a.conj().T, np.eye(n_max + 1, dtype=complex)


@dataclass(frozen=True)
class SingleSpinModel:
    delta_plus: float
    delta_minus: float
    rabi: float
    g: float
    omega_nt: float
    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("N_max must be >= 1")


def h_full_rotating(model: SingleSpinModel) -> np.ndarray:
    """Driven spin-1 plus mode in the frame rotating at the drive frequency."""
    a, ad, i_f = _fock_ops(model.n_max)
    p_plus = three_level(1, 1)
    p_minus = three_level(2, 2)
    drive = three_level(1, 0) + three_level(2, 0)
    drive = drive + drive.conj().T
    h_spin = model.delta_plus * p_plus + model.delta_minus * p_minus + model.rabi * drive
    return (model.omega_nt * kron(np.eye(3), ad @ a)
            + kron(h_spin, i_f)
            + model.g * kron(p_plus - p_minus, a + ad))


@dataclass(frozen=True)
class DressedParams:
    theta: float
    omega_eg: float
    omega_dg: float
    g1: float
    g2: float
    #: energy of |G> relative to the bare |0> level
    ground_shift: float


def dressed_params(delta: float, rabi: float, g: float) -> DressedParams:
    """Dressed-state frequencies and couplings for symmetric detuning ``delta``.

    ``theta`` lies in (-pi/4, pi/4), so ``|E>`` is always adiabatically
    connected to the bright state. For ``delta > 0`` this gives
    ``omega_eg = sqrt(delta^2 + 8 rabi^2)``; for ``delta < 0`` both dressed
    frequencies carry the sign of ``delta``.
    """
    if delta == 0:
        raise ValueError("delta must be non-zero to fix the dressing angle branch")
    s = math.copysign(1.0, delta)
    root = math.sqrt(delta**2 + 8 * rabi**2)
    theta = 0.5 * math.atan(2 * math.sqrt(2) * rabi / delta)
    return DressedParams(
        theta=theta,
        omega_eg=s * root,
        omega_dg=0.5 * (delta + s * root),
        g1=-g * math.sin(theta),
        g2=g * math.cos(theta),
        ground_shift=0.5 * (delta - s * root),
    )


def h_dressed(p: DressedParams, omega_nt: float, n_max: int) -> np.ndarray:
    a, ad, i_f = _fock_ops(n_max)
    g_, d_, e_ = 0, 1, 2
    spin = p.omega_eg * three_level(e_, e_) + p.omega_dg * three_level(d_, d_)
    c = p.g1 * three_level(g_, d_) + p.g2 * three_level(d_, e_)
    c = c + c.conj().T
    return omega_nt * kron(np.eye(3), ad @ a) + kron(spin, i_f) + kron(c, a + ad)


def _qubit_diag(splitting, omega_nt, n_max):
    a, ad, i_f = _fock_ops(n_max)
    return omega_nt * kron(np.eye(2), ad @ a) + 0.5 * splitting * kron(_SPIN.sigma_z, i_f)


def h_effective_qubit(splitting: float, g: float, omega_nt: float, n_max: int) -> np.ndarray:
    """Bright/dark qubit coupled to the mode without rotating-wave approximation."""
    a, ad, _ = _fock_ops(n_max)
    return _qubit_diag(splitting, omega_nt, n_max) + g * kron(SX, a + ad)


def h_jc(splitting: float, g: float, omega_nt: float, n_max: int) -> np.ndarray:
    a, ad, _ = _fock_ops(n_max)
    sp, sm = _SPIN.sigma_plus, _SPIN.sigma_minus
    return _qubit_diag(splitting, omega_nt, n_max) + g * (kron(sp, a) + kron(sm, ad))


def h_ajc(splitting: float, g: float, omega_nt: float, n_max: int) -> np.ndarray:
    a, ad, _ = _fock_ops(n_max)
    sp, sm = _SPIN.sigma_plus, _SPIN.sigma_minus
    return _qubit_diag(splitting, omega_nt, n_max) + g * (kron(sp, ad) + kron(sm, a))


def excitation_number(n_max: int, anti: bool = False) -> np.ndarray:
    """``a^+a + |B><B|`` (conserved by JC) or ``a^+a - |B><B|`` (conserved by AJC)."""
    a, ad, i_f = _fock_ops(n_max)
    sign = -1.0 if anti else 1.0
    return kron(np.eye(2), ad @ a) + sign * kron(_SPIN.proj_B, i_f)


def h_two_qubit_full(split1: float, split2: float, g1: float, g2: float, omega_nt: float,
                     n_max: int, signs=(1, 1)) -> np.ndarray:
    """Two bright/dark qubits sharing one mode (qubit x qubit x Fock).

    ``signs`` multiplies each spin's coupling; the default ``(+1, +1)`` has no
    relative phase between the two spins.
    """
    a, ad, i_f = _fock_ops(n_max)
    i2 = np.eye(2)
    sz = _SPIN.sigma_z
    x = a + ad
    return (omega_nt * kron(i2, i2, ad @ a)
            + 0.5 * split1 * kron(sz, i2, i_f) + 0.5 * split2 * kron(i2, sz, i_f)
            + signs[0] * g1 * kron(SX, i2, x) + signs[1] * g2 * kron(i2, SX, x))


def h_spin_spin(lambda_eff: float) -> np.ndarray:
    """Exchange ``lambda (s+ s- + s- s+)`` on qubit x qubit."""
    sp, sm = _SPIN.sigma_plus, _SPIN.sigma_minus
    return lambda_eff * (kron(sp, sm) + kron(sm, sp))


@dataclass(frozen=True)
class TwoQubitModel:
    rabi1: float
    rabi2: float
    lambda_eff: float
    detuning1: float = 0.0
    detuning2: float = 0.0

    @property
    def delta_plus(self) -> float:
        return self.lambda_eff + 0.5 * (self.detuning1 + self.detuning2)

    @property
    def delta_minus(self) -> float:
        return self.lambda_eff - 0.5 * (self.detuning1 + self.detuning2)

    @property
    def rabi_bar1(self) -> float:
        return self.rabi1 / math.sqrt(2)

    @property
    def rabi_bar2(self) -> float:
        return self.rabi2 / math.sqrt(2)


NINE_LEVEL_LABELS = ("0,1", "+", "-", "1,0", "0,0", "1,1", "B,B", "0,B", "B,0")
S1 = slice(0, 4)
S2 = slice(4, 9)


def h_nine_level(m: TwoQubitModel) -> np.ndarray:
    """Driven two-spin Hamiltonian in the ``S = S1 (+) S2`` basis (9 x 9)."""
    o1, o2 = m.rabi_bar1, m.rabi_bar2
    r1, r2 = m.rabi1, m.rabi2
    d1, d2 = m.detuning1, m.detuning2
    h = np.array([
        [0,  o1,  o1,  0,  0, 0, 0,       0,  0],
        [o1, m.delta_plus, 0, o2, 0, 0, 0, 0,  0],
        [o1, 0, -m.delta_minus, -o2, 0, 0, 0, 0, 0],
        [0,  o2, -o2,  0,  0, 0, 0,       0,  0],
        [0,  0,   0,   0,  0, 0, 0,       r2, r1],
        [0,  0,   0,   0,  0, 0, 0,       0,  0],
        [0,  0,   0,   0,  0, 0, d1 + d2, r1, r2],
        [0,  0,   0,   0,  r2, 0, r1,     d2, 0],
        [0,  0,   0,   0,  r1, 0, r2,     0,  d1],
    ], dtype=complex)
    return h


def h_subspace4(m: TwoQubitModel) -> np.ndarray:
    """Driven two-spin Hamiltonian on ``{|0,1>, |+>, |->, |1,0>}``."""
    o1, o2 = m.rabi_bar1, m.rabi_bar2
    return np.array([
        [0,  o1, o1, 0],
        [o1, m.delta_plus, 0, o2],
        [o1, 0, -m.delta_minus, -o2],
        [0,  o2, -o2, 0],
    ], dtype=complex)


def nine_level_basis() -> np.ndarray:
    """Unitary whose columns are the ``S`` basis states in the product basis.

    Product index is ``3 * i1 + i2`` with per-spin levels ``|0>, |B>, |D>``.
    """
    z, b, d = 0, 1, 2

    def ket(i, j):
        v = np.zeros(9, dtype=complex)
        v[3 * i + j] = 1.0
        return v

    r = 1 / math.sqrt(2)
    cols = [ket(z, d), r * (ket(b, d) + ket(d, b)), r * (ket(b, d) - ket(d, b)), ket(d, z),
            ket(z, z), ket(d, d), ket(b, b), ket(z, b), ket(b, z)]
    return np.stack(cols, axis=1)


def h_two_spin_driven(m: TwoQubitModel) -> np.ndarray:
    """Same physics as :func:`h_nine_level` built from product operators (3 x 3 levels).

    Local detunings on ``|B>``, drives ``|B><0| + h.c.`` and the exchange
    ``lambda (|B,D><D,B| + h.c.)``. Agrees with the 9-level matrix when the
    two detunings are equal; for ``detuning1 != detuning2`` this form also has
    a ``(detuning1 - detuning2)/2`` coupling between ``|+>`` and ``|->``.
    """
    i3 = np.eye(3)
    pb = three_level(1, 1)
    drive = three_level(1, 0) + three_level(0, 1)
    sp = three_level(1, 2)
    sm = sp.conj().T
    return (m.detuning1 * kron(pb, i3) + m.detuning2 * kron(i3, pb)
            + m.rabi1 * kron(drive, i3) + m.rabi2 * kron(i3, drive)
            + m.lambda_eff * (kron(sp, sm) + kron(sm, sp)))


def swap_rabi_for_full_transfer(lambda_eff: float, k: int = 2) -> float:
    """Drive strength giving complete ``|0,1> -> |1,0>`` transfer at ``pi / lambda``.

    With zero detunings the 4-level problem splits into two two-level systems
    of generalized Rabi frequency ``sqrt(lambda^2 + 4 Omega^2)``; both return
    at ``t = pi / lambda`` when that equals ``2 k lambda``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return abs(lambda_eff) * math.sqrt(4 * k * k - 1) / 2
