"""Dense operators on tensor-product Hilbert spaces.

Matrices are plain complex128 ``numpy.ndarray`` objects. Tensor factors are
always ordered spins first, phonon mode last.

Basis conventions
-----------------
* bare spin-1: ``|0>, |+1>, |-1>``
* bright/dark three-level: ``|0>, |B>, |D>`` with ``|B> = (|+1> + |-1>)/sqrt2``
  and ``|D> = (|+1> - |-1>)/sqrt2``
* qubit: ``|B>, |D>`` with ``sigma_z = |B><B| - |D><D|`` and ``sigma_+ = |B><D|``
"""

from dataclasses import dataclass
from functools import reduce
import json

import numpy as np

from .constants import EPS_HERM


@dataclass(frozen=True)
class Factor:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in ("fock", "spin3", "qubit"):
            raise ValueError(f"unknown factor kind {self.kind!r}")
        if self.kind == "fock" and self.dim < 2:
            raise ValueError("Fock truncation needs N_max >= 1")

    @property
    def n_max(self) -> int:
        return self.dim - 1


def fock(n_max: int) -> Factor:
    return Factor("fock", int(n_max) + 1)


def spin3() -> Factor:
    return Factor("spin3", 3)


def qubit() -> Factor:
    return Factor("qubit", 2)


@dataclass(frozen=True)
class HilbertSpace:
    factors: tuple

    def __init__(self, *factors: Factor):
        kinds = [f.kind for f in factors]
        if "fock" in kinds and kinds.index("fock") != len(kinds) - 1:
            raise ValueError("the phonon (Fock) factor must be the last tensor factor")
        if kinds.count("fock") > 1:
            raise ValueError("at most one phonon mode is supported")
        object.__setattr__(self, "factors", tuple(factors))

    @property
    def dims(self) -> tuple:
        return tuple(f.dim for f in self.factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)


# -- single-factor operators -------------------------------------------------

def annihilation(n_max: int) -> np.ndarray:
    """Truncated lowering operator, ``a[n-1, n] = sqrt(n)``."""
    if n_max < 1:
        raise ValueError("N_max must be >= 1")
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1).astype(complex)


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1)).astype(complex)


def fock_projector(n_max: int, n: int) -> np.ndarray:
    p = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    p[n, n] = 1.0
    return p


def basis(dim: int, i: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[i] = 1.0
    return v


#: Columns are |0>, |B>, |D> written in the bare basis |0>, |+1>, |-1>.
BRIGHT_DARK = np.array([[1, 0, 0],
                        [0, 1, 1],
                        [0, 1, -1]], dtype=complex) / np.array([1, np.sqrt(2), np.sqrt(2)])


@dataclass(frozen=True)
class SpinOperators:
    """Spin-1 matrices in the bare basis plus bright/dark operators."""
    S_z: np.ndarray
    S_x: np.ndarray
    S_y: np.ndarray
    U: np.ndarray
    sigma_z: np.ndarray
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    proj_B: np.ndarray
    proj_D: np.ndarray


def spin_operators() -> SpinOperators:
    sz = np.diag([0, 1, -1]).astype(complex)
    # <+1|S_+|0> = <0|S_+|-1> = sqrt2
    s_plus = np.zeros((3, 3), dtype=complex)
    s_plus[1, 0] = s_plus[0, 2] = np.sqrt(2)
    sx = 0.5 * (s_plus + s_plus.conj().T)
    sy = -0.5j * (s_plus - s_plus.conj().T)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)
    return SpinOperators(
        S_z=sz, S_x=sx, S_y=sy, U=BRIGHT_DARK.copy(),
        sigma_z=np.diag([1, -1]).astype(complex),
        sigma_plus=sp, sigma_minus=sp.T.copy(),
        proj_B=np.diag([1, 0]).astype(complex),
        proj_D=np.diag([0, 1]).astype(complex),
    )


def three_level(i: int, j: int) -> np.ndarray:
    """``|i><j|`` on the bright/dark three-level basis (0 -> |0>, 1 -> |B>, 2 -> |D>)."""
    m = np.zeros((3, 3), dtype=complex)
    m[i, j] = 1.0
    return m


# -- algebra -----------------------------------------------------------------

def kron(*ops) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, space: HilbertSpace, index: int) -> np.ndarray:
    """Lift a single-factor operator to the full space (identity elsewhere)."""
    d = space.dims[index]
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match factor {index} of dim {d}")
    pieces = [np.eye(k, dtype=complex) for k in space.dims]
    pieces[index] = np.asarray(op, dtype=complex)
    return kron(*pieces)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[1] != b.shape[0] or b.shape[1] != a.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return a @ b - b @ a


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - dagger(a)))) if a.size else 0.0


def expectation(state: np.ndarray, op: np.ndarray, hermitian: bool = True) -> float | complex:
    """``Tr(rho O)`` for a density matrix, or ``<psi|O|psi>`` for a ket.

    For Hermitian ``op`` the real part is returned after checking that the
    imaginary residue is below 1e-10.
    """
    state = np.asarray(state)
    op = np.asarray(op)
    n = state.shape[0]
    if op.shape != (n, n) or (state.ndim == 2 and state.shape != (n, n)):
        raise ValueError(f"shape mismatch: state {state.shape}, operator {op.shape}")
    if state.ndim == 1:
        val = np.vdot(state, op @ state)
    else:
        val = np.einsum("ij,ji->", state, op)
    if not hermitian:
        return complex(val)
    if abs(val.imag) > EPS_HERM * max(1.0, abs(val.real)):
        raise ValueError(f"expectation of a Hermitian operator has imaginary part {val.imag:.3g}")
    return float(val.real)


def to_json(a: np.ndarray) -> str:
    """Serialize as nested lists of ``[re, im]`` pairs."""
    a = np.asarray(a, dtype=complex)
    return json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in a])


def from_json(text: str) -> np.ndarray:
    arr = np.asarray(json.loads(text), dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
