"""Closed and Lindblad time evolution on dense matrices.

The master equation is

    d rho / dt = -i [H, rho] + sum_k r_k D[o_k] rho,
    D[o] rho = o rho o^+ - (o^+ o rho + rho o^+ o) / 2,

integrated with fixed-step classic RK4. The vectorized generator from
:func:`liouvillian` together with ``scipy.linalg.expm`` provides an
independent reference propagator for small systems.
"""

from dataclasses import dataclass, field
import io
import json
import math

import numpy as np
from scipy import sparse
from scipy.linalg import expm

from .constants import EPS_HERM, EPS_POS, TRUNCATION_LIMIT
from .operators import (HilbertSpace, annihilation, embed, expectation, fock, hermiticity_error,
                        qubit, spin_operators)

TRACE_DRIFT = 1e-7
STEP_FACTOR = 0.01
LIOUVILLIAN_CAP = 4096


class PhysicsValidityError(RuntimeError):
    """A propagated state violated a density-matrix or truncation invariant."""


# -- states ------------------------------------------------------------------

def thermal_state(nbar: float, n_max: int, tol: float = 1e-8) -> np.ndarray:
    """Truncated Bose-Einstein state with mean occupation ``nbar``.

    Raises ``ValueError`` if the weight beyond the truncation,
    ``(nbar / (1 + nbar))**(n_max + 1)``, is not below ``tol``.
    """
    if nbar < 0:
        raise ValueError(f"mean occupation must be >= 0, got {nbar}")
    if nbar == 0:
        rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    q = nbar / (1.0 + nbar)
    if q ** (n_max + 1) >= tol:
        raise ValueError(f"N_max={n_max} is too small for a thermal state with nbar={nbar}")
    p = q ** np.arange(n_max + 1)
    return np.diag(p / p.sum()).astype(complex)


def fock_state(n: int, n_max: int) -> np.ndarray:
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    rho[n, n] = 1.0
    return rho


def density_errors(rho: np.ndarray) -> dict:
    """Hermiticity, trace and smallest eigenvalue of ``rho``."""
    herm = hermiticity_error(rho)
    ev = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {"hermiticity": herm, "trace": float(np.trace(rho).real), "min_eig": float(ev[0])}


def check_density(rho: np.ndarray, trace_ref: float = 1.0, trace_tol: float = TRACE_DRIFT):
    err = density_errors(rho)
    if err["hermiticity"] > EPS_HERM:
        raise PhysicsValidityError(f"state lost Hermiticity: {err['hermiticity']:.3g}")
    if abs(err["trace"] - trace_ref) > trace_tol:
        raise PhysicsValidityError(f"trace drifted to {err['trace']!r}")
    if err["min_eig"] < -EPS_POS:
        raise PhysicsValidityError(f"negative eigenvalue {err['min_eig']:.3g}")
    return err


def top_fock_population(state: np.ndarray, fock_dim: int) -> float:
    """Population of the highest Fock level (Fock factor last)."""
    if state.ndim == 1:
        p = np.abs(state) ** 2
    else:
        p = np.real(np.diag(state))
    return float(p.reshape(-1, fock_dim)[:, -1].sum())


# -- master equation ---------------------------------------------------------

@dataclass(frozen=True)
class LindbladTerm:
    op: np.ndarray
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"Lindblad rate must be >= 0, got {self.rate}")


@dataclass(frozen=True)
class MasterEquation:
    H: np.ndarray
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        h = np.asarray(self.H, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got {h.shape}")
        if hermiticity_error(h) > EPS_HERM * max(1.0, float(np.max(np.abs(h)))):
            raise ValueError("Hamiltonian is not Hermitian")
        object.__setattr__(self, "H", h)
        terms = tuple(self.terms)
        for t in terms:
            if t.op.shape != h.shape:
                raise ValueError(f"collapse operator shape {t.op.shape} != {h.shape}")
        object.__setattr__(self, "terms", terms)

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    def effective_hamiltonian(self) -> np.ndarray:
        h = self.H.copy()
        for t in self.terms:
            h -= 0.5j * t.rate * (t.op.conj().T @ t.op)
        return h

    def jumps(self) -> list:
        return [math.sqrt(t.rate) * t.op for t in self.terms if t.rate > 0]

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        heff = self.effective_hamiltonian()
        out = -1j * (heff @ rho - rho @ heff.conj().T)
        for j in self.jumps():
            out += j @ rho @ j.conj().T
        return out

    def rate_scale(self) -> float:
        """Largest dynamical frequency: Hamiltonian spread vs dissipator strength."""
        ev = np.linalg.eigvalsh(self.H)
        spread = float(ev[-1] - ev[0])
        diss = sum(t.rate * np.linalg.norm(t.op, 2) ** 2 for t in self.terms)
        gmax = max((t.rate for t in self.terms), default=0.0)
        return max(spread, diss, gmax)

    def default_step(self) -> float:
        scale = self.rate_scale()
        return math.inf if scale == 0 else STEP_FACTOR / scale


def jc_master_equation(h: np.ndarray, n_max: int, gamma_s: float, gamma_m: float,
                       n_th: float) -> MasterEquation:
    """Spin dephasing plus thermal mechanical damping on ``qubit x Fock(n_max)``."""
    space = HilbertSpace(qubit(), fock(n_max))
    sz = embed(spin_operators().sigma_z, space, 0)
    a = embed(annihilation(n_max), space, 1)
    return MasterEquation(h, (
        LindbladTerm(sz, gamma_s),
        LindbladTerm(a.conj().T, n_th * gamma_m),
        LindbladTerm(a, (n_th + 1) * gamma_m),
    ))


# -- trajectories ------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    expect: dict
    states: list | None = None
    flags: dict = field(default_factory=dict)

    def columns(self) -> list:
        return list(self.expect)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        names = self.columns()
        buf.write(",".join(["time_s"] + names) + "\n")
        for i, t in enumerate(self.times):
            row = [t] + [self.expect[k][i] for k in names]
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self, path=None) -> str:
        payload = {"time_s": [float(t) for t in self.times]}
        payload.update({k: [float(v) for v in vals] for k, vals in self.expect.items()})
        payload["flags"] = self.flags
        text = json.dumps(payload, indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def observables(state: np.ndarray, ops: dict) -> dict:
    """Real expectation values of Hermitian observables in ``state``."""
    return {name: expectation(state, op) for name, op in ops.items()}


def _as_grid(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("time grid must be a non-empty 1-d array")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def _record(traj_expect, state, ops):
    for name, val in observables(state, ops).items():
        traj_expect[name].append(val)


def _finish(times, expect, states, flags):
    return Trajectory(times=times, expect={k: np.asarray(v) for k, v in expect.items()},
                      states=states, flags=flags)


def evolve_closed(h: np.ndarray, state: np.ndarray, times, ops: dict | None = None,
                  store_states: bool = False, fock_dim: int | None = None) -> Trajectory:
    """Unitary evolution of a ket or density matrix via the eigendecomposition of ``h``.

    The state at ``times[0]`` is the given one; each later point is reached by
    exact propagation over the grid interval.
    """
    h = np.asarray(h, dtype=complex)
    if hermiticity_error(h) > EPS_HERM * max(1.0, float(np.max(np.abs(h)))):
        raise ValueError("Hamiltonian is not Hermitian")
    times = _as_grid(times)
    ops = ops or {}
    evals, evecs = np.linalg.eigh(h)
    psi = np.asarray(state, dtype=complex)
    is_ket = psi.ndim == 1
    norm0 = np.vdot(psi, psi).real if is_ket else np.trace(psi).real
    expect = {k: [] for k in ops}
    states = [] if store_states else None
    top = 0.0
    cache = {}
    for i, t in enumerate(times):
        if i > 0:
            dt = t - times[i - 1]
            key = f"{dt:.12e}"
            u = cache.get(key)
            if u is None:
                u = (evecs * np.exp(-1j * evals * dt)) @ evecs.conj().T
                cache[key] = u
            psi = u @ psi if is_ket else u @ psi @ u.conj().T
        norm = np.vdot(psi, psi).real if is_ket else np.trace(psi).real
        if abs(norm - norm0) > 1e-10:
            raise PhysicsValidityError(f"norm drifted to {norm!r}")
        if fock_dim:
            top = max(top, top_fock_population(psi, fock_dim))
        _record(expect, psi, ops)
        if store_states:
            states.append(psi.copy())
    flags = {}
    if fock_dim:
        flags = {"top_fock_population": top, "truncation_ok": top < TRUNCATION_LIMIT}
    return _finish(times, expect, states, flags)


def evolve_master(me: MasterEquation, rho0: np.ndarray, times, ops: dict | None = None,
                  store_states: bool = False, dt: float | None = None, check: bool = True,
                  fock_dim: int | None = None) -> Trajectory:
    """Integrate the master equation with fixed-step RK4.

    Each grid interval is split into ``ceil(interval / dt)`` equal substeps,
    with ``dt`` defaulting to :meth:`MasterEquation.default_step`. With
    ``check`` the density-matrix invariants are asserted at every output time
    and a violation raises :class:`PhysicsValidityError`.
    """
    times = _as_grid(times)
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != me.H.shape:
        raise ValueError(f"initial state shape {rho.shape} != {me.H.shape}")
    if check:
        check_density(rho, trace_ref=1.0, trace_tol=1e-9)
    ops = ops or {}
    h = dt if dt is not None else me.default_step()
    heff = _maybe_sparse(me.effective_hamiltonian())
    heff_c = _maybe_sparse(me.effective_hamiltonian().conj())
    jumps = [(_maybe_sparse(j), _maybe_sparse(j.conj())) for j in me.jumps()]

    def f(r):
        # r @ X^+ == (conj(X) @ r^T)^T
        out = -1j * (heff @ r - (heff_c @ r.T).T)
        for j, jc in jumps:
            out += (jc @ (j @ r).T).T
        return out

    trace0 = float(np.trace(rho).real)
    expect = {k: [] for k in ops}
    states = [] if store_states else None
    top = 0.0
    for i, t in enumerate(times):
        if i > 0:
            interval = t - times[i - 1]
            n = max(1, math.ceil(interval / h - 1e-9)) if math.isfinite(h) else 1
            s = interval / n
            for _ in range(n):
                k1 = f(rho)
                k2 = f(rho + 0.5 * s * k1)
                k3 = f(rho + 0.5 * s * k2)
                k4 = f(rho + s * k3)
                rho = rho + (s / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if check:
            try:
                check_density(rho, trace_ref=trace0)
            except PhysicsValidityError as exc:
                raise PhysicsValidityError(f"at t={t:.6g}: {exc}") from None
        if fock_dim:
            top = max(top, top_fock_population(rho, fock_dim))
        _record(expect, rho, ops)
        if store_states:
            states.append(rho.copy())
    flags = {}
    if fock_dim:
        flags = {"top_fock_population": top, "truncation_ok": top < TRUNCATION_LIMIT}
    return _finish(times, expect, states, flags)


def _maybe_sparse(m, density=0.1):
    """CSR copy of a mostly-zero operator; products with dense ``rho`` stay dense."""
    if m.shape[0] >= 32 and np.count_nonzero(m) <= density * m.size:
        return sparse.csr_matrix(m)
    return m


# -- superoperator reference -------------------------------------------------

def liouvillian(me: MasterEquation) -> np.ndarray:
    """Generator acting on column-stacked ``vec(rho)``.

    Uses ``vec(A rho B) = (B^T kron A) vec(rho)``.
    """
    d = me.dim
    if d * d > LIOUVILLIAN_CAP:
        raise ValueError(f"superoperator dimension {d * d} exceeds cap {LIOUVILLIAN_CAP}")
    eye = np.eye(d, dtype=complex)
    h = me.H
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for t in me.terms:
        o = t.op
        od_o = o.conj().T @ o
        lv += t.rate * (np.kron(o.conj(), o) - 0.5 * np.kron(eye, od_o) - 0.5 * np.kron(od_o.T, eye))
    return lv


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v).reshape((d, d), order="F")


def evolve_liouvillian(me: MasterEquation, rho0: np.ndarray, times, ops: dict | None = None,
                       store_states: bool = False) -> Trajectory:
    """Reference propagation ``vec(rho(t)) = expm(L (t - t0)) vec(rho0)``."""
    times = _as_grid(times)
    lv = liouvillian(me)
    d = me.dim
    v0 = vec(np.asarray(rho0, dtype=complex))
    ops = ops or {}
    expect = {k: [] for k in ops}
    states = [] if store_states else None
    for t in times:
        rho = unvec(expm(lv * (t - times[0])) @ v0, d)
        _record(expect, rho, ops)
        if store_states:
            states.append(rho)
    return _finish(times, expect, states, {})
