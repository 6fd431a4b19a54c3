import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nvtube.dynamics import (LindbladTerm, MasterEquation, PhysicsValidityError, Trajectory,
                             check_density, density_errors, evolve_closed, evolve_liouvillian,
                             evolve_master, fock_state, jc_master_equation, liouvillian,
                             observables, thermal_state, top_fock_population, unvec, vec)
from nvtube.hamiltonians import h_jc
from nvtube.operators import annihilation, basis, kron, number, spin_operators

SP = spin_operators()


def jc_ops(n_max):
    nf = n_max + 1
    return {"P_B": kron(SP.proj_B, np.eye(nf)), "n": kron(np.eye(2), number(n_max))}


def test_thermal_state_values():
    assert np.array_equal(thermal_state(0.0, 5), fock_state(0, 5))
    rho = thermal_state(0.2, 15)
    q = 0.2 / 1.2
    p0 = (1 - q) / (1 - q**16)
    assert rho[0, 0].real == pytest.approx(p0, rel=1e-14)
    assert rho[0, 0].real == pytest.approx(0.8333333, abs=1e-6)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-15)
    assert observables(rho, {"n": number(15)})["n"] == pytest.approx(0.2, abs=1e-10)


def test_thermal_state_rejects_short_truncation():
    with pytest.raises(ValueError):
        thermal_state(0.2, 5)
    with pytest.raises(ValueError):
        thermal_state(-0.1, 5)


def test_observables_vacuum():
    vals = observables(fock_state(0, 4), {"n": number(4), "I": np.eye(5)})
    assert vals == {"n": 0.0, "I": 1.0}


def test_closed_zero_hamiltonian():
    psi = (basis(3, 0) + 1j * basis(3, 2)) / math.sqrt(2)
    tr = evolve_closed(np.zeros((3, 3)), psi, np.linspace(0, 5, 11), store_states=True)
    for s in tr.states:
        np.testing.assert_array_equal(s, psi)


def test_closed_jc_vacuum_rabi():
    g, w, n_max = 0.3, 5.0, 4
    psi = kron(basis(2, 0), basis(n_max + 1, 0))
    t = np.linspace(0, 4 * math.pi / g, 2001)
    h = h_jc(w, g, w, n_max)
    tr = evolve_closed(h, psi, t, {**jc_ops(n_max), "E": h}, fock_dim=n_max + 1)
    assert np.abs(tr.expect["P_B"] - np.cos(g * t) ** 2).max() < 1e-10
    assert np.ptp(tr.expect["E"]) < 1e-10
    assert tr.flags["truncation_ok"]


def test_closed_rejects_non_hermitian():
    with pytest.raises(ValueError):
        evolve_closed(np.array([[0, 1], [0, 0]]), basis(2, 0), [0, 1])


def test_time_grid_validation():
    with pytest.raises(ValueError):
        evolve_closed(np.eye(2), basis(2, 0), [0, 1, 1])
    with pytest.raises(ValueError):
        evolve_closed(np.eye(2), basis(2, 0), [])


def test_master_unitary_limit():
    g, w, n_max = 0.3, 1.0, 3
    h = h_jc(w, g, w, n_max)
    psi = kron(basis(2, 0), basis(n_max + 1, 1))
    rho0 = np.outer(psi, psi.conj())
    t = np.linspace(0, 2 * math.pi / g, 41)
    a = evolve_master(MasterEquation(h), rho0, t, jc_ops(n_max))
    b = evolve_closed(h, rho0, t, jc_ops(n_max))
    for k in a.expect:
        assert np.abs(a.expect[k] - b.expect[k]).max() < 1e-8


def test_thermal_state_is_stationary():
    w, gm, nth, n_max = 1.0, 0.05, 1.0, 40
    a = annihilation(n_max)
    me = MasterEquation(w * number(n_max),
                        (LindbladTerm(a.conj().T, nth * gm), LindbladTerm(a, (nth + 1) * gm)))
    rho = thermal_state(nth, n_max)
    assert np.linalg.norm(me.rhs(rho)) < 1e-10 * gm
    v = liouvillian(me) @ vec(rho)
    assert np.linalg.norm(v) < 1e-10 * gm


def _damped_jc(n_max=5, g=1.0):
    h = h_jc(1.0, g, 1.0, n_max) - 1.0 * kron(np.eye(2), number(n_max))
    return jc_master_equation(h, n_max, 0.1 * g, 1e-3 * g, 100.0)


def test_master_matches_liouvillian_oracle():
    n_max = 5
    me = _damped_jc(n_max)
    rho0 = kron(SP.proj_B, fock_state(0, n_max))
    t = np.linspace(0, 4 * math.pi, 81)
    a = evolve_master(me, rho0, t, jc_ops(n_max))
    b = evolve_liouvillian(me, rho0, t, jc_ops(n_max))
    for k in a.expect:
        assert np.abs(a.expect[k] - b.expect[k]).max() < 1e-8


def test_rk4_order():
    me = _damped_jc(3)
    rho0 = kron(SP.proj_B, fock_state(0, 3))
    t = np.array([0.0, 2.0])
    ref = evolve_liouvillian(me, rho0, t, store_states=True).states[-1]
    errs = []
    for dt in (0.1, 0.05, 0.025):
        got = evolve_master(me, rho0, t, dt=dt, store_states=True).states[-1]
        errs.append(np.abs(got - ref).max())
    assert errs[0] / errs[1] >= 8
    assert errs[1] / errs[2] >= 8


def test_step_rule():
    me = _damped_jc(3)
    dt = me.default_step()
    ev = np.linalg.eigvalsh(me.H)
    gmax = max(t.rate for t in me.terms)
    assert dt <= 0.01 / (ev[-1] - ev[0]) + 1e-15
    assert dt <= 0.01 / gmax + 1e-15
    assert MasterEquation(np.zeros((2, 2))).default_step() == math.inf


def test_liouvillian_properties():
    me = _damped_jc(3)
    lv = liouvillian(me)
    d = me.dim
    left = vec(np.eye(d)).conj() @ lv
    assert np.abs(left).max() < 1e-10
    assert np.linalg.eigvals(lv).real.max() <= 1e-10


def test_vec_roundtrip(rng):
    a, b, r = (rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(3))
    np.testing.assert_array_equal(unvec(vec(r), 4), r)
    np.testing.assert_allclose(vec(a @ r @ b), np.kron(b.T, a) @ vec(r), atol=1e-12)


def test_liouvillian_cap():
    with pytest.raises(ValueError):
        liouvillian(MasterEquation(np.zeros((65, 65))))


def test_master_equation_validation():
    with pytest.raises(ValueError):
        MasterEquation(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        MasterEquation(np.eye(2), (LindbladTerm(np.eye(3), 1.0),))
    with pytest.raises(ValueError):
        LindbladTerm(np.eye(2), -1.0)


def test_positivity_violation_raises():
    bad = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(PhysicsValidityError):
        check_density(bad)
    with pytest.raises(PhysicsValidityError):
        evolve_master(MasterEquation(np.zeros((2, 2))), bad, [0, 1])
    err = density_errors(np.eye(2) / 2)
    assert err["trace"] == 1.0 and err["min_eig"] == 0.5


def test_truncation_flag():
    n_max = 3
    h = h_jc(1.0, 0.5, 1.0, n_max)
    psi = kron(basis(2, 0), basis(n_max + 1, 2))
    tr = evolve_closed(h, psi, np.linspace(0, 10, 51), fock_dim=n_max + 1)
    assert not tr.flags["truncation_ok"]
    assert top_fock_population(psi, n_max + 1) == 0.0


def test_trajectory_serialization():
    tr = Trajectory(np.array([0.0, 0.1]), {"P_B": np.array([1.0, 1 / 3])})
    assert tr.to_csv() == "time_s,P_B\n0,1\n0.10000000000000001,0.33333333333333331\n"
    d = json.loads(tr.to_json())
    assert d["P_B"][1] == 1 / 3 and d["time_s"] == [0.0, 0.1]


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_random_master_equations_stay_physical(d, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = x + x.conj().T
    terms = tuple(LindbladTerm(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)),
                               float(rng.uniform(0, 0.5))) for _ in range(2))
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    rho0 = np.outer(v, v.conj()) / np.vdot(v, v).real
    tr = evolve_master(MasterEquation(h, terms), rho0, np.linspace(0, 2, 11), store_states=True)
    for s in tr.states:
        e = density_errors(s)
        assert abs(e["trace"] - 1) < 1e-7 and e["min_eig"] >= -1e-8 and e["hermiticity"] < 1e-10
