"""Named experiment runners: mode table, coupling sweep, Rabi dynamics, SWAP gate, sweeps.

Each runner returns a :class:`RunResult` holding a JSON-ready
:class:`RunReport` and named output tables. Nothing here touches the
filesystem; :mod:`nvtube.cli` writes the results.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
import io
import json
import math
import time
import warnings

import numpy as np

from . import beam, coupling
from .config import TWO_PI, Config, ConfigError, DeviceBlock
from .constants import TRUNCATION_LIMIT
from .dynamics import (PhysicsValidityError, LindbladTerm, MasterEquation, Trajectory,
                       evolve_closed, evolve_master, fock_state, jc_master_equation, thermal_state)
from .hamiltonians import (NINE_LEVEL_LABELS, TwoQubitModel, excitation_number, h_jc,
                           h_nine_level, h_subspace4, h_two_qubit_full, nine_level_basis,
                           three_level)
from .operators import basis, kron, spin_operators

MAX_SWEEP_POINTS = 10_000


@dataclass
class Table:
    columns: dict

    def to_csv(self) -> str:
        names = list(self.columns)
        buf = io.StringIO()
        buf.write(",".join(names) + "\n")
        for row in zip(*self.columns.values()):
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({k: [_jsonable(v) for v in vals] for k, vals in self.columns.items()},
                          indent=1)

    def __len__(self):
        return len(next(iter(self.columns.values()), []))


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def trajectory_table(tr: Trajectory) -> Table:
    cols = {"time_s": tr.times}
    cols.update(tr.expect)
    return Table(cols)


@dataclass
class RunReport:
    scenario: str
    rates: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {"scenario": self.scenario, "flags": self.flags, "rates": self.rates,
             "summary": self.summary, "outputs": self.outputs}
        if include_timing:
            d["wall_clock_s"] = self.wall_clock_s
        return _jsonable(d)

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=False)


@dataclass
class RunResult:
    report: RunReport
    tables: dict = field(default_factory=dict)
    trajectories: dict = field(default_factory=dict)


def _flags(extra=None, **kw) -> dict:
    base = {"dispersive": True, "long_wire": True, "truncation_ok": True}
    base.update(extra or {})
    base.update(kw)
    return {k: bool(v) for k, v in base.items()}


def rates_report(rates: coupling.DerivedRates) -> dict:
    """DerivedRates as a dict with frequencies converted to Hz (divided by 2 pi)."""
    hz = lambda x: x / TWO_PI  # noqa: E731
    t_sw = rates.t_sw
    budget = {
        "T_sw_s": t_sw,
        "T_sw_times_Gamma": t_sw * rates.Gamma,
        "T_sw_over_T2": None,
        "F": rates.fidelity,
    }
    return {
        "g_over_2pi_Hz": hz(rates.g),
        "Omega_over_2pi_Hz": hz(rates.Omega),
        "delta_plus_over_2pi_Hz": hz(rates.delta_plus),
        "delta_minus_over_2pi_Hz": hz(rates.delta_minus),
        "delta_over_2pi_Hz": hz(rates.delta),
        "Lambda_over_2pi_Hz": hz(rates.Lambda),
        "n_th": rates.n_th,
        "gamma_m_over_2pi_Hz": hz(rates.gamma_m),
        "lambda_eff_over_2pi_Hz": hz(rates.lambda_eff),
        "Gamma_over_2pi_Hz": hz(rates.Gamma),
        "l_c_m": rates.l_c,
        "t_sw_s": t_sw,
        "fidelity_budget": budget,
    }


def budget_breakdown(lambda_eff: float, decay: float, t2: float) -> dict:
    """Gate budget with every intermediate term, for reports."""
    t_sw, f = coupling.gate_budget(lambda_eff, decay, t2)
    a = t_sw * decay
    b = t_sw / t2
    return {
        "T_sw_s": t_sw,
        "T_sw_times_Gamma": a,
        "T_sw_over_T2": b,
        "F_unclamped": 1.0 - a - b,
        "F": f,
        "arithmetic": f"F = 1 - {a:.6g} - {b:.6g} = {1.0 - a - b:.6g}",
    }


def _device_rates(cfg: Config):
    dev = cfg.device_params()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", coupling.ValidityWarning)
        return dev, coupling.derive_rates(dev)


def _timed(fn):
    def wrapper(cfg, *args, **kwargs):
        t0 = time.perf_counter()
        res = fn(cfg, *args, **kwargs)
        res.report.wall_clock_s = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- modes -------------------------------------------------------------------

@_timed
def run_modes(cfg: Config, n_modes: int = 5) -> RunResult:
    """Table of the first ``n_modes`` flexural modes for both boundary conditions."""
    geom = cfg.beam_geometry()
    mass = beam.effective_mass(geom, cfg.geometry.effective_mass_kg)
    cols = {"boundary": [], "n": [], "kL": [], "omega_over_2pi_Hz": [], "u_zp_m": []}
    for bc in (beam.BoundaryCondition.DOUBLY_CLAMPED, beam.BoundaryCondition.CANTILEVER):
        for n in range(n_modes):
            w = beam.eigenfrequency(geom, bc, n)
            cols["boundary"].append(bc.value)
            cols["n"].append(n)
            cols["kL"].append(beam.frequency_root(bc, n))
            cols["omega_over_2pi_Hz"].append(w / TWO_PI)
            cols["u_zp_m"].append(beam.zero_point_amplitude(mass, w))
    cs = beam.cross_section(geom)
    report = RunReport("modes", flags=_flags(long_wire=cfg.geometry.length_m >= 10 * cfg.device.distance_m),
                       summary={"area_m2": cs.area, "moment_m4": cs.moment, "mass_kg": mass,
                                "mass_rhoAL_kg": beam.effective_mass(geom)})
    return RunResult(report, {"modes": Table(cols)})


# -- coupling ----------------------------------------------------------------

def g_vs_distance(cfg: Config, distances) -> np.ndarray:
    mode = cfg.mode()
    return np.array([coupling.spin_phonon_g(cfg.device.current_A, d, mode.mass, mode.omega)
                     for d in distances])


def g_vs_length(cfg: Config, lengths) -> np.ndarray:
    """Coupling versus tube length, with mass and frequency from beam theory."""
    out = []
    for L in lengths:
        geom = replace(cfg.beam_geometry(), length=float(L))
        w = beam.eigenfrequency(geom, cfg.boundary(), cfg.geometry.mode_index)
        m = beam.effective_mass(geom)
        out.append(coupling.spin_phonon_g(cfg.device.current_A, cfg.device.distance_m, m, w))
    return np.array(out)


@_timed
def run_coupling(cfg: Config) -> RunResult:
    """Derived device rates plus g(d) and g(L) curves."""
    dev, rates = _device_rates(cfg)
    sc = cfg.scenario.coupling
    d = np.linspace(sc.d_min_m, sc.d_max_m, sc.d_points)
    lengths = np.linspace(sc.L_min_m, sc.L_max_m, sc.L_points)
    tables = {
        "g_vs_distance": Table({"d_m": d, "g_over_2pi_Hz": g_vs_distance(cfg, d) / TWO_PI}),
        "g_vs_length": Table({"L_m": lengths, "g_over_2pi_Hz": g_vs_length(cfg, lengths) / TWO_PI}),
    }
    rep = rates_report(rates)
    if rates.lambda_eff > 0:
        rep["fidelity_budget"] = budget_breakdown(rates.lambda_eff, rates.Gamma, dev.t2)
    report = RunReport("coupling", rates=rep, flags=_flags(rates.flags))
    return RunResult(report, tables)


# -- rabi ----------------------------------------------------------------------

def period_maxima(times, values, period):
    """Maximum of ``values`` inside each complete window ``[k T, (k+1) T)``."""
    times = np.asarray(times)
    values = np.asarray(values)
    n_full = int(math.floor((times[-1] - times[0]) / period + 1e-9))
    peaks = []
    for k in range(n_full):
        lo = times[0] + k * period
        m = (times >= lo - 1e-12 * period) & (times < lo + period * (1 - 1e-12))
        if k == n_full - 1:
            m |= np.isclose(times, lo + period)
        peaks.append(float(values[m].max()))
    return np.array(peaks)


def thermal_jc_population(times, g, nbar, n_terms=200):
    """Closed resonant JC bright-state population averaged over a thermal mode."""
    q = nbar / (1 + nbar)
    n = np.arange(n_terms)
    p = (1 - q) * q**n
    return (p[:, None] * np.cos(g * np.sqrt(n + 1)[:, None] * np.asarray(times)) ** 2).sum(0)


@_timed
def run_rabi(cfg: Config) -> RunResult:
    """Closed and dissipative vacuum Rabi oscillations on resonance (Lambda = omega_nt).

    Time is integrated in the frame rotating with ``omega_nt (a^+a + |B><B|)``,
    which commutes with the resonant JC Hamiltonian, with every collapse
    operator's dissipator and with the recorded observables, so trajectories
    are identical to the lab frame.
    """
    sc = cfg.scenario.rabi
    n_max = cfg.simulation.n_max
    mode = cfg.mode()
    w = mode.omega
    if sc.coupling_over_2pi_Hz is not None:
        g = TWO_PI * sc.coupling_over_2pi_Hz
    else:
        _, rates = _device_rates(cfg)
        g = rates.g
    if not g > 0:
        raise ConfigError("rabi: coupling g must be positive")
    if sc.frame not in ("rotating", "lab"):
        raise ConfigError(f"scenario.rabi.frame: unknown value {sc.frame!r}")
    h = h_jc(w, g, w, n_max)
    if sc.frame == "rotating":
        h = h - w * excitation_number(n_max)
    if sc.initial_phonon == "thermal":
        try:
            phonon = thermal_state(sc.initial_occupation, n_max)
        except ValueError as exc:
            raise ConfigError(f"rabi: {exc}") from None
    elif sc.initial_phonon == "fock":
        phonon = fock_state(int(round(sc.initial_occupation)), n_max)
    else:
        raise ConfigError(f"scenario.rabi.initial_phonon: unknown value {sc.initial_phonon!r}")
    sp = spin_operators()
    rho0 = kron(sp.proj_B, phonon)
    i_f = np.eye(n_max + 1)
    ops = {
        "P_B": kron(sp.proj_B, i_f),
        "P_D": kron(sp.proj_D, i_f),
        "n_phonon": kron(np.eye(2), np.diag(np.arange(n_max + 1))),
    }
    t_end = cfg.simulation.t_end_s or sc.periods * math.pi / g
    times = np.linspace(0.0, t_end, cfg.simulation.samples)
    closed = evolve_closed(h, rho0, times, ops, fock_dim=n_max + 1)
    me = jc_master_equation(h, n_max, sc.gamma_s_over_g * g, sc.gamma_m_over_g * g, sc.n_th)
    diss = evolve_master(me, rho0, times, ops, fock_dim=n_max + 1)
    trunc_ok = closed.flags["truncation_ok"] and diss.flags["truncation_ok"]
    if not trunc_ok:
        raise PhysicsValidityError(
            "top Fock level population "
            f"{max(closed.flags['top_fock_population'], diss.flags['top_fock_population']):.3g} "
            f"exceeds {TRUNCATION_LIMIT:g}; increase simulation.n_max")
    period = math.pi / g
    first = times <= period
    summary = {
        "g_over_2pi_Hz": g / TWO_PI,
        "rabi_period_s": period,
        "closed_period_maxima": period_maxima(times, closed.expect["P_B"], period).tolist(),
        "dissipative_period_maxima": period_maxima(times, diss.expect["P_B"], period).tolist(),
        "closed_first_minimum_s": float(times[first][np.argmin(closed.expect["P_B"][first])]),
        "top_fock_population": max(closed.flags["top_fock_population"],
                                   diss.flags["top_fock_population"]),
        "strong_coupling": bool(g > max(sc.gamma_s_over_g * g, sc.n_th * sc.gamma_m_over_g * g)),
    }
    report = RunReport("rabi", flags=_flags(truncation_ok=trunc_ok), summary=summary)
    return RunResult(report,
                     tables={"rabi_closed": trajectory_table(closed),
                             "rabi_dissipative": trajectory_table(diss)},
                     trajectories={"closed": closed, "dissipative": diss})


# -- swap ----------------------------------------------------------------------

INITIAL_STATES = ("0,1", "1,0", "1,1", "0,0")


def nine_level_observables() -> dict:
    """Populations of every S-basis state and of each spin's |0>, |B>, |D> levels."""
    ops = {}
    for i, lab in enumerate(NINE_LEVEL_LABELS):
        p = np.zeros((9, 9), dtype=complex)
        p[i, i] = 1.0
        ops[f"P[{lab}]"] = p
    u = nine_level_basis()
    i3 = np.eye(3)
    for lvl, name in ((0, "0"), (1, "B"), (2, "D")):
        proj = three_level(lvl, lvl)
        ops[f"NV1[{name}]"] = u.conj().T @ kron(proj, i3) @ u
        ops[f"NV2[{name}]"] = u.conj().T @ kron(i3, proj) @ u
    return ops


def swap_model(cfg: Config):
    sc = cfg.scenario.swap
    if sc.lambda_eff_over_2pi_Hz is not None:
        lam = TWO_PI * sc.lambda_eff_over_2pi_Hz
    else:
        _, rates = _device_rates(cfg)
        lam = rates.lambda_eff
    if not lam > 0:
        raise ConfigError("swap: lambda_eff must be positive (set scenario.swap.lambda_eff_over_2pi_Hz)")
    if len(sc.detuning_over_lambda) != 2:
        raise ConfigError("scenario.swap.detuning_over_lambda must have two entries")
    d1, d2 = (x * lam for x in sc.detuning_over_lambda)
    r = sc.rabi_over_lambda * lam
    return TwoQubitModel(rabi1=r, rabi2=r, lambda_eff=lam, detuning1=d1, detuning2=d2)


def _swap_decay(cfg: Config):
    sc = cfg.scenario.swap
    if sc.decay_over_2pi_Hz is not None:
        return TWO_PI * sc.decay_over_2pi_Hz
    _, rates = _device_rates(cfg)
    return rates.Gamma


def swap_master_equation(m: TwoQubitModel, decay: float, t2: float) -> MasterEquation:
    """9-level model with decay of |+->, and 1/T2 dephasing of each logical qubit."""
    terms = []
    for i in (1, 2):
        p = np.zeros((9, 9), dtype=complex)
        p[i, i] = 1.0
        terms.append(LindbladTerm(p, decay))
    u = nine_level_basis()
    i3 = np.eye(3)
    z = three_level(0, 0) - three_level(2, 2)
    for op in (kron(z, i3), kron(i3, z)):
        terms.append(LindbladTerm(u.conj().T @ op @ u, 0.5 / t2))
    return MasterEquation(h_nine_level(m), tuple(terms))


@_timed
def run_swap(cfg: Config) -> RunResult:
    """Driven SWAP through the bright-state pathway, ending at T_sw = pi / lambda_eff."""
    sc = cfg.scenario.swap
    m = swap_model(cfg)
    t_sw = math.pi / m.lambda_eff
    times = np.linspace(0.0, cfg.simulation.t_end_s or t_sw, cfg.simulation.samples)
    idx = {lab: i for i, lab in enumerate(NINE_LEVEL_LABELS)}
    tables, trajs = {}, {}
    summary = {"T_sw_s": t_sw, "lambda_eff_over_2pi_Hz": m.lambda_eff / TWO_PI,
               "rabi_over_2pi_Hz": [m.rabi1 / TWO_PI, m.rabi2 / TWO_PI], "model": sc.model}
    flags = _flags()

    if sc.model in ("nine", "four"):
        if sc.model == "nine":
            h, ops, labels = h_nine_level(m), nine_level_observables(), INITIAL_STATES
        else:
            h = h_subspace4(m)
            ops = {f"P[{lab}]": np.diag(basis(4, i)) for i, lab in enumerate(NINE_LEVEL_LABELS[:4])}
            labels = ("0,1", "1,0")
        dim = h.shape[0]
        for lab in labels:
            psi0 = basis(dim, idx[lab])
            tr = evolve_closed(h, psi0, times, ops)
            trajs[lab] = tr
            tables[f"swap_from_{lab.replace(',', '')}"] = trajectory_table(tr)
        p10 = trajs["0,1"].expect["P[1,0]"]
        summary["transfer_probability"] = float(p10[-1])
        k = int(np.argmax(p10))
        summary["peak_transfer_probability"] = float(p10[k])
        summary["peak_transfer_time_s"] = float(times[k])
        if sc.model == "nine":
            summary["state_11_max_deviation"] = float(np.max(np.abs(trajs["1,1"].expect["P[1,1]"] - 1)))
            summary["state_00_return_probability"] = float(trajs["0,0"].expect["P[0,0]"][-1])
        decay = _swap_decay(cfg)
        t2 = cfg.device.t2_s
        if math.isfinite(decay):
            summary["fidelity_budget"] = budget_breakdown(m.lambda_eff, decay, t2)
        if sc.dissipation:
            if sc.model != "nine":
                raise ConfigError("swap: dissipation requires model 'nine'")
            me = swap_master_equation(m, decay, t2)
            rho0 = np.outer(basis(9, idx["0,1"]), basis(9, idx["0,1"]))
            tr = evolve_master(me, rho0, times, ops)
            trajs["0,1_dissipative"] = tr
            tables["swap_from_01_dissipative"] = trajectory_table(tr)
            summary["simulated_transfer_probability"] = float(tr.expect["P[1,0]"][-1])
    elif sc.model == "full":
        summary.update(_swap_full(cfg, m, tables, trajs))
        flags = _flags(dispersive=summary.pop("dispersive"),
                       truncation_ok=summary.pop("truncation_ok"))
    else:
        raise ConfigError(f"scenario.swap.model: unknown value {sc.model!r}")
    report = RunReport("swap", flags=flags, summary=summary)
    return RunResult(report, tables, trajs)


def _swap_full(cfg, m, tables, trajs):
    """Phonon-inclusive check: undriven exchange |B,D,0> -> |D,B,0> through the mode."""
    sc = cfg.scenario.swap
    mode = cfg.mode()
    w = mode.omega
    if sc.coupling_over_2pi_Hz is None or sc.splitting_over_2pi_Hz is None:
        raise ConfigError("swap model 'full' needs coupling_over_2pi_Hz and splitting_over_2pi_Hz")
    g = TWO_PI * sc.coupling_over_2pi_Hz
    lam_split = TWO_PI * sc.splitting_over_2pi_Hz
    lam = g**2 / abs(lam_split - w)
    n_max = sc.n_max
    h = h_two_qubit_full(lam_split, lam_split, g, g, w, n_max)
    nf = n_max + 1
    b, d = basis(2, 0), basis(2, 1)
    vac = basis(nf, 0)
    psi0 = kron(b, d, vac)
    t_ex = math.pi / (2 * lam)
    times = np.linspace(0.0, t_ex, cfg.simulation.samples)
    ops = {"P[B,D]": kron(np.diag(b * b), np.diag(d * d), np.eye(nf)),
           "P[D,B]": kron(np.diag(d * d), np.diag(b * b), np.eye(nf)),
           "n_phonon": kron(np.eye(4), np.diag(np.arange(nf)))}
    tr = evolve_closed(h, psi0, times, ops, fock_dim=nf)
    trajs["B,D_full"] = tr
    tables["exchange_full"] = trajectory_table(tr)
    return {"exchange_time_s": t_ex,
            "exchange_probability": float(tr.expect["P[D,B]"][-1]),
            "lambda_eff_from_full_over_2pi_Hz": lam / TWO_PI,
            "dispersive": abs(lam_split - w) >= coupling.VALIDITY_RATIO * g,
            "truncation_ok": tr.flags["truncation_ok"]}


# -- sweep ---------------------------------------------------------------------

SWEEP_COLUMNS = ("g_over_2pi_Hz", "n_th", "gamma_m_over_2pi_Hz", "Lambda_over_2pi_Hz",
                 "lambda_eff_over_2pi_Hz", "Gamma_over_2pi_Hz", "t_sw_s")


def _sweep_point(args):
    cfg, axis, value, mode = args
    c = cfg.with_device(**{axis: value})
    if mode == "rates":
        _, rates = _device_rates(c)
        rep = rates_report(rates)
        row = [rep[k] for k in SWEEP_COLUMNS]
        row.append(rates.fidelity)
        row += [rates.flags["dispersive"], rates.flags["long_wire"]]
        return row
    res = run_swap(c)
    s = res.report.summary
    budget = s.get("fidelity_budget", {})
    return [s["transfer_probability"], s["peak_transfer_probability"], budget.get("F", math.nan)]


def sweep_values(sc) -> np.ndarray:
    if not 1 <= sc.points <= MAX_SWEEP_POINTS:
        raise ConfigError(f"sweep.points must be in [1, {MAX_SWEEP_POINTS}]")
    if sc.points == 1:
        return np.array([sc.start])
    if sc.spacing == "linear":
        return np.linspace(sc.start, sc.stop, sc.points)
    if sc.spacing == "log":
        return np.geomspace(sc.start, sc.stop, sc.points)
    raise ConfigError(f"sweep.spacing: unknown value {sc.spacing!r}")


@_timed
def run_sweep(cfg: Config, workers: int = 1) -> RunResult:
    """Evaluate rates (``mode: rates``) or SWAP summaries (``mode: swap``) along one device axis.

    Output rows follow the axis order regardless of ``workers``.
    """
    sc = cfg.scenario.sweep
    numeric = {f.name for f in fields(DeviceBlock)}
    if sc.axis not in numeric:
        raise ConfigError(f"sweep.axis: unknown device field {sc.axis!r}; allowed: {sorted(numeric)}")
    if sc.mode == "rates":
        names = list(SWEEP_COLUMNS) + ["fidelity_budget", "dispersive", "long_wire"]
    elif sc.mode == "swap":
        names = ["transfer_probability", "peak_transfer_probability", "fidelity_budget"]
    else:
        raise ConfigError(f"sweep.mode: unknown value {sc.mode!r}")
    values = sweep_values(sc)
    cfg.with_device(**{sc.axis: float(values[0])}).device_params()
    jobs = [(cfg, sc.axis, float(v), sc.mode) for v in values]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_sweep_point(j) for j in jobs]
    cols = {sc.axis: values}
    for i, name in enumerate(names):
        cols[name] = [r[i] for r in rows]
    report = RunReport("sweep", flags=_flags(),
                       summary={"axis": sc.axis, "points": len(values), "mode": sc.mode})
    return RunResult(report, {"sweep": Table(cols)})


SCENARIOS = {"modes": run_modes, "coupling": run_coupling, "rabi": run_rabi,
             "swap": run_swap, "sweep": run_sweep}
