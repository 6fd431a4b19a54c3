"""YAML run configuration.

Frequencies in the file are ordinary frequencies in Hz (keys ending in
``_over_2pi_Hz``); they are multiplied by 2 pi on load. Unknown keys are
rejected so unit typos surface immediately.
"""

from dataclasses import dataclass, field, fields, replace
import math
import typing

import yaml

from .beam import BeamGeometry, BoundaryCondition, beam_mode
from .coupling import DeviceParams

TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GeometryBlock:
    length_m: float = 2e-6
    radius_m: float = 1.5e-9
    wall_m: float = 0.335e-9
    density_kg_m3: float = 1350.0
    youngs_modulus_Pa: float = 1e12
    boundary: str = "doubly_clamped"
    mode_index: int = 0
    effective_mass_kg: float | None = 7e-21
    frequency_over_2pi_Hz: float | None = 2e6


@dataclass(frozen=True)
class DeviceBlock:
    current_A: float = 60e-6
    distance_m: float = 30e-9
    temperature_K: float = 0.01
    quality_factor: float = 1e5
    static_field_T: float = 0.0
    drive_field_T: float = 0.0
    drive_frequency_over_2pi_Hz: float = 2.87e9
    spin_dephasing_over_2pi_Hz: float = 1e3
    t2_s: float = 1e-3
    splitting_over_2pi_Hz: float | None = None


@dataclass(frozen=True)
class SimulationBlock:
    n_max: int = 30
    samples: int = 801
    t_end_s: float | None = None


@dataclass(frozen=True)
class CouplingScenario:
    d_min_m: float = 10e-9
    d_max_m: float = 60e-9
    d_points: int = 200
    L_min_m: float = 0.5e-6
    L_max_m: float = 5e-6
    L_points: int = 50


@dataclass(frozen=True)
class RabiScenario:
    coupling_over_2pi_Hz: float | None = None
    n_th: float = 100.0
    gamma_m_over_g: float = 1e-3
    gamma_s_over_g: float = 0.1
    initial_occupation: float = 0.2
    initial_phonon: str = "thermal"
    periods: float = 4.0
    frame: str = "rotating"


@dataclass(frozen=True)
class SwapScenario:
    lambda_eff_over_2pi_Hz: float | None = 10e3
    rabi_over_lambda: float = 2.0
    detuning_over_lambda: tuple = (0.0, 0.0)
    model: str = "nine"
    dissipation: bool = False
    decay_over_2pi_Hz: float | None = None
    coupling_over_2pi_Hz: float | None = None
    splitting_over_2pi_Hz: float | None = None
    n_max: int = 4


@dataclass(frozen=True)
class SweepScenario:
    axis: str = "distance_m"
    start: float = 10e-9
    stop: float = 60e-9
    points: int = 200
    spacing: str = "linear"
    mode: str = "rates"


@dataclass(frozen=True)
class ScenarioBlock:
    name: str = "coupling"
    coupling: CouplingScenario = field(default_factory=CouplingScenario)
    rabi: RabiScenario = field(default_factory=RabiScenario)
    swap: SwapScenario = field(default_factory=SwapScenario)
    sweep: SweepScenario = field(default_factory=SweepScenario)


@dataclass(frozen=True)
class Config:
    geometry: GeometryBlock = field(default_factory=GeometryBlock)
    device: DeviceBlock = field(default_factory=DeviceBlock)
    simulation: SimulationBlock = field(default_factory=SimulationBlock)
    scenario: ScenarioBlock = field(default_factory=ScenarioBlock)

    # -- conversions to domain objects --

    def beam_geometry(self) -> BeamGeometry:
        g = self.geometry
        try:
            return BeamGeometry(g.length_m, g.radius_m, g.wall_m, g.density_kg_m3,
                                g.youngs_modulus_Pa)
        except ValueError as exc:
            raise ConfigError(f"geometry: {exc}") from None

    def boundary(self) -> BoundaryCondition:
        try:
            return BoundaryCondition(self.geometry.boundary)
        except ValueError:
            raise ConfigError(f"geometry.boundary: unknown value {self.geometry.boundary!r}; "
                              "expected 'doubly_clamped' or 'cantilever'") from None

    def mode(self):
        g = self.geometry
        omega = None if g.frequency_over_2pi_Hz is None else TWO_PI * g.frequency_over_2pi_Hz
        try:
            return beam_mode(self.beam_geometry(), self.boundary(), g.mode_index,
                             mass=g.effective_mass_kg, omega=omega)
        except ValueError as exc:
            raise ConfigError(f"geometry: {exc}") from None

    def device_params(self) -> DeviceParams:
        d = self.device
        split = None if d.splitting_over_2pi_Hz is None else TWO_PI * d.splitting_over_2pi_Hz
        try:
            return DeviceParams(
                current=d.current_A, distance=d.distance_m, mode=self.mode(),
                length=self.geometry.length_m, temperature=d.temperature_K,
                quality_factor=d.quality_factor, static_field=d.static_field_T,
                drive_field=d.drive_field_T,
                drive_frequency=TWO_PI * d.drive_frequency_over_2pi_Hz,
                spin_dephasing=TWO_PI * d.spin_dephasing_over_2pi_Hz,
                t2=d.t2_s, splitting=split)
        except ValueError as exc:
            raise ConfigError(f"device: {exc}") from None

    def with_device(self, **changes) -> "Config":
        unknown = set(changes) - {f.name for f in fields(DeviceBlock)}
        if unknown:
            raise ConfigError(f"device: unknown field(s) {sorted(unknown)}")
        return replace(self, device=replace(self.device, **changes))


def _build(cls, data, where):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed: {sorted(known)}")
    kwargs = {}
    for name, value in data.items():
        f = known[name]
        sub = _NESTED.get((cls, name))
        if sub is not None:
            kwargs[name] = _build(sub, value, f"{where}.{name}")
        else:
            kwargs[name] = _coerce(value, f.type, f"{where}.{name}")
    return cls(**kwargs)


def _coerce(value, typ, where):
    args = typing.get_args(typ)
    optional = type(None) in args
    base = next((a for a in args if a is not type(None)), typ) if args else typ
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{where}: value required")
    try:
        if base is bool:
            if not isinstance(value, bool):
                raise ValueError("not a boolean")
            return value
        if base is int:
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError("not an integer")
            return int(value)
        if base is float:
            if isinstance(value, bool):
                raise ValueError("not a number")
            return float(value)
        if base is str:
            return str(value)
        if base is tuple:
            return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: cannot interpret {value!r} ({exc})") from None
    return value


_NESTED = {
    (Config, "geometry"): GeometryBlock,
    (Config, "device"): DeviceBlock,
    (Config, "simulation"): SimulationBlock,
    (Config, "scenario"): ScenarioBlock,
    (ScenarioBlock, "coupling"): CouplingScenario,
    (ScenarioBlock, "rabi"): RabiScenario,
    (ScenarioBlock, "swap"): SwapScenario,
    (ScenarioBlock, "sweep"): SweepScenario,
}


def config_from_dict(data: dict | None) -> Config:
    return _build(Config, data or {}, "config")


def load_config(path) -> Config:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    return config_from_dict(data)

