"""Run configuration: a JSON document with unit-suffixed keys.

Sections are kept in the units they are written in (``length_mm``,
``t_high_ppm`` ...) so that ``parse_config(config.to_dict())`` reproduces the
configuration exactly; the ``build`` helpers convert to SI domain objects.
Every nested domain invariant is checked at load time and reported with the
dotted key path of the section that broke it.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, TypeVar

from .core.constants import MHZ, MM, MS, NM, NS, PPM, US, angular
from .core.errors import ConfigError, ParameterError
from .domains.cavity import AtomLine
from .domains.entangle import (
    CavityDesign,
    DetectionChain,
    LensDesign,
    ProtocolTimings,
    RateConvention,
)
from .domains.fidelity import BudgetEntry, default_budget_entries

T = TypeVar("T")

_MISSING: Any = object()


class _Section:
    """Typed reader over one JSON object that remembers which keys it used."""

    def __init__(self, data: object, path: str) -> None:
        if not isinstance(data, Mapping):
            raise ConfigError(path, "expected an object")
        self._data = data
        self._path = path
        self._seen: set[str] = set()

    @property
    def path(self) -> str:
        return self._path

    def __contains__(self, key: object) -> bool:
        return key in self._data

    def _key(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def _get(self, key: str, default: Any) -> Any:
        self._seen.add(key)
        if key in self._data:
            return self._data[key]
        if default is _MISSING:
            raise ConfigError(self._key(key), "missing required key")
        return default

    def number(self, key: str, default: Any = _MISSING) -> float:
        value = self._get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(self._key(key), "must be a number")
        return float(value)

    def optional_number(self, key: str, default: Optional[float] = None) -> Optional[float]:
        if self._data.get(key, default) is None:
            self._seen.add(key)
            return None
        return self.number(key, default)

    def integer(self, key: str, default: Any = _MISSING) -> int:
        value = self._get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(self._key(key), "must be an integer")
        return value

    def optional_integer(self, key: str, default: Optional[int] = None) -> Optional[int]:
        if self._data.get(key, default) is None:
            self._seen.add(key)
            return None
        return self.integer(key, default)

    def boolean(self, key: str, default: Any = _MISSING) -> bool:
        value = self._get(key, default)
        if not isinstance(value, bool):
            raise ConfigError(self._key(key), "must be true or false")
        return value

    def string(self, key: str, default: Any = _MISSING) -> str:
        value = self._get(key, default)
        if not isinstance(value, str) or not value:
            raise ConfigError(self._key(key), "must be a non-empty string")
        return value

    def numbers(self, key: str, default: Any = _MISSING) -> tuple[float, ...]:
        value = self._get(key, default)
        if not isinstance(value, (list, tuple)):
            raise ConfigError(self._key(key), "must be a list of numbers")
        out = []
        for index, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{self._key(key)}[{index}]", "must be a number")
            out.append(float(item))
        return tuple(out)

    def section(self, key: str) -> _Section:
        return _Section(self._get(key, {}), self._key(key))

    def items(self, key: str, default: Any = _MISSING) -> list[_Section]:
        value = self._get(key, default)
        if not isinstance(value, list):
            raise ConfigError(self._key(key), "must be a list")
        return [_Section(item, f"{self._key(key)}[{index}]") for index, item in enumerate(value)]

    def finish(self) -> None:
        for key in self._data:
            if key not in self._seen:
                raise ConfigError(self._key(key), "unknown key")


def _checked(path: str, build: Callable[[], T]) -> T:
    try:
        return build()
    except ConfigError:
        raise
    except ParameterError as exc:
        raise ConfigError(path, str(exc)) from None


@dataclass(frozen=True)
class AtomConfig:
    wavelength_nm: float = 780.0
    gamma_fwhm_mhz: float = 6.07

    def build(self) -> AtomLine:
        return AtomLine(
            wavelength=self.wavelength_nm * NM,
            gamma_fwhm=angular(self.gamma_fwhm_mhz * MHZ),
        )


@dataclass(frozen=True)
class MirrorConfig:
    t_low_ppm: float = 10.0
    loss_rt_ppm: float = 40.0


@dataclass(frozen=True)
class DesignConfig:
    name: str
    length_mm: float
    mirror_roc_mm: float
    t_high_ppm: Optional[float] = None

    def build(self, mirrors: MirrorConfig) -> CavityDesign:
        design = CavityDesign(
            name=self.name,
            length=self.length_mm * MM,
            mirror_roc=self.mirror_roc_mm * MM,
            t_low=mirrors.t_low_ppm * PPM,
            loss_rt=mirrors.loss_rt_ppm * PPM,
            t_high=None if self.t_high_ppm is None else self.t_high_ppm * PPM,
        )
        design.geometry()
        return design


@dataclass(frozen=True)
class DetectionConfig:
    detector_qe: float = 0.7
    fiber_length_km: float = 0.01
    attenuation_length_km: float = 1.091

    def build(self) -> DetectionChain:
        return DetectionChain(self.detector_qe, self.fiber_length_km, self.attenuation_length_km)


@dataclass(frozen=True)
class TimingsConfig:
    t_load_ms: float = 100.0
    t_pump_us: float = 6.0
    t_pi_ns: float = 30.0
    t_det_us: float = 1.0
    t_cool_us: float = 100.0
    n1: int = 10
    p_loss_per_block: float = 3e-5
    background_lifetime_s: float = 10.0
    n_scatter: float = 5.0
    cool_after_success: bool = False
    t_microwave_us: float = 50.0
    t_rotation_us: float = 500.0
    t_measure_ms: float = 3.0
    t_verify_cool_us: float = 100.0
    step_success: tuple[float, ...] = (0.99, 0.98, 0.94, 0.99)

    def build(self) -> ProtocolTimings:
        return ProtocolTimings(
            t_load=self.t_load_ms * MS,
            t_pump=self.t_pump_us * US,
            t_pi=self.t_pi_ns * NS,
            t_det=self.t_det_us * US,
            t_cool=self.t_cool_us * US,
            n1=self.n1,
            p_loss_per_block=self.p_loss_per_block,
            background_lifetime=self.background_lifetime_s,
            n_scatter=self.n_scatter,
            cool_after_success=self.cool_after_success,
            t_microwave=self.t_microwave_us * US,
            t_rotation=self.t_rotation_us * US,
            t_measure=self.t_measure_ms * MS,
            t_verify_cool=self.t_verify_cool_us * US,
            step_success=self.step_success,
        )


@dataclass(frozen=True)
class BudgetEntryConfig:
    name: str
    infidelity_percent: float
    verification_only: bool = False

    def build(self) -> BudgetEntry:
        return BudgetEntry(self.name, self.infidelity_percent / 100.0, self.verification_only)

    @classmethod
    def from_entry(cls, entry: BudgetEntry) -> BudgetEntryConfig:
        return cls(entry.name, round(entry.infidelity * 100.0, 12), entry.verification_only)


_DEFAULT_BUDGET = tuple(BudgetEntryConfig.from_entry(e) for e in default_budget_entries())


@dataclass(frozen=True)
class FidelityConfig:
    entries: tuple[BudgetEntryConfig, ...] = _DEFAULT_BUDGET
    displacement_1_nm: float = 0.0
    displacement_2_nm: float = 100.0
    dephasing_delay_us: float = 60.0
    t2_star_ms: float = 3.0


@dataclass(frozen=True)
class THighSweepConfig:
    lo_ppm: float = 100.0
    hi_ppm: float = 100_000.0
    points: int = 60
    lengths_mm: tuple[float, ...] = (1.0, 4.0, 10.0, 20.0)
    d_crit_um: float = 10.0


@dataclass(frozen=True)
class DCritSweepConfig:
    lo_um: float = 1.0
    hi_um: float = 100.0
    points: int = 30
    log_spacing: bool = True
    mirror_rocs_mm: tuple[float, ...] = (2.0, 5.0)
    anchor_um: float = 10.0


@dataclass(frozen=True)
class NaSweepConfig:
    lo: float = 0.05
    hi: float = 1.0
    points: int = 20


@dataclass(frozen=True)
class SweepsConfig:
    t_high: THighSweepConfig = THighSweepConfig()
    d_crit: DCritSweepConfig = DCritSweepConfig()
    na: NaSweepConfig = NaSweepConfig()


@dataclass(frozen=True)
class SimulationConfig:
    seed: int = 42
    trials: int = 100_000
    workers: int = 1
    p_aa: Optional[float] = 0.056
    convention: str = RateConvention.EPOCH.value
    include_loss: bool = True


@dataclass(frozen=True)
class RunConfig:
    designs: tuple[DesignConfig, ...]
    atom: AtomConfig = AtomConfig()
    mirrors: MirrorConfig = MirrorConfig()
    lens_na: tuple[float, ...] = (0.3, 0.5, 0.7, 0.9)
    detection: DetectionConfig = DetectionConfig()
    timings: TimingsConfig = TimingsConfig()
    fidelity: FidelityConfig = FidelityConfig()
    sweeps: SweepsConfig = SweepsConfig()
    simulation: SimulationConfig = SimulationConfig()
    output_dir: str = "results"

    def line(self) -> AtomLine:
        return self.atom.build()

    def cavity_designs(self) -> list[CavityDesign]:
        return [design.build(self.mirrors) for design in self.designs]

    def lens_designs(self) -> list[LensDesign]:
        return [LensDesign(f"NA {na:g}", na) for na in self.lens_na]

    def to_dict(self) -> dict[str, Any]:
        def convert(value: Any) -> Any:
            if dataclasses.is_dataclass(value):
                return {f.name: convert(getattr(value, f.name)) for f in dataclasses.fields(value)}
            if isinstance(value, tuple):
                return [convert(item) for item in value]
            return value

        return convert(self)

    def with_overrides(
        self,
        *,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
        workers: Optional[int] = None,
        p_aa: Optional[float] = None,
        output_dir: Optional[str] = None,
    ) -> RunConfig:
        simulation = self.simulation
        changes: dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if trials is not None:
            changes["trials"] = trials
        if workers is not None:
            changes["workers"] = workers
        if p_aa is not None:
            changes["p_aa"] = p_aa
        if changes:
            simulation = dataclasses.replace(simulation, **changes)
            _validate_simulation(simulation, "simulation")
        return dataclasses.replace(
            self,
            simulation=simulation,
            output_dir=self.output_dir if output_dir is None else output_dir,
        )


def _parse_atom(section: _Section) -> AtomConfig:
    atom = AtomConfig(
        wavelength_nm=section.number("wavelength_nm", AtomConfig.wavelength_nm),
        gamma_fwhm_mhz=section.number("gamma_fwhm_mhz", AtomConfig.gamma_fwhm_mhz),
    )
    section.finish()
    _checked("atom", atom.build)
    return atom


def _parse_mirrors(section: _Section) -> MirrorConfig:
    mirrors = MirrorConfig(
        t_low_ppm=section.number("t_low_ppm", MirrorConfig.t_low_ppm),
        loss_rt_ppm=section.number("loss_rt_ppm", MirrorConfig.loss_rt_ppm),
    )
    section.finish()
    for key in ("t_low_ppm", "loss_rt_ppm"):
        if not 0.0 <= getattr(mirrors, key) < 1e6:
            raise ConfigError(f"mirrors.{key}", "must lie in [0, 1e6) ppm")
    return mirrors


def _parse_design(section: _Section, mirrors: MirrorConfig, path: str) -> DesignConfig:
    design = DesignConfig(
        name=section.string("name"),
        length_mm=section.number("length_mm"),
        mirror_roc_mm=section.number("mirror_roc_mm"),
        t_high_ppm=section.optional_number("t_high_ppm"),
    )
    section.finish()
    if design.t_high_ppm is not None and not 0.0 <= design.t_high_ppm < 1e6:
        raise ConfigError(f"{path}.t_high_ppm", "must lie in [0, 1e6) ppm")
    _checked(path, lambda: design.build(mirrors))
    return design


def _parse_detection(section: _Section) -> DetectionConfig:
    defaults = DetectionConfig()
    detection = DetectionConfig(
        detector_qe=section.number("detector_qe", defaults.detector_qe),
        fiber_length_km=section.number("fiber_length_km", defaults.fiber_length_km),
        attenuation_length_km=section.number(
            "attenuation_length_km", defaults.attenuation_length_km
        ),
    )
    section.finish()
    _checked("detection", detection.build)
    return detection


def _parse_timings(section: _Section) -> TimingsConfig:
    defaults = TimingsConfig()
    values: dict[str, Any] = {}
    for f in dataclasses.fields(TimingsConfig):
        default = getattr(defaults, f.name)
        if f.name == "n1":
            values[f.name] = section.integer(f.name, default)
        elif f.name == "cool_after_success":
            values[f.name] = section.boolean(f.name, default)
        elif f.name == "step_success":
            values[f.name] = section.numbers(f.name, default)
        else:
            values[f.name] = section.number(f.name, default)
    section.finish()
    timings = TimingsConfig(**values)
    _checked("timings", timings.build)
    return timings


def _parse_fidelity(section: _Section) -> FidelityConfig:
    defaults = FidelityConfig()
    entries = defaults.entries
    if "entries" in section:
        parsed = []
        for item in section.items("entries"):
            entry = BudgetEntryConfig(
                name=item.string("name"),
                infidelity_percent=item.number("infidelity_percent"),
                verification_only=item.boolean("verification_only", False),
            )
            item.finish()
            _checked(item.path, entry.build)
            parsed.append(entry)
        entries = tuple(parsed)
    fidelity = FidelityConfig(
        entries=entries,
        displacement_1_nm=section.number("displacement_1_nm", defaults.displacement_1_nm),
        displacement_2_nm=section.number("displacement_2_nm", defaults.displacement_2_nm),
        dephasing_delay_us=section.number("dephasing_delay_us", defaults.dephasing_delay_us),
        t2_star_ms=section.number("t2_star_ms", defaults.t2_star_ms),
    )
    section.finish()
    if fidelity.displacement_1_nm < 0.0 or fidelity.displacement_2_nm < 0.0:
        raise ConfigError("fidelity", "displacements must be non-negative")
    if not fidelity.t2_star_ms > 0.0:
        raise ConfigError("fidelity.t2_star_ms", "must be positive")
    return fidelity


def _check_range(path: str, lo: float, hi: float, points: int) -> None:
    if not lo < hi:
        raise ConfigError(path, "lower bound must be below upper bound")
    if points < 2:
        raise ConfigError(f"{path}.points", "must be at least 2")


def _parse_sweeps(section: _Section) -> SweepsConfig:
    t_sec = section.section("t_high")
    t_default = THighSweepConfig()
    t_high = THighSweepConfig(
        lo_ppm=t_sec.number("lo_ppm", t_default.lo_ppm),
        hi_ppm=t_sec.number("hi_ppm", t_default.hi_ppm),
        points=t_sec.integer("points", t_default.points),
        lengths_mm=t_sec.numbers("lengths_mm", t_default.lengths_mm),
        d_crit_um=t_sec.number("d_crit_um", t_default.d_crit_um),
    )
    t_sec.finish()
    _check_range("sweeps.t_high", t_high.lo_ppm, t_high.hi_ppm, t_high.points)
    if t_high.lo_ppm <= 0.0:
        raise ConfigError("sweeps.t_high.lo_ppm", "must be positive")

    d_sec = section.section("d_crit")
    d_default = DCritSweepConfig()
    d_crit = DCritSweepConfig(
        lo_um=d_sec.number("lo_um", d_default.lo_um),
        hi_um=d_sec.number("hi_um", d_default.hi_um),
        points=d_sec.integer("points", d_default.points),
        log_spacing=d_sec.boolean("log_spacing", d_default.log_spacing),
        mirror_rocs_mm=d_sec.numbers("mirror_rocs_mm", d_default.mirror_rocs_mm),
        anchor_um=d_sec.number("anchor_um", d_default.anchor_um),
    )
    d_sec.finish()
    _check_range("sweeps.d_crit", d_crit.lo_um, d_crit.hi_um, d_crit.points)
    if d_crit.log_spacing and d_crit.lo_um <= 0.0:
        raise ConfigError("sweeps.d_crit.lo_um", "must be positive for log spacing")

    n_sec = section.section("na")
    n_default = NaSweepConfig()
    na = NaSweepConfig(
        lo=n_sec.number("lo", n_default.lo),
        hi=n_sec.number("hi", n_default.hi),
        points=n_sec.integer("points", n_default.points),
    )
    n_sec.finish()
    _check_range("sweeps.na", na.lo, na.hi, na.points)
    if not (0.0 < na.lo and na.hi <= 1.0):
        raise ConfigError("sweeps.na", "NA range must lie in (0, 1]")
    section.finish()
    return SweepsConfig(t_high=t_high, d_crit=d_crit, na=na)


def _validate_simulation(simulation: SimulationConfig, path: str) -> None:
    if simulation.seed < 0:
        raise ConfigError(f"{path}.seed", "must be non-negative")
    if simulation.trials < 1:
        raise ConfigError(f"{path}.trials", "must be at least 1")
    if simulation.workers < 1:
        raise ConfigError(f"{path}.workers", "must be at least 1")
    if simulation.p_aa is not None and not 0.0 < simulation.p_aa <= 1.0:
        raise ConfigError(f"{path}.p_aa", "must lie in (0, 1]")
    try:
        RateConvention(simulation.convention)
    except ValueError:
        choices = ", ".join(c.value for c in RateConvention)
        raise ConfigError(f"{path}.convention", f"must be one of: {choices}") from None


def _parse_simulation(section: _Section) -> SimulationConfig:
    defaults = SimulationConfig()
    simulation = SimulationConfig(
        seed=section.integer("seed", defaults.seed),
        trials=section.integer("trials", defaults.trials),
        workers=section.integer("workers", defaults.workers),
        p_aa=section.optional_number("p_aa", defaults.p_aa),
        convention=section.string("convention", defaults.convention),
        include_loss=section.boolean("include_loss", defaults.include_loss),
    )
    section.finish()
    _validate_simulation(simulation, "simulation")
    return simulation


def parse_config(payload: object) -> RunConfig:
    """Validate a decoded JSON document and return the :class:`RunConfig`."""

    root = _Section(payload, "")
    if not isinstance(payload, Mapping) or "designs" not in payload:
        raise ConfigError("designs", "missing required section")

    atom = _parse_atom(root.section("atom"))
    mirrors = _parse_mirrors(root.section("mirrors"))
    designs = tuple(
        _parse_design(item, mirrors, item.path) for item in root.items("designs")
    )
    if not designs:
        raise ConfigError("designs", "at least one cavity design is required")
    names = [d.name for d in designs]
    if len(set(names)) != len(names):
        raise ConfigError("designs", "design names must be unique")
    lens_na = root.numbers("lens_na", RunConfig.lens_na)
    for index, na in enumerate(lens_na):
        if not 0.0 < na <= 1.0:
            raise ConfigError(f"lens_na[{index}]", "must lie in (0, 1]")

    config = RunConfig(
        designs=designs,
        atom=atom,
        mirrors=mirrors,
        lens_na=lens_na,
        detection=_parse_detection(root.section("detection")),
        timings=_parse_timings(root.section("timings")),
        fidelity=_parse_fidelity(root.section("fidelity")),
        sweeps=_parse_sweeps(root.section("sweeps")),
        simulation=_parse_simulation(root.section("simulation")),
        output_dir=root.string("output_dir", RunConfig.output_dir),
    )
    root.finish()
    return config


def load_config(path: Path) -> RunConfig:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(str(path), "configuration file not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"failed to decode JSON: {exc}") from None
    return parse_config(payload)


def default_config_text() -> str:
    document = resources.files("atomlink").joinpath("data/default_config.json")
    return document.read_text(encoding="utf-8")


def load_default_config() -> RunConfig:
    """The shipped configuration with the three reference cavity designs."""

    return parse_config(json.loads(default_config_text()))


__all__ = [
    "AtomConfig",
    "BudgetEntryConfig",
    "DCritSweepConfig",
    "DesignConfig",
    "DetectionConfig",
    "FidelityConfig",
    "MirrorConfig",
    "NaSweepConfig",
    "RunConfig",
    "SimulationConfig",
    "SweepsConfig",
    "THighSweepConfig",
    "TimingsConfig",
    "default_config_text",
    "load_config",
    "load_default_config",
    "parse_config",
]
