"""Run configuration: an INI file mapped onto frozen, validated dataclasses.

Every section of the file corresponds to one ``*Settings`` class; each field
declares its own parser in the dataclass metadata so reading, validating and
re-rendering stay in one place::

    [gas]
    temperature = 273.0
    pressure = auto
    isotope_mode = 202-only
"""
from __future__ import annotations

import configparser
import math
import re
from collections.abc import Callable
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError
from .physics.atomic_data import ISOTOPE_MODES
from .physics.sde import SCHEMES

SCAN_KINDS = ("phase", "detuning", "pressure")
OUTPUT_FORMATS = ("csv", "svg")
FULL_SCALE_TRAJECTORIES = 12000
MIN_BATCH_COUNT = 10
_AUTO = ("auto", "none", "soliton")


def _float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _opt_float(text: str) -> float | None:
    return None if text.strip().lower() in _AUTO else _float(text)


def _int(text: str) -> int:
    return int(text)


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("true", "yes", "on", "1"):
        return True
    if value in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _str(text: str) -> str:
    return text.strip()


def _opt_str(text: str) -> str | None:
    return None if text.strip().lower() in ("auto", "none", "") else text.strip()


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(_float(t) for t in text.split(",") if t.strip())


def _opt_float_list(text: str) -> tuple[float, ...] | None:
    return None if text.strip().lower() in _AUTO else _float_list(text)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _meta(parse: Callable[[str], Any]) -> dict:
    return {"parse": parse}


def _render(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _require(ok: bool, key: str, message: str) -> None:
    if not ok:
        raise ConfigError(message, key=key)


@dataclass(frozen=True)
class GasSettings:
    temperature: float = field(default=273.0, metadata=_meta(_float))
    pressure: float | None = field(default=None, metadata=_meta(_opt_float))
    atom_number_total: float | None = field(default=None, metadata=_meta(_opt_float))
    isotope_mode: str = field(default="202-only", metadata=_meta(_str))
    lines: str = field(default="all", metadata=_meta(_str))
    data_file: str | None = field(default=None, metadata=_meta(_opt_str))

    def __post_init__(self) -> None:
        _require(self.temperature > 0, "temperature", "temperature must be positive")
        _require(self.pressure is None or self.pressure >= 0, "pressure",
                 "pressure must be non-negative")
        _require(self.atom_number_total is None or self.atom_number_total > 0,
                 "atom_number_total", "atom_number_total must be positive")
        _require(self.isotope_mode in ISOTOPE_MODES, "isotope_mode",
                 f"isotope_mode must be one of {list(ISOTOPE_MODES)}")
        _require(self.lines in ("all", "main"), "lines", "lines must be 'all' or 'main'")


@dataclass(frozen=True)
class AtomSettings:
    gamma_p_factor: float = field(default=3.0, metadata=_meta(_float))
    damping: bool = field(default=True, metadata=_meta(_bool))
    initial_inversion: float = field(default=-0.5, metadata=_meta(_float))
    atom_bath_temperature: float | None = field(default=None, metadata=_meta(_opt_float))
    field_bath_temperature: float | None = field(default=None, metadata=_meta(_opt_float))
    lorentz_coefficient: float = field(default=0.5, metadata=_meta(_float))
    absorption_per_m: float | None = field(default=None, metadata=_meta(_opt_float))
    min_atoms_per_bin: float = field(default=1.0, metadata=_meta(_float))

    def __post_init__(self) -> None:
        _require(self.gamma_p_factor >= 0, "gamma_p_factor", "gamma_p_factor must be >= 0")
        _require(-1.0 <= self.initial_inversion <= 1.0, "initial_inversion",
                 "initial_inversion must lie in [-1, 1]")
        for key in ("atom_bath_temperature", "field_bath_temperature"):
            value = getattr(self, key)
            _require(value is None or value >= 0, key, f"{key} must be non-negative")
        _require(0.0 <= self.lorentz_coefficient <= 1.0, "lorentz_coefficient",
                 "lorentz_coefficient must lie in [0, 1]")
        _require(self.absorption_per_m is None or self.absorption_per_m > 0,
                 "absorption_per_m", "absorption_per_m must be positive")
        _require(self.min_atoms_per_bin >= 0, "min_atoms_per_bin",
                 "min_atoms_per_bin must be non-negative")


@dataclass(frozen=True)
class PulseSettings:
    duration: float = field(default=4e-15, metadata=_meta(_float))
    # None means the canonical soliton amplitude A = 1/duration.
    amplitude: float | None = field(default=None, metadata=_meta(_opt_float))
    detuning: float = field(default=0.0, metadata=_meta(_float))
    phase: float = field(default=0.0, metadata=_meta(_float))
    center_fraction: float = field(default=0.5, metadata=_meta(_float))

    def __post_init__(self) -> None:
        _require(self.duration > 0, "duration", "pulse duration must be positive")
        _require(self.amplitude is None or self.amplitude > 0, "amplitude",
                 "pulse amplitude must be positive")
        _require(0.0 < self.center_fraction < 1.0, "center_fraction",
                 "center_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class FiberSettings:
    length: float = field(default=0.05, metadata=_meta(_float))
    core_diameter: float = field(default=10e-6, metadata=_meta(_float))
    kappa: float = field(default=0.0, metadata=_meta(_float))
    group_velocity: float | None = field(default=None, metadata=_meta(_opt_float))
    wavelength: float = field(default=365.5e-9, metadata=_meta(_float))

    def __post_init__(self) -> None:
        _require(self.length > 0, "length", "fiber length must be positive")
        _require(self.core_diameter > 0, "core_diameter", "core_diameter must be positive")
        _require(self.kappa >= 0, "kappa", "kappa must be non-negative")
        _require(self.group_velocity is None or self.group_velocity > 0, "group_velocity",
                 "group_velocity must be positive")
        _require(self.wavelength > 0, "wavelength", "wavelength must be positive")


@dataclass(frozen=True)
class GridSettings:
    n_z: int = field(default=500, metadata=_meta(_int))
    n_t: int = field(default=2048, metadata=_meta(_int))
    # None means 40 pulse durations.
    window: float | None = field(default=None, metadata=_meta(_opt_float))
    n_freq_bins: int = field(default=41, metadata=_meta(_int))
    span_fwhm: float = field(default=6.0, metadata=_meta(_float))
    n_records: int = field(default=50, metadata=_meta(_int))

    def __post_init__(self) -> None:
        _require(self.n_z >= 1, "n_z", "n_z must be at least 1")
        _require(self.n_t >= 2, "n_t", "n_t must be at least 2")
        _require(self.window is None or self.window > 0, "window", "window must be positive")
        _require(self.n_freq_bins >= 1 and self.n_freq_bins % 2 == 1, "n_freq_bins",
                 f"n_freq_bins must be a positive odd number, got {self.n_freq_bins}")
        _require(self.span_fwhm > 0, "span_fwhm", "span_fwhm must be positive")
        _require(self.n_records >= 1, "n_records", "n_records must be at least 1")


@dataclass(frozen=True)
class EnsembleSettings:
    n_traj: int = field(default=2000, metadata=_meta(_int))
    master_seed: int = field(default=20240601, metadata=_meta(_int))
    batch_count: int = field(default=10, metadata=_meta(_int))
    chunk_size: int = field(default=8, metadata=_meta(_int))
    noise: bool = field(default=True, metadata=_meta(_bool))
    scheme: str = field(default="midpoint", metadata=_meta(_str))

    def __post_init__(self) -> None:
        _require(self.n_traj >= 2, "n_traj", "n_traj must be at least 2")
        _require(0 <= self.master_seed < 2**64, "master_seed",
                 "master_seed must fit in 64 unsigned bits")
        _require(self.batch_count >= MIN_BATCH_COUNT, "batch_count",
                 f"batch_count must be at least {MIN_BATCH_COUNT} for batch-means errors")
        _require(self.batch_count <= self.n_traj, "batch_count",
                 "batch_count must not exceed n_traj")
        _require(self.chunk_size >= 1, "chunk_size", "chunk_size must be at least 1")
        _require(self.scheme in SCHEMES, "scheme", f"scheme must be one of {list(SCHEMES)}")


@dataclass(frozen=True)
class ScanSettings:
    kind: str = field(default="phase", metadata=_meta(_str))
    phase_min: float = field(default=-0.5 * math.pi, metadata=_meta(_float))
    phase_max: float = field(default=0.5 * math.pi, metadata=_meta(_float))
    n_phase: int = field(default=121, metadata=_meta(_int))
    # In units of 1/duration.
    detunings: tuple[float, ...] = field(default=(0.0,), metadata=_meta(_float_list))
    temperatures: tuple[float, ...] = field(default=(273.0,), metadata=_meta(_float_list))
    # None means the saturated vapor pressure at each temperature.
    pressures: tuple[float, ...] | None = field(default=None, metadata=_meta(_opt_float_list))
    isotope_modes: tuple[str, ...] = field(default=ISOTOPE_MODES, metadata=_meta(_str_list))

    def __post_init__(self) -> None:
        _require(self.kind in SCAN_KINDS, "kind", f"scan kind must be one of {list(SCAN_KINDS)}")
        _require(self.n_phase >= 1, "n_phase", "n_phase must be at least 1")
        _require(self.phase_min <= self.phase_max, "phase_min", "phase_min exceeds phase_max")
        _require(len(self.detunings) >= 1 and min(self.detunings) >= 0, "detunings",
                 "detunings needs at least one value, all non-negative")
        _require(len(self.temperatures) >= 1, "temperatures",
                 "temperatures needs at least one value")
        _require(self.pressures is None or len(self.pressures) == len(self.temperatures),
                 "pressures", "pressures must match temperatures one to one")
        _require(all(m in ISOTOPE_MODES for m in self.isotope_modes) and self.isotope_modes,
                 "isotope_modes", f"isotope_modes must be drawn from {list(ISOTOPE_MODES)}")


@dataclass(frozen=True)
class OutputSettings:
    directory: str = field(default="results", metadata=_meta(_str))
    formats: tuple[str, ...] = field(default=OUTPUT_FORMATS, metadata=_meta(_str_list))

    def __post_init__(self) -> None:
        _require(set(self.formats) <= set(OUTPUT_FORMATS) and "csv" in self.formats, "formats",
                 f"formats must include csv and be drawn from {list(OUTPUT_FORMATS)}")


SECTIONS: dict[str, type] = {
    "gas": GasSettings, "atoms": AtomSettings, "pulse": PulseSettings,
    "fiber": FiberSettings, "grid": GridSettings, "ensemble": EnsembleSettings,
    "scan": ScanSettings, "output": OutputSettings,
}


@dataclass(frozen=True)
class RunConfig:
    gas: GasSettings = field(default_factory=GasSettings)
    atoms: AtomSettings = field(default_factory=AtomSettings)
    pulse: PulseSettings = field(default_factory=PulseSettings)
    fiber: FiberSettings = field(default_factory=FiberSettings)
    grid: GridSettings = field(default_factory=GridSettings)
    ensemble: EnsembleSettings = field(default_factory=EnsembleSettings)
    scan: ScanSettings = field(default_factory=ScanSettings)
    output: OutputSettings = field(default_factory=OutputSettings)
    # (section, key) -> line of the source file; not part of equality.
    key_lines: dict[tuple[str, str], int] = field(default_factory=dict, compare=False,
                                                  repr=False)
    source: str | None = field(default=None, compare=False, repr=False)

    def to_ini(self) -> str:
        out: list[str] = []
        for name in SECTIONS:
            section = getattr(self, name)
            out.append(f"[{name}]")
            out.extend(f"{f.name} = {_render(getattr(section, f.name))}"
                       for f in fields(section))
            out.append("")
        return "\n".join(out)

    def to_dict(self) -> dict:
        return {name: asdict(getattr(self, name)) for name in SECTIONS}

    def with_section(self, name: str, **changes: Any) -> RunConfig:
        if name not in SECTIONS:
            raise ValueError(f"Unknown config section '{name}'")
        return replace(self, **{name: replace(getattr(self, name), **changes)})

    def full_scale(self) -> RunConfig:
        return self.with_section("ensemble", n_traj=FULL_SCALE_TRAJECTORIES)

    def line_of(self, key: str | None, section: str | None = None) -> int | None:
        if key is None:
            return None
        for (sec, k), line in self.key_lines.items():
            if k == key and (section is None or sec == section):
                return line
        return None

    def locate(self, exc: ConfigError) -> ConfigError:
        """Attach this file's path and the key's line to an error raised after parsing."""
        if exc.line is None:
            exc.line = self.line_of(exc.key)
        if exc.source is None:
            exc.source = self.source
        return exc


_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:\s#;\[][^=:]*?)\s*[=:]")


def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines: dict[tuple[str, str], int] = {}
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if m := _SECTION_RE.match(raw):
            section = m.group(1).strip()
            lines.setdefault((section, ""), lineno)
        elif (m := _KEY_RE.match(raw)) and not raw[:1].isspace():
            lines.setdefault((section, m.group(1).strip()), lineno)
    return lines


def parse_config_text(text: str, source: str | None = None) -> RunConfig:
    lines = _key_lines(text)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       empty_lines_in_values=False)
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        parser.read_string(text, source=source or "<config>")
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] if exc.errors else None
        raise ConfigError("syntax error", line=lineno, source=source) from exc
    except (configparser.MissingSectionHeaderError, configparser.DuplicateOptionError,
            configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.splitlines()[0], line=getattr(exc, "lineno", None),
                          source=source) from exc

    sections: dict[str, Any] = {}
    for name in parser.sections():
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]; known: {sorted(SECTIONS)}",
                              line=lines.get((name, "")), source=source)
        cls = SECTIONS[name]
        known = {f.name: f for f in fields(cls)}
        values: dict[str, Any] = {}
        for key, raw in parser.items(name, raw=True):
            line = lines.get((name, key))
            if key not in known:
                raise ConfigError(f"unknown key '{key}' in [{name}]; known: {sorted(known)}",
                                  key=key, line=line, source=source)
            try:
                values[key] = known[key].metadata["parse"](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {name}.{key}: {exc}", key=key, line=line,
                                  source=source) from None
        try:
            sections[name] = cls(**values)
        except ConfigError as exc:
            exc.line = lines.get((name, exc.key or ""))
            exc.source = source
            raise
    return RunConfig(**sections, key_lines=lines, source=source)


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a run configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror or exc}", source=str(path)) from exc
    return parse_config_text(text, source=str(path))
