"""Mercury isotopes, transition tables and vapor thermodynamics.

The transition table is a plain text file (``data/mercury_lines.txt``) so the
hyperfine offsets and strengths can be replaced without touching code; the
natural abundances and nuclear spins live here.
"""
from __future__ import annotations

import csv
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, replace
from pathlib import Path

from ..core.constants import AMU, C, CARRIER_WAVELENGTH, K_B, VAPOR_PRESSURE_POINTS
from ..core.constants import VAPOR_PRESSURE_RANGE, carrier_frequency
from ..errors import DataFileError

log = logging.getLogger(__name__)

DATA_FILE = Path(__file__).parent / "data" / "mercury_lines.txt"

MAIN_MANIFOLD = "6_3D3-6_3P2"
SIDE_MANIFOLD = "7_3S1-6_3P2"
BOSON_LINES = frozenset({MAIN_MANIFOLD, SIDE_MANIFOLD})

# Natural abundances (IUPAC representative values); they sum to 1.0001 and are
# renormalized on load.
NATURAL_ABUNDANCE: dict[int, float] = {
    196: 0.0015, 198: 0.1002, 199: 0.1684, 200: 0.2313,
    201: 0.1322, 202: 0.2980, 204: 0.0685,
}
NUCLEAR_SPIN: dict[int, float] = {
    196: 0.0, 198: 0.0, 199: 0.5, 200: 0.0, 201: 1.5, 202: 0.0, 204: 0.0,
}
# Atomic masses in u.
ATOMIC_MASS_U: dict[int, float] = {
    196: 195.965833, 198: 197.966769, 199: 198.968281, 200: 199.968327,
    201: 200.970303, 202: 201.970643, 204: 203.973494,
}

ISOTOPE_MODES = ("202-only", "all")
_STRENGTH_TOLERANCE = 1e-3


@dataclass(frozen=True)
class TransitionSpec:
    label: str
    center_frequency_offset: float  # rad/s relative to the carrier
    gamma0: float                   # spontaneous decay rate, s^-1
    # Fraction of the isotope's atoms addressed by this line; sums to 1 per manifold.
    relative_strength: float
    # Source coefficient G (m^2/s); None means derive it from gamma0 and the wavelength.
    coupling: float | None = None

    @property
    def manifold(self) -> str:
        return self.label.split(" F=")[0]

    def wavelength(self, carrier: float = CARRIER_WAVELENGTH) -> float:
        return 2.0 * math.pi * C / (carrier_frequency(carrier) + self.center_frequency_offset)

    def source_coupling(self, carrier: float = CARRIER_WAVELENGTH) -> float:
        """Source-term coefficient G = 3 lambda^2 gamma0 / (4 pi), in m^2/s.

        With this normalization the resonant small-signal intensity absorption of
        a sharp line is rho * sigma0 * gamma0 / (2 gamma_perp), sigma0 = 3 lambda^2 / 2 pi.
        """
        if self.coupling is not None:
            return self.coupling
        lam = self.wavelength(carrier)
        return 3.0 * lam**2 * self.gamma0 / (4.0 * math.pi)


@dataclass(frozen=True)
class IsotopeSpec:
    mass_number: int
    abundance: float
    nuclear_spin: float
    atomic_mass: float  # kg
    transitions: tuple[TransitionSpec, ...]

    @property
    def is_boson(self) -> bool:
        return self.nuclear_spin == 0.0


@dataclass(frozen=True)
class GasSample:
    temperature: float
    pressure: float
    total_density: float
    isotopes: tuple[IsotopeSpec, ...]
    # Ideal-gas density before any atom-number override.
    ideal_gas_density: float | None = None

    @classmethod
    def from_conditions(cls, temperature: float, isotopes: tuple[IsotopeSpec, ...], *,
                        pressure: float | None = None, atom_number_total: float | None = None,
                        volume: float | None = None) -> GasSample:
        if pressure is None:
            pressure = vapor_pressure_hg(temperature)
        ideal = number_density(pressure, temperature)
        density = ideal
        if atom_number_total is not None:
            if volume is None or volume <= 0:
                raise ValueError("atom_number_total needs a positive fiber volume")
            if atom_number_total <= 0:
                raise ValueError(f"atom_number_total must be positive, got {atom_number_total}")
            density = atom_number_total / volume
        return cls(temperature=temperature, pressure=pressure, total_density=density,
                   isotopes=tuple(isotopes), ideal_gas_density=ideal)

    def atom_number(self, volume: float) -> float:
        return self.total_density * volume


def vapor_pressure_hg(temperature: float) -> float:
    """Saturated mercury vapor pressure (Pa), P = exp(a - b/T), valid 250-320 K."""
    lo, hi = VAPOR_PRESSURE_RANGE
    if not lo <= temperature <= hi:
        raise ValueError(f"vapor_pressure_hg is fitted for {lo:g}-{hi:g} K, got {temperature} K")
    (t1, p1), (t2, p2) = VAPOR_PRESSURE_POINTS
    b = math.log(p2 / p1) / (1.0 / t1 - 1.0 / t2)
    a = math.log(p1) + b / t1
    return math.exp(a - b / temperature)


def number_density(pressure: float, temperature: float) -> float:
    """Ideal-gas number density rho = P / (k_B T), in m^-3."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    if pressure < 0:
        raise ValueError(f"pressure must be non-negative, got {pressure}")
    return pressure / (K_B * temperature)


def isotope_densities(sample: GasSample) -> list[float]:
    return [iso.abundance * sample.total_density for iso in sample.isotopes]


def _parse_float(text: str, field: str, lineno: int, raw: str, source: Path) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataFileError(f"bad {field} {text!r} in record {raw!r}", line=lineno,
                            source=str(source)) from None
    if not math.isfinite(value):
        raise DataFileError(f"non-finite {field} in record {raw!r}", line=lineno,
                            source=str(source))
    return value


def load_transition_table(path: str | Path | None = None) -> dict[int, list[TransitionSpec]]:
    """Read the transition table, keyed by mass number, validating every record."""
    source = Path(path) if path is not None else DATA_FILE
    try:
        text = source.read_text()
    except OSError as exc:
        raise DataFileError(f"cannot read isotope data: {exc}", source=str(source)) from exc

    table: dict[int, list[TransitionSpec]] = defaultdict(list)
    first_line: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = [f.strip() for f in next(csv.reader([stripped]))]
        if len(fields) != 5:
            raise DataFileError(f"expected 5 columns, got {len(fields)} in record {raw!r}",
                                line=lineno, source=str(source))
        iso_text, label, offset, gamma, strength = fields
        try:
            mass_number = int(iso_text)
        except ValueError:
            raise DataFileError(f"bad isotope {iso_text!r} in record {raw!r}", line=lineno,
                                source=str(source)) from None
        if mass_number not in NATURAL_ABUNDANCE:
            raise DataFileError(f"unknown mercury isotope {mass_number} in record {raw!r}",
                                line=lineno, source=str(source))
        gamma0 = _parse_float(gamma, "gamma0_MHz", lineno, raw, source)
        rel = _parse_float(strength, "rel_strength", lineno, raw, source)
        if gamma0 <= 0:
            raise DataFileError(f"gamma0 must be positive in record {raw!r}", line=lineno,
                                source=str(source))
        if rel < 0:
            raise DataFileError(f"rel_strength must be >= 0 in record {raw!r}", line=lineno,
                                source=str(source))
        table[mass_number].append(TransitionSpec(
            label=label,
            center_frequency_offset=2.0 * math.pi * 1e9
            * _parse_float(offset, "offset_GHz", lineno, raw, source),
            gamma0=2.0 * math.pi * 1e6 * gamma0,
            relative_strength=rel,
        ))
        first_line.setdefault(mass_number, lineno)

    missing = sorted(set(NATURAL_ABUNDANCE) - set(table))
    if missing:
        raise DataFileError(f"no transitions listed for isotopes {missing}", source=str(source))
    for mass_number, lines in table.items():
        _check_isotope_lines(mass_number, lines, first_line[mass_number], source)
    log.debug("loaded %d isotopes from %s", len(table), source)
    return dict(table)


def _check_isotope_lines(mass_number: int, lines: list[TransitionSpec], lineno: int,
                         source: Path) -> None:
    labels = {t.label for t in lines}
    if NUCLEAR_SPIN[mass_number] == 0.0 and labels != BOSON_LINES:
        raise DataFileError(
            f"bosonic isotope {mass_number} must list exactly {sorted(BOSON_LINES)}, "
            f"got {sorted(labels)}", line=lineno, source=str(source))
    sums: dict[str, float] = defaultdict(float)
    for t in lines:
        sums[t.manifold] += t.relative_strength
    for manifold, total in sums.items():
        if abs(total - 1.0) > _STRENGTH_TOLERANCE:
            raise DataFileError(
                f"strengths of {mass_number} {manifold} sum to {total:.4f}, expected 1",
                line=lineno, source=str(source))


def mercury_isotope_table(path: str | Path | None = None) -> list[IsotopeSpec]:
    """All seven stable isotopes with abundances renormalized to sum to 1."""
    table = load_transition_table(path)
    total = math.fsum(NATURAL_ABUNDANCE.values())
    return [
        IsotopeSpec(
            mass_number=a,
            abundance=NATURAL_ABUNDANCE[a] / total,
            nuclear_spin=NUCLEAR_SPIN[a],
            atomic_mass=ATOMIC_MASS_U[a] * AMU,
            transitions=tuple(table[a]),
        )
        for a in sorted(NATURAL_ABUNDANCE)
    ]


def select_isotopes(table: list[IsotopeSpec], mode: str, *,
                    lines: str = "all") -> tuple[IsotopeSpec, ...]:
    """Pick the isotope mix for a run.

    ``202-only`` keeps the most abundant boson at abundance 1; ``all`` keeps the
    natural mix. ``lines='main'`` drops everything outside the carrier manifold.
    """
    if mode not in ISOTOPE_MODES:
        raise ValueError(f"Unknown isotope mode '{mode}'. Known: {list(ISOTOPE_MODES)}")
    if lines not in ("all", "main"):
        raise ValueError(f"lines must be 'all' or 'main', got '{lines}'")
    chosen = [iso for iso in table if mode == "all" or iso.mass_number == 202]
    if mode == "202-only":
        chosen = [replace(chosen[0], abundance=1.0)]
    if lines == "main":
        chosen = [replace(iso, transitions=tuple(t for t in iso.transitions
                                                 if t.manifold == MAIN_MANIFOLD))
                  for iso in chosen]
    return tuple(chosen)
