"""Simulation: ties the gas, fiber, pulse and grid together and sweeps trajectories in z.

Each z cell holds fresh ground-state atoms that are driven once over the whole
retarded-time window by the field arriving at that cell; their polarization
then advances the field to the next cell.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from .config import RunConfig
from .core.constants import C
from .core.rng import trajectory_stream
from .errors import ConfigError
from .measurement.homodyne import lo_overlaps, local_oscillator
from .physics import atomic_data
from .physics.atomic_data import MAIN_MANIFOLD, GasSample, IsotopeSpec
from .physics.field import FiberConfig, FieldSlice, Grid, PulseConfig, init_soliton
from .physics.lineshape import LineshapeParams, discretize_lineshape, doppler_fwhm
from .physics.rates import RateSet, ThermalConfig, cw_absorption, power_broadened_width
from .physics.sde import (
    NORMALS_PER_STEP,
    AtomicEnsembleState,
    CouplingSpec,
    NoiseDraw,
    draw_field_noise,
    field_noise_amplitude,
    polarization_source,
    step_atoms,
    step_field,
)

log = logging.getLogger(__name__)

# Noise is drawn per trajectory in blocks of this many time steps.
NOISE_CHUNK = 256
# A trajectory is diverged once |Omega| exceeds this multiple of the input peak.
FIELD_DIVERGENCE_FACTOR = 1e6
# Largest product of time step and rate accepted without complaint.
STABILITY_BOUND = 0.1
WINDOW_DURATIONS = 40.0


@dataclass(frozen=True)
class AtomicLayout:
    """Flattened line axis: one entry per (isotope, transition, frequency bin) kept."""

    lines: tuple[tuple[int, str], ...]
    line_index: np.ndarray
    detuning: np.ndarray        # omega_m - omega_0, rad/s
    weight: np.ndarray          # lineshape weight of the bin
    density: np.ndarray         # atoms of this line per m^3
    coupling: np.ndarray        # G, m^2/s
    rates: RateSet
    atoms_per_cell: np.ndarray
    pruned_fraction: float = 0.0

    @property
    def size(self) -> int:
        return int(self.detuning.size)

    def source(self, r: np.ndarray) -> np.ndarray:
        return polarization_source(r, self.weight, self.density, self.coupling)

    def with_couplings(self, couplings: CouplingSpec) -> AtomicLayout:
        return replace(self, coupling=np.asarray(couplings.source, dtype=float)[self.line_index])

    def with_density_scale(self, factor: float) -> AtomicLayout:
        return replace(self, density=self.density * factor,
                       atoms_per_cell=self.atoms_per_cell * factor)


def derive_couplings(isotopes: tuple[IsotopeSpec, ...], carrier: float,
                     core_area: float) -> CouplingSpec:
    """Couplings from decay rates and wavelengths.

    The field coupling is the abundance-weighted carrier-manifold G scaled to the
    uniform mode, G c / A_core.
    """
    lines, source = [], []
    field_g = 0.0
    for iso in isotopes:
        for t in iso.transitions:
            lines.append((iso.mass_number, t.label))
            g = t.source_coupling(carrier)
            source.append(g)
            if t.manifold == MAIN_MANIFOLD:
                field_g += iso.abundance * t.relative_strength * g
    return CouplingSpec(lines=tuple(lines), source=np.array(source),
                        field_coupling=field_g * C / core_area)


def build_layout(gas: GasSample, couplings: CouplingSpec, thermal: ThermalConfig,
                 cell_volume: float, *, n_bins: int, span_fwhm: float,
                 lorentz_coefficient: float = 0.5, gamma_p_factor: float = 3.0,
                 damping: bool = True, kappa: float = 0.0,
                 min_atoms_per_bin: float = 1.0) -> AtomicLayout:
    """Discretize every line of every isotope and drop bins with too few atoms per cell."""
    cols: dict[str, list] = {k: [] for k in (
        "line", "det", "w", "rho", "W12", "W21", "gpar", "gperp", "gp", "sss", "n")}
    total_weight = kept_weight = 0.0
    n_bar = n_bar_a = 0.0
    for iso, rho in zip(gas.isotopes, atomic_data.isotope_densities(gas)):
        for t in iso.transitions:
            lam = t.wavelength(thermal.carrier_wavelength)
            shape = LineshapeParams.from_widths(
                t.gamma0, doppler_fwhm(gas.temperature, iso.atomic_mass, lam),
                lorentz_coefficient=lorentz_coefficient)
            grid = discretize_lineshape(shape, n_bins, span_fwhm)
            rates = RateSet.for_line(t.gamma0, thermal, gamma_p=gamma_p_factor * t.gamma0,
                                     kappa=kappa, damping=damping)
            n_bar, n_bar_a = rates.n_bar, rates.n_bar_a
            line_rho = t.relative_strength * rho
            atoms = line_rho * grid.weights * cell_volume
            keep = atoms >= min_atoms_per_bin if min_atoms_per_bin > 0 else atoms > 0
            share = iso.abundance * t.relative_strength
            total_weight += share
            kept_weight += share * float(np.sum(grid.weights[keep]))
            k = int(np.count_nonzero(keep))
            cols["line"] += [couplings.lines.index((iso.mass_number, t.label))] * k
            cols["det"] += list(t.center_frequency_offset + grid.bin_centers[keep])
            cols["w"] += list(grid.weights[keep])
            cols["rho"] += [line_rho] * k
            cols["n"] += list(atoms[keep])
            for key, value in (("W12", rates.W12), ("W21", rates.W21), ("gpar", rates.gamma_par),
                               ("gperp", rates.gamma_perp), ("gp", rates.gamma_p),
                               ("sss", rates.sigma_ss)):
                cols[key] += [value] * k
    arr = {k: np.asarray(v, dtype=float) for k, v in cols.items() if k != "line"}
    line_index = np.asarray(cols["line"], dtype=int)
    rates = RateSet(W12=arr["W12"], W21=arr["W21"], gamma_par=arr["gpar"],
                    gamma_perp=arr["gperp"], gamma_p=arr["gp"], sigma_ss=arr["sss"],
                    n_bar=n_bar, n_bar_a=n_bar_a, kappa=kappa)
    pruned = 1.0 - kept_weight / total_weight if total_weight else 0.0
    return AtomicLayout(lines=couplings.lines, line_index=line_index, detuning=arr["det"],
                        weight=arr["w"], density=arr["rho"],
                        coupling=np.asarray(couplings.source, dtype=float)[line_index],
                        rates=rates, atoms_per_cell=arr["n"], pruned_fraction=pruned)


@dataclass(frozen=True)
class Simulation:
    grid: Grid
    pulse: PulseConfig
    fiber: FiberConfig
    gas: GasSample
    thermal: ThermalConfig
    couplings: CouplingSpec
    layout: AtomicLayout
    input_field: FieldSlice
    lo: np.ndarray
    noise: bool = True
    scheme: str = "midpoint"
    master_seed: int = 0
    initial_inversion: float = -0.5
    batch_count: int = 10
    chunk_size: int = 8

    @classmethod
    def from_config(cls, cfg: RunConfig, *, calibrate: bool = True) -> Simulation:
        """Assemble and validate the model; raises ConfigError before any compute."""
        try:
            return cls._from_config(cfg, calibrate)
        except ConfigError as exc:
            raise cfg.locate(exc) from None

    @classmethod
    def _from_config(cls, cfg: RunConfig, calibrate: bool) -> Simulation:
        fiber = FiberConfig(length=cfg.fiber.length, core_diameter=cfg.fiber.core_diameter,
                            kappa=cfg.fiber.kappa, group_velocity=cfg.fiber.group_velocity or C)
        duration = cfg.pulse.duration
        window = cfg.grid.window or WINDOW_DURATIONS * duration
        grid = Grid.build(fiber.length, cfg.grid.n_z, cfg.grid.n_t, window, cfg.grid.n_records)
        pulse = PulseConfig(half_amplitude=cfg.pulse.amplitude or 1.0 / duration,
                            duration=duration, center=cfg.pulse.center_fraction * window,
                            detuning=cfg.pulse.detuning, initial_phase=cfg.pulse.phase)
        grid.check_resolution(pulse)
        input_field = init_soliton(pulse, grid)

        table = atomic_data.mercury_isotope_table(cfg.gas.data_file)
        isotopes = atomic_data.select_isotopes(table, cfg.gas.isotope_mode, lines=cfg.gas.lines)
        try:
            gas = GasSample.from_conditions(cfg.gas.temperature, isotopes,
                                            pressure=cfg.gas.pressure,
                                            atom_number_total=cfg.gas.atom_number_total,
                                            volume=fiber.volume)
        except ValueError as exc:
            raise ConfigError(str(exc), key="temperature" if cfg.gas.pressure is None
                              else "pressure") from None
        thermal = ThermalConfig(
            field_bath_temperature=_or(cfg.atoms.field_bath_temperature, cfg.gas.temperature),
            atom_bath_temperature=_or(cfg.atoms.atom_bath_temperature, cfg.gas.temperature),
            carrier_wavelength=cfg.fiber.wavelength)
        couplings = derive_couplings(isotopes, cfg.fiber.wavelength, fiber.core_area)
        layout = build_layout(gas, couplings, thermal, fiber.core_area * grid.dz,
                              n_bins=cfg.grid.n_freq_bins, span_fwhm=cfg.grid.span_fwhm,
                              lorentz_coefficient=cfg.atoms.lorentz_coefficient,
                              gamma_p_factor=cfg.atoms.gamma_p_factor,
                              damping=cfg.atoms.damping, kappa=fiber.kappa,
                              min_atoms_per_bin=cfg.atoms.min_atoms_per_bin)
        sim = cls(grid=grid, pulse=pulse, fiber=fiber, gas=gas, thermal=thermal,
                  couplings=couplings, layout=layout, input_field=input_field,
                  lo=local_oscillator(input_field.omega, grid.dtau),
                  noise=cfg.ensemble.noise, scheme=cfg.ensemble.scheme,
                  master_seed=cfg.ensemble.master_seed,
                  initial_inversion=cfg.atoms.initial_inversion,
                  batch_count=cfg.ensemble.batch_count, chunk_size=cfg.ensemble.chunk_size)
        sim.check_stability()
        if layout.pruned_fraction > 0.01:
            log.warning("%.1f%% of the line weight sits in bins with fewer than %g atoms per "
                        "cell and is dropped", 100 * layout.pruned_fraction,
                        cfg.atoms.min_atoms_per_bin)
        if calibrate and cfg.atoms.absorption_per_m is not None:
            from .physics.calibration import coupling_from_absorption

            sim = sim.with_couplings(coupling_from_absorption(cfg.atoms.absorption_per_m, sim))
        return sim

    @property
    def group_velocity(self) -> float:
        return self.fiber.group_velocity

    @property
    def group_delay(self) -> float:
        """Retarded-time shift per z step, (1/v_g - 1/c) dz."""
        return (1.0 / self.fiber.group_velocity - 1.0 / C) * self.grid.dz

    @property
    def field_noise_amplitude(self) -> float:
        return field_noise_amplitude(self.couplings.field_coupling, self.fiber.kappa,
                                     self.layout.rates.n_bar, self.fiber.group_velocity)

    def with_couplings(self, couplings: CouplingSpec) -> Simulation:
        return replace(self, couplings=couplings, layout=self.layout.with_couplings(couplings))

    def with_density_scale(self, factor: float) -> Simulation:
        return replace(self, layout=self.layout.with_density_scale(factor))

    def with_input(self, pulse: PulseConfig, field: FieldSlice | None = None) -> Simulation:
        """Same medium and grid, different input pulse; the LO follows the new pulse.

        *field* overrides the soliton built from *pulse*.
        """
        field = field if field is not None else init_soliton(pulse, self.grid)
        return replace(self, pulse=pulse, input_field=field,
                       lo=local_oscillator(field.omega, self.grid.dtau))

    def check_stability(self) -> None:
        dtau = self.grid.dtau
        peak = 2.0 * self.pulse.half_amplitude
        if self.layout.size:
            damping = float(np.max(self.layout.rates.gamma_perp))
            if dtau * damping >= STABILITY_BOUND:
                raise ConfigError(f"time step too coarse for dephasing rate {damping:.3e} "
                                  f"(dtau * gamma_perp = {dtau * damping:.3f})", key="n_t")
            precession = float(np.max(np.abs(self.layout.detuning)))
            if dtau * precession >= STABILITY_BOUND:
                log.warning("dtau * max|detuning| = %.3f exceeds %.1f; far-detuned lines are "
                            "integrated with reduced accuracy", dtau * precession,
                            STABILITY_BOUND)
        if dtau * peak >= STABILITY_BOUND:
            raise ConfigError(f"time step too coarse for peak Rabi frequency "
                              f"(dtau * 2A = {dtau * peak:.3f})", key="n_t")

    def describe(self) -> dict[str, float]:
        """Model metadata echoed into the run manifest."""
        from .physics.field import refractive_index, susceptibility

        main = [t for t in self.gas.isotopes[0].transitions if t.manifold == MAIN_MANIFOLD][0]
        lam = main.wavelength(self.thermal.carrier_wavelength)
        doppler = doppler_fwhm(self.gas.temperature, self.gas.isotopes[0].atomic_mass, lam)
        shape = LineshapeParams.from_widths(main.gamma0, doppler)
        cell_atoms = self.gas.total_density * self.fiber.core_area * self.grid.dz
        chi = susceptibility(cell_atoms, lam, main.gamma0, self.pulse.detuning)
        ideal = self.gas.ideal_gas_density or self.gas.total_density
        return {
            "total_density_m3": self.gas.total_density,
            "pressure_pa": self.gas.pressure,
            "atoms_in_fiber": self.gas.atom_number(self.fiber.volume),
            "atoms_in_fiber_ideal_gas": ideal * self.fiber.volume,
            "doppler_fwhm_rad_s": doppler,
            "voigt_fwhm_rad_s": shape.voigt_fwhm,
            "power_broadened_width_rad_s": power_broadened_width(
                main.gamma0, 2.0 * self.pulse.half_amplitude),
            "thermal_occupation": self.layout.rates.n_bar,
            "field_coupling_m_s2": self.couplings.field_coupling,
            "cw_absorption_per_m": cw_absorption(
                self.layout.coupling, self.layout.density, self.layout.weight,
                self.layout.detuning, self.layout.rates.gamma_perp, self.initial_inversion),
            "cell_susceptibility_real": chi.real,
            "cell_susceptibility_imag": chi.imag,
            "cell_refractive_index_real": refractive_index(chi).real,
            "line_bins": float(self.layout.size),
            "pruned_line_weight": self.layout.pruned_fraction,
        }


def _or(value: float | None, default: float) -> float:
    return default if value is None else value


@dataclass
class TrajectoryState:
    """Mutable state of a batch of trajectories during the z sweep."""

    field: FieldSlice
    rngs: list[np.random.Generator]
    diverged: np.ndarray
    z_index: int = 0


@dataclass
class BatchRecord:
    """LO overlaps (and optionally full fields) of a batch at every recorded z."""

    indices: np.ndarray
    lo_overlap: np.ndarray       # (B, n_records): dtau sum f* Omega
    lo_overlap_dag: np.ndarray   # (B, n_records): dtau sum f Omega+
    diverged: np.ndarray         # (B,)
    fields: np.ndarray | None = None       # (B, n_records, n_t)
    fields_dag: np.ndarray | None = None


def _drive_cell(sim: Simulation, state: TrajectoryState) -> tuple[np.ndarray, np.ndarray]:
    """Drive one cell of fresh atoms with the current field; return the sources over tau."""
    layout, grid = sim.layout, sim.grid
    omega, omega_dag = state.field.omega, state.field.omega_dag
    n_batch, n_t, k = omega.shape[0], grid.n_t, layout.size
    src = np.zeros((n_batch, n_t), dtype=complex)
    src_dag = np.zeros((n_batch, n_t), dtype=complex)
    if k == 0:
        return src, src_dag

    atoms = AtomicEnsembleState.ground((n_batch, k), sim.initial_inversion)
    src[:, 0] = layout.source(atoms.r_minus)
    src_dag[:, 0] = layout.source(atoms.r_plus)
    ok = np.ones(n_batch, dtype=bool)
    for start in range(0, n_t - 1, NOISE_CHUNK):
        stop = min(start + NOISE_CHUNK, n_t - 1)
        normals = None
        if sim.noise:
            normals = np.stack([rng.standard_normal((NORMALS_PER_STEP, stop - start, k))
                                for rng in state.rngs], axis=2)
        for n in range(start, stop):
            om = 0.5 * (omega[:, n] + omega[:, n + 1])[:, None]
            omd = 0.5 * (omega_dag[:, n] + omega_dag[:, n + 1])[:, None]
            draws = (NoiseDraw.from_normals(normals[:, n - start], grid.dtau)
                     if normals is not None else None)
            atoms, good = step_atoms(atoms, om, omd, layout.rates, layout.detuning, grid.dtau,
                                     draws, layout.atoms_per_cell, scheme=sim.scheme)
            ok &= good
            src[:, n + 1] = layout.source(atoms.r_minus)
            src_dag[:, n + 1] = layout.source(atoms.r_plus)
        if not ok.all():
            for arr in (atoms.r_minus, atoms.r_plus, atoms.r3):
                arr[~ok] = 0.0
    state.diverged |= ~ok
    return src, src_dag


def propagate_batch(sim: Simulation, indices, *, keep_fields: bool = False) -> BatchRecord:
    """Sweep a batch of trajectories through every z cell, recording at the sample points."""
    grid = sim.grid
    indices = np.asarray(list(indices), dtype=np.uint64)
    n_batch = indices.size
    rngs = ([trajectory_stream(sim.master_seed, int(i)) for i in indices] if sim.noise else [])
    field = FieldSlice(np.tile(sim.input_field.omega, (n_batch, 1)),
                       np.tile(sim.input_field.omega_dag, (n_batch, 1)))
    state = TrajectoryState(field=field, rngs=rngs, diverged=np.zeros(n_batch, dtype=bool))
    records = {z: i for i, z in enumerate(grid.record_indices)}
    n_rec = len(records)
    overlap = np.zeros((n_batch, n_rec), dtype=complex)
    overlap_dag = np.zeros((n_batch, n_rec), dtype=complex)
    fields = np.zeros((n_batch, n_rec, grid.n_t), dtype=complex) if keep_fields else None
    fields_dag = np.zeros_like(fields) if keep_fields else None
    limit = FIELD_DIVERGENCE_FACTOR * 2.0 * sim.pulse.half_amplitude
    amplitude = sim.field_noise_amplitude

    def record(z_index: int) -> None:
        slot = records[z_index]
        a, b = lo_overlaps(state.field.omega, state.field.omega_dag, sim.lo, grid.dtau)
        overlap[:, slot], overlap_dag[:, slot] = a, b
        if fields is not None:
            fields[:, slot], fields_dag[:, slot] = state.field.omega, state.field.omega_dag

    if 0 in records:
        record(0)
    with np.errstate(over="ignore", invalid="ignore"):
        for iz in range(grid.n_z):
            src, src_dag = _drive_cell(sim, state)
            xi = None
            if sim.noise:
                xi = np.stack([draw_field_noise(rng, (grid.n_t,), grid.dtau, grid.dz)
                               for rng in rngs])
            omega, omega_dag = step_field(state.field.omega, state.field.omega_dag, src,
                                          src_dag, sim.fiber.kappa, grid.dz, xi, amplitude,
                                          sim.group_delay, grid.dtau)
            mag = np.maximum(np.abs(omega), np.abs(omega_dag))
            state.diverged |= ~np.all(np.isfinite(mag) & (mag <= limit), axis=-1)
            omega[state.diverged] = 0.0
            omega_dag[state.diverged] = 0.0
            state.field = FieldSlice(omega, omega_dag)
            state.z_index = iz + 1
            if state.z_index in records:
                record(state.z_index)
    if state.diverged.any():
        log.debug("trajectories %s diverged", indices[state.diverged].tolist())
    return BatchRecord(indices=indices, lo_overlap=overlap, lo_overlap_dag=overlap_dag,
                       diverged=state.diverged, fields=fields, fields_dag=fields_dag)


def propagate_trajectory(sim: Simulation, trajectory_index: int, *,
                         keep_fields: bool = True) -> BatchRecord:
    return propagate_batch(sim, [trajectory_index], keep_fields=keep_fields)
