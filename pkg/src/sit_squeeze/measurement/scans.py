"""Parameter scans: phase/length surface, detuning and pressure sweeps.

Each scan kind is registered by name so the CLI can dispatch on ``scan.kind``.
Every ensemble in a sweep reuses the configured master seed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..config import RunConfig, ScanSettings
from ..core import registry
from ..ensemble import TrajectorySet, run_ensemble
from ..physics.atomic_data import vapor_pressure_hg
from ..physics.field import FieldSlice, pulse_area, pulse_energy
from ..simulation import Simulation
from .surface import SqueezingSurface

log = logging.getLogger(__name__)


def phase_grid(scan: ScanSettings) -> np.ndarray:
    return np.linspace(scan.phase_min, scan.phase_max, scan.n_phase)


def scan_phase_length(ts: TrajectorySet, thetas) -> SqueezingSurface:
    """S over every recorded z and every LO phase in *thetas*."""
    return SqueezingSurface.from_trajectories(ts, thetas)


@dataclass(frozen=True)
class PropagationRow:
    z_m: float
    area_rad: float
    energy: float


def propagation_table(ts: TrajectorySet, sim: Simulation) -> list[PropagationRow]:
    """Area and energy of the ensemble-mean field at each recorded z."""
    mean = ts.mean_field()
    rows = []
    for z, omega in zip(ts.sample_z, mean):
        slice_ = FieldSlice(omega, np.conj(omega))
        rows.append(PropagationRow(z_m=float(z), area_rad=pulse_area(slice_, sim.grid),
                                   energy=pulse_energy(slice_, sim.grid)))
    return rows


@dataclass
class PhaseResult:
    surface: SqueezingSurface
    propagation: list[PropagationRow]
    trajectories: TrajectorySet
    simulation: Simulation


@dataclass(frozen=True)
class DetuningRow:
    delta: float          # rad/s
    delta_tau: float      # delta * duration
    S_opt: float
    S_opt_dB: float
    L_opt: float
    theta_opt: float
    stderr: float
    n_discarded: int = 0

    @property
    def log10_delta_plus_1(self) -> float:
        """Log axis used for detuning figures: log10(delta * duration + 1)."""
        return math.log10(self.delta_tau + 1.0)


@dataclass(frozen=True)
class PressureRow:
    isotope_mode: str
    temperature_K: float
    pressure_Pa: float
    S_opt: float
    S_opt_dB: float
    L_opt: float
    theta_opt: float
    stderr: float
    n_discarded: int = 0


def _n_traj(cfg: RunConfig, n_traj: int | None) -> int:
    return cfg.ensemble.n_traj if n_traj is None else n_traj


def run_phase(cfg: RunConfig, *, threads: int | None = 1, n_traj: int | None = None,
              sim: Simulation | None = None) -> PhaseResult:
    sim = sim or Simulation.from_config(cfg)
    ts = run_ensemble(sim, _n_traj(cfg, n_traj), threads=threads, keep_fields=True)
    surface = scan_phase_length(ts, phase_grid(cfg.scan))
    log.info(surface.summary())
    return PhaseResult(surface=surface, propagation=propagation_table(ts, sim),
                       trajectories=ts, simulation=sim)


def _optimum(cfg: RunConfig, threads: int | None, n_traj: int | None):
    sim = Simulation.from_config(cfg)
    ts = run_ensemble(sim, _n_traj(cfg, n_traj), threads=threads)
    return scan_phase_length(ts, phase_grid(cfg.scan)).find_optimum(), ts.n_discarded


def scan_detuning(cfg: RunConfig, deltas=None, *, threads: int | None = 1,
                  n_traj: int | None = None) -> list[DetuningRow]:
    """One ensemble per detuning; *deltas* are in units of 1/duration (scan.detunings)."""
    deltas = cfg.scan.detunings if deltas is None else deltas
    duration = cfg.pulse.duration
    rows = []
    for d in deltas:
        if d < 0:
            raise ValueError(f"detunings must be non-negative, got {d}")
        point = cfg.with_section("pulse", detuning=d / duration)
        opt, discarded = _optimum(point, threads, n_traj)
        log.info("delta = %g/tau_p: S* = %.4f at L = %.2f mm", d, opt.S, 1e3 * opt.z)
        rows.append(DetuningRow(delta=d / duration, delta_tau=float(d), S_opt=opt.S,
                                S_opt_dB=opt.S_dB, L_opt=opt.z, theta_opt=opt.theta,
                                stderr=opt.stderr, n_discarded=discarded))
    return rows


def pressure_points(temperatures, pressures=None) -> list[tuple[float, float]]:
    """(T, P) pairs; P defaults to the saturated vapor pressure at each T."""
    if pressures is None:
        return [(float(t), vapor_pressure_hg(t)) for t in temperatures]
    if len(pressures) != len(temperatures):
        raise ValueError("pressures must match temperatures one to one")
    return [(float(t), float(p)) for t, p in zip(temperatures, pressures)]


def scan_pressure(cfg: RunConfig, points=None, modes=None, *, threads: int | None = 1,
                  n_traj: int | None = None) -> list[PressureRow]:
    """One ensemble per (isotope mode, temperature, pressure)."""
    if points is None:
        points = pressure_points(cfg.scan.temperatures, cfg.scan.pressures)
    modes = cfg.scan.isotope_modes if modes is None else modes
    rows = []
    for mode in modes:
        for temperature, pressure in points:
            point = cfg.with_section("gas", isotope_mode=mode, temperature=temperature,
                                     pressure=pressure)
            opt, discarded = _optimum(point, threads, n_traj)
            log.info("%s at %.1f K (%.3g Pa): S* = %.4f at L = %.2f mm", mode, temperature,
                     pressure, opt.S, 1e3 * opt.z)
            rows.append(PressureRow(isotope_mode=mode, temperature_K=temperature,
                                    pressure_Pa=pressure, S_opt=opt.S, S_opt_dB=opt.S_dB,
                                    L_opt=opt.z, theta_opt=opt.theta, stderr=opt.stderr,
                                    n_discarded=discarded))
    return rows


registry.register("phase", run_phase)
registry.register("detuning", scan_detuning)
registry.register("pressure", scan_pressure)


def point_configs(cfg: RunConfig) -> list[RunConfig]:
    """Every configuration a scan of kind ``cfg.scan.kind`` will run, for up-front checks."""
    kind = cfg.scan.kind
    if kind == "detuning":
        return [cfg.with_section("pulse", detuning=d / cfg.pulse.duration)
                for d in cfg.scan.detunings]
    if kind == "pressure":
        points = pressure_points(cfg.scan.temperatures, cfg.scan.pressures)
        return [cfg.with_section("gas", isotope_mode=m, temperature=t, pressure=p)
                for m in cfg.scan.isotope_modes for t, p in points]
    return [cfg]
