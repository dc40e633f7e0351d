"""Propagation grid, input soliton and field diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from ..core.constants import C
from ..errors import ConfigError

# Minimum window / pulse width and pulse width / time step.
MIN_WINDOW_DURATIONS = 20.0
MIN_STEPS_PER_DURATION = 50.0
EDGE_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PulseConfig:
    half_amplitude: float  # A, rad/s; peak Rabi frequency is 2A
    duration: float        # tau_p, s; sets the auto window and the default A = 1/tau_p
    center: float          # tau_0, s
    detuning: float = 0.0
    initial_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.half_amplitude <= 0:
            raise ConfigError(f"pulse amplitude must be positive, got {self.half_amplitude}",
                              key="amplitude")
        if self.duration <= 0:
            raise ConfigError(f"pulse duration must be positive, got {self.duration}",
                              key="duration")

    @classmethod
    def soliton(cls, duration: float, center: float, detuning: float = 0.0,
                initial_phase: float = 0.0) -> PulseConfig:
        return cls(half_amplitude=1.0 / duration, duration=duration, center=center,
                   detuning=detuning, initial_phase=initial_phase)

    @property
    def width(self) -> float:
        """sech width 1/A of the input soliton; equals duration for A = 1/tau_p."""
        return 1.0 / self.half_amplitude

    @property
    def area(self) -> float:
        return 2.0 * math.pi


@dataclass(frozen=True)
class FiberConfig:
    length: float = 0.05
    core_diameter: float = 10e-6
    kappa: float = 0.0
    group_velocity: float = C
    mode_profile: float = 1.0

    def __post_init__(self) -> None:
        if self.length <= 0:
            raise ConfigError(f"fiber length must be positive, got {self.length}", key="length")
        if self.core_diameter <= 0:
            raise ConfigError("core_diameter must be positive", key="core_diameter")
        if self.kappa < 0:
            raise ConfigError("kappa must be non-negative", key="kappa")
        if self.group_velocity <= 0:
            raise ConfigError("group_velocity must be positive", key="group_velocity")

    @property
    def core_area(self) -> float:
        return math.pi * (0.5 * self.core_diameter) ** 2

    @property
    def volume(self) -> float:
        return self.core_area * self.length


@dataclass(frozen=True)
class Grid:
    n_z: int
    dz: float
    n_t: int
    dtau: float
    record_indices: tuple[int, ...] = field(default=())

    @classmethod
    def build(cls, length: float, n_z: int, n_t: int, window: float,
              n_records: int = 50) -> Grid:
        if n_z < 1 or n_t < 2:
            raise ConfigError(f"grid needs n_z >= 1 and n_t >= 2, got n_z={n_z}, n_t={n_t}")
        if n_records < 1:
            raise ConfigError("n_records must be at least 1", key="n_records")
        indices = np.unique(np.round(np.linspace(0, n_z, min(n_records, n_z + 1))).astype(int))
        return cls(n_z=n_z, dz=length / n_z, n_t=n_t, dtau=window / n_t,
                   record_indices=tuple(int(i) for i in indices))

    @property
    def window(self) -> float:
        return self.n_t * self.dtau

    @property
    def length(self) -> float:
        return self.n_z * self.dz

    @property
    def tau(self) -> np.ndarray:
        return np.arange(self.n_t) * self.dtau

    @property
    def sample_z(self) -> np.ndarray:
        return np.asarray(self.record_indices, dtype=float) * self.dz

    def check_resolution(self, pulse: PulseConfig) -> None:
        if self.window < MIN_WINDOW_DURATIONS * pulse.width:
            raise ConfigError(
                f"window {self.window:.3e} s is shorter than {MIN_WINDOW_DURATIONS:g} pulse "
                f"widths 1/A", key="window")
        if self.dtau > pulse.width / MIN_STEPS_PER_DURATION:
            raise ConfigError(
                f"time step {self.dtau:.3e} s exceeds (1/A)/{MIN_STEPS_PER_DURATION:g}; "
                "raise n_t", key="n_t")
        if not 0.0 <= pulse.center <= self.window:
            raise ConfigError("pulse center lies outside the time window", key="center_fraction")


@dataclass
class FieldSlice:
    """Omega and its independent positive-P partner on the retarded-time grid."""

    omega: np.ndarray
    omega_dag: np.ndarray

    def copy(self) -> FieldSlice:
        return FieldSlice(self.omega.copy(), self.omega_dag.copy())


def _sech(x: np.ndarray) -> np.ndarray:
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def _sech_field(envelope: np.ndarray, pulse: PulseConfig, grid: Grid) -> FieldSlice:
    omega = envelope * np.exp(1j * (pulse.detuning * grid.tau + pulse.initial_phase))
    edge = max(abs(omega[0]), abs(omega[-1]))
    if edge > EDGE_TOLERANCE * np.max(envelope):
        raise ConfigError("time window truncates the input pulse; widen the window or "
                          "center the pulse", key="window")
    return FieldSlice(omega=omega, omega_dag=np.conj(omega))


def init_soliton(pulse: PulseConfig, grid: Grid) -> FieldSlice:
    """2A sech(A (tau - tau0)) exp(i(delta tau + phi0)); the area is 2 pi for every A."""
    a = pulse.half_amplitude
    return _sech_field(2.0 * a * _sech(a * (grid.tau - pulse.center)), pulse, grid)


def init_weak_pulse(pulse: PulseConfig, grid: Grid, area: float) -> FieldSlice:
    """sech pulse of width tau_p carrying *area* instead of 2 pi, for small-signal absorption."""
    if area <= 0:
        raise ValueError(f"pulse area must be positive, got {area}")
    peak = area / (math.pi * pulse.duration)
    return _sech_field(peak * _sech((grid.tau - pulse.center) / pulse.duration), pulse, grid)


def pulse_area(field_slice: FieldSlice, grid: Grid) -> float:
    return float(trapezoid(np.abs(field_slice.omega), dx=grid.dtau))


def signed_area(field_slice: FieldSlice, grid: Grid) -> float:
    """|integral of Omega| - the area that obeys the small-signal area theorem."""
    return float(abs(trapezoid(field_slice.omega, dx=grid.dtau)))


def pulse_energy(field_slice: FieldSlice, grid: Grid) -> float:
    """Integral of Omega^dagger Omega over tau (real part), in rad^2/s."""
    return float(trapezoid((field_slice.omega_dag * field_slice.omega).real, dx=grid.dtau))


def susceptibility(n_atoms: float, wavelength: float, gamma0: float, detuning: float,
                   rabi_sq: float = 0.0) -> complex:
    """Two-level susceptibility of *n_atoms* per cell (diagnostic only)."""
    if n_atoms < 0:
        raise ValueError(f"atom count must be non-negative, got {n_atoms}")
    prefactor = n_atoms * 3.0 * wavelength**3 * gamma0 / (4.0 * math.pi**2)
    return prefactor * (1j * gamma0 - 2.0 * detuning) / (
        gamma0**2 + 4.0 * detuning**2 + 2.0 * rabi_sq)


def refractive_index(chi: complex) -> complex:
    return complex(np.sqrt(1.0 + complex(chi)))
