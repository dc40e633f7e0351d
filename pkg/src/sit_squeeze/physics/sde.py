"""Positive-P Maxwell-Bloch kernel: atomic drift and noise, steppers, field step.

Atomic arrays carry a flattened line axis last: one entry per
(isotope, transition, frequency bin), see ``AtomicLayout``. Any leading axes
(typically a batch of trajectories) broadcast through every function here.
Noise amplitudes follow the Ito form; the midpoint stepper adds the
Stratonovich drift correction so both schemes integrate the same process.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..core.rng import complex_normals
from .rates import RateSet

SCHEMES = ("midpoint", "euler")
MIDPOINT_ITERATIONS = 4
# A trajectory is diverged once any atomic variable exceeds this magnitude.
ATOM_DIVERGENCE_LIMIT = 1e3
# Real normals per line per time step: xi_J, xi_J+, xi_z, xi_P (2), xi_o (2).
NORMALS_PER_STEP = 7


@dataclass
class AtomicEnsembleState:
    r_minus: np.ndarray
    r_plus: np.ndarray
    r3: np.ndarray

    @classmethod
    def ground(cls, shape: tuple[int, ...], initial_inversion: float = -0.5
               ) -> AtomicEnsembleState:
        return cls(r_minus=np.zeros(shape, dtype=complex), r_plus=np.zeros(shape, dtype=complex),
                   r3=np.full(shape, initial_inversion, dtype=complex))

    def copy(self) -> AtomicEnsembleState:
        return AtomicEnsembleState(self.r_minus.copy(), self.r_plus.copy(), self.r3.copy())

    def bloch_length(self) -> np.ndarray:
        """R3^2 + R+ R-, conserved by undamped noiseless evolution."""
        return self.r3**2 + self.r_plus * self.r_minus


@dataclass(frozen=True)
class CouplingSpec:
    """Source coefficients per (isotope, transition) and the field-commutator coupling."""

    lines: tuple[tuple[int, str], ...]
    source: np.ndarray  # G per line, m^2/s
    # Abundance-weighted field coupling, m/s^2: [Omega, Omega+] = 4 field_coupling / v_g.
    field_coupling: float

    def __post_init__(self) -> None:
        if np.any(np.asarray(self.source) < 0) or self.field_coupling < 0:
            raise ValueError("couplings must be non-negative")
        if len(self.lines) != len(self.source):
            raise ValueError("one source coefficient per line is required")

    def scaled(self, factor: float) -> CouplingSpec:
        if factor < 0:
            raise ValueError(f"coupling scale must be non-negative, got {factor}")
        return replace(self, source=np.asarray(self.source) * factor,
                       field_coupling=self.field_coupling * factor)

    def for_line(self, mass_number: int, label: str) -> float:
        return float(self.source[self.lines.index((mass_number, label))])


@dataclass(frozen=True)
class NoiseDraw:
    """Atomic Langevin increments for one step; every xi has variance 1/dtau."""

    xi_j: np.ndarray
    xi_j_dag: np.ndarray
    xi_z: np.ndarray
    xi_p: np.ndarray
    xi_o: np.ndarray

    @classmethod
    def from_normals(cls, normals: np.ndarray, dtau: float) -> NoiseDraw:
        """Build from standard normals with the 7-component axis first."""
        s = 1.0 / math.sqrt(dtau)
        h = s * math.sqrt(0.5)
        return cls(xi_j=s * normals[0], xi_j_dag=s * normals[1], xi_z=s * normals[2],
                   xi_p=h * (normals[3] + 1j * normals[4]),
                   xi_o=h * (normals[5] + 1j * normals[6]))

    @classmethod
    def draw(cls, rng: np.random.Generator, shape: tuple[int, ...], dtau: float) -> NoiseDraw:
        return cls.from_normals(rng.standard_normal((NORMALS_PER_STEP, *shape)), dtau)


def atomic_drift(state: AtomicEnsembleState, omega, omega_dag, rates: RateSet, detuning,
                 u: complex = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic Bloch drift (dR-, dR+, dR3) per unit retarded time."""
    rm, rp, r3 = state.r_minus, state.r_plus, state.r3
    uc = np.conj(u)
    d_minus = -(rates.gamma_perp + 1j * detuning) * rm + u * omega * r3
    d_plus = -(rates.gamma_perp - 1j * detuning) * rp + uc * omega_dag * r3
    d3 = -rates.gamma_par * (r3 - rates.sigma_ss) - 0.5 * (u * omega * rp + uc * omega_dag * rm)
    return d_minus, d_plus, d3


def atomic_noise(state: AtomicEnsembleState, omega, omega_dag, rates: RateSet,
                 atoms_per_cell, draws: NoiseDraw, u: complex = 1.0
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Langevin forces (F^R, F^R+, F^z); principal-branch roots of whole products."""
    rm, rp, r3 = state.r_minus, state.r_plus, state.r3
    uc = np.conj(u)
    inv = 1.0 / np.sqrt(atoms_per_cell)
    w12 = np.asarray(rates.W12, dtype=float)
    pump = 2.0 * np.sqrt(rates.gamma_p * (r3 + 1.0) + 0j)
    incoherent = 2.0 * np.sqrt(w12)
    xi_p_c, xi_o_c = np.conj(draws.xi_p), np.conj(draws.xi_o)

    f_minus = inv * (draws.xi_j * np.sqrt(u * omega * rm + 0j) + pump * draws.xi_p
                     + incoherent * draws.xi_o)
    f_plus = inv * (draws.xi_j_dag * np.sqrt(uc * omega_dag * rp + 0j) + pump * xi_p_c
                    + incoherent * xi_o_c)
    bracket = (2.0 * rates.gamma_par * (1.0 - rates.sigma_ss * r3)
               + (rm * uc * omega_dag + rp * u * omega) - 2.0 * w12 * rp * rm)
    f3 = inv * (draws.xi_z * np.sqrt(bracket + 0j)
                - (draws.xi_o * rp + xi_o_c * rm) * np.sqrt(w12))
    return f_minus, f_plus, f3


def stratonovich_correction(omega, omega_dag, rates: RateSet, atoms_per_cell,
                            u: complex = 1.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Drift to add when the noise is integrated in the Stratonovich sense."""
    inv = 1.0 / np.asarray(atoms_per_cell, dtype=float)
    c_minus = -0.25 * u * omega * inv
    c_plus = -0.25 * np.conj(u) * omega_dag * inv
    c3 = (0.5 * rates.gamma_par * rates.sigma_ss + 2.0 * np.asarray(rates.W12)) * inv
    return c_minus, c_plus, c3 + 0j


def _increment(state: AtomicEnsembleState, omega, omega_dag, rates: RateSet, detuning,
               draws: NoiseDraw | None, atoms_per_cell, u, correction):
    d = atomic_drift(state, omega, omega_dag, rates, detuning, u)
    if draws is None:
        return d
    f = atomic_noise(state, omega, omega_dag, rates, atoms_per_cell, draws, u)
    if correction is None:
        return tuple(a + b for a, b in zip(d, f))
    return tuple(a + b + c for a, b, c in zip(d, f, correction))


def _healthy(state: AtomicEnsembleState) -> np.ndarray:
    ok = np.ones(state.r3.shape[:-1], dtype=bool)
    for arr in (state.r_minus, state.r_plus, state.r3):
        mag = np.abs(arr)
        ok &= np.all(np.isfinite(mag) & (mag <= ATOM_DIVERGENCE_LIMIT), axis=-1)
    return ok


def step_atoms(state: AtomicEnsembleState, omega, omega_dag, rates: RateSet, detuning,
               dtau: float, draws: NoiseDraw | None = None, atoms_per_cell=None, *,
               u: complex = 1.0, scheme: str = "midpoint",
               iterations: int = MIDPOINT_ITERATIONS) -> tuple[AtomicEnsembleState, np.ndarray]:
    """Advance one retarded-time step.

    Returns the new state and a boolean mask over the leading axes that is False
    where the midpoint iteration stopped contracting or values blew up.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"Unknown scheme '{scheme}'. Known: {list(SCHEMES)}")
    if draws is not None and atoms_per_cell is None:
        raise ValueError("atoms_per_cell is required when noise is drawn")

    with np.errstate(over="ignore", invalid="ignore"):
        if scheme == "euler":
            inc = _increment(state, omega, omega_dag, rates, detuning, draws, atoms_per_cell,
                             u, None)
            new = AtomicEnsembleState(state.r_minus + dtau * inc[0],
                                      state.r_plus + dtau * inc[1], state.r3 + dtau * inc[2])
            return new, _healthy(new)

        correction = (stratonovich_correction(omega, omega_dag, rates, atoms_per_cell, u)
                      if draws is not None else None)
        y0 = (state.r_minus, state.r_plus, state.r3)
        mid = state
        change = prev_change = None
        for _ in range(iterations):
            inc = _increment(mid, omega, omega_dag, rates, detuning, draws, atoms_per_cell,
                             u, correction)
            nxt = tuple(a + 0.5 * dtau * b for a, b in zip(y0, inc))
            prev_change = change
            change = _max_change(nxt, (mid.r_minus, mid.r_plus, mid.r3))
            mid = AtomicEnsembleState(*nxt)
        new = AtomicEnsembleState(*(2.0 * m - a for m, a in zip(
            (mid.r_minus, mid.r_plus, mid.r3), y0)))
        ok = _healthy(new)
        if prev_change is not None:
            scale = 1e-6 * (1.0 + np.max(np.abs(new.r3), axis=-1))
            ok &= (change <= prev_change) | (change <= scale)
        return new, ok


def _max_change(a: tuple[np.ndarray, ...], b: tuple[np.ndarray, ...]) -> np.ndarray:
    """Largest elementwise difference, reduced over the line axis."""
    out = None
    for x, y in zip(a, b):
        d = np.max(np.abs(x - y), axis=-1)
        out = d if out is None else np.maximum(out, d)
    return out


def polarization_source(r, weights, densities, couplings) -> np.ndarray:
    """Sum over lines of G rho w R, the medium's drive of dOmega/dz (rad/s per m)."""
    return np.sum(np.asarray(couplings) * np.asarray(densities) * np.asarray(weights) * r,
                  axis=-1)


def field_noise_amplitude(field_coupling: float, kappa: float, n_bar: float,
                          group_velocity: float) -> float:
    """Prefactor of the thermal field noise, 2 sqrt(G kappa n / v_g)."""
    return 2.0 * math.sqrt(field_coupling * kappa * n_bar / group_velocity)


def draw_field_noise(rng: np.random.Generator, shape: tuple[int, ...], dtau: float,
                     dz: float) -> np.ndarray:
    """Complex xi with <xi xi*> = 1/(dtau dz)."""
    return complex_normals(rng, shape) / math.sqrt(dtau * dz)


def spectral_delay(values: np.ndarray, delay: float, dtau: float) -> np.ndarray:
    """Shift samples later in tau by *delay* seconds (periodic, band-limited)."""
    freqs = np.fft.fftfreq(values.shape[-1], d=dtau)
    return np.fft.ifft(np.fft.fft(values, axis=-1) * np.exp(-2j * np.pi * freqs * delay),
                       axis=-1)


def step_field(omega: np.ndarray, omega_dag: np.ndarray, source, source_dag, kappa: float,
               dz: float, xi: np.ndarray | None = None, noise_amplitude: float = 0.0,
               delay: float = 0.0, dtau: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """One z step of the retarded-frame field equation.

    Loss is applied as the exact factor exp(-kappa dz / 2); *delay* is the
    retarded-time shift (1/v_g - 1/c) dz, zero when v_g = c.
    """
    decay = math.exp(-0.5 * kappa * dz)
    new = omega * decay + dz * source
    new_dag = omega_dag * decay + dz * source_dag
    if xi is not None and noise_amplitude:
        new = new + dz * noise_amplitude * xi
        new_dag = new_dag + dz * noise_amplitude * np.conj(xi)
    if delay:
        if dtau is None:
            raise ValueError("dtau is required for a non-zero group delay")
        new = spectral_delay(new, delay, dtau)
        new_dag = spectral_delay(new_dag, delay, dtau)
    return new, new_dag
