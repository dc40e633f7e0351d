"""Thermal occupations, pumping and damping rates of the two-level model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.constants import CARRIER_WAVELENGTH, HBAR, K_B, carrier_frequency

# Pure dephasing defaults to this multiple of the spontaneous rate.
DEFAULT_GAMMA_P_FACTOR = 3.0


@dataclass(frozen=True)
class ThermalConfig:
    field_bath_temperature: float  # T, K
    atom_bath_temperature: float   # T_a, K
    carrier_wavelength: float = CARRIER_WAVELENGTH

    @property
    def omega0(self) -> float:
        return carrier_frequency(self.carrier_wavelength)


@dataclass(frozen=True)
class RateSet:
    """Rates of one line; fields may also be arrays aligned with a flattened line axis."""

    W12: float | np.ndarray
    W21: float | np.ndarray
    gamma_par: float | np.ndarray
    gamma_perp: float | np.ndarray
    gamma_p: float | np.ndarray
    sigma_ss: float | np.ndarray
    n_bar: float = 0.0
    n_bar_a: float = 0.0
    kappa: float = 0.0

    @classmethod
    def for_line(cls, gamma0: float, thermal: ThermalConfig, *, gamma_p: float | None = None,
                 kappa: float = 0.0, damping: bool = True) -> RateSet:
        if gamma_p is None:
            gamma_p = DEFAULT_GAMMA_P_FACTOR * gamma0
        n_bar = thermal_occupation(thermal.omega0, thermal.field_bath_temperature)
        n_bar_a = thermal_occupation(thermal.omega0, thermal.atom_bath_temperature)
        if not damping:
            # undamped diagnostics: frozen populations, no dephasing
            return cls(W12=0.0, W21=0.0, gamma_par=0.0, gamma_perp=0.0, gamma_p=0.0,
                       sigma_ss=-1.0, n_bar=n_bar, n_bar_a=n_bar_a, kappa=kappa)
        w12, w21 = pump_decay_rates(gamma0, n_bar_a)
        g_par, g_perp = damping_rates(w12, w21, gamma_p)
        return cls(W12=w12, W21=w21, gamma_par=g_par, gamma_perp=g_perp, gamma_p=gamma_p,
                   sigma_ss=steady_state_inversion(w12, w21), n_bar=n_bar, n_bar_a=n_bar_a,
                   kappa=kappa)


def thermal_occupation(omega0: float, temperature: float) -> float:
    """Bose-Einstein occupation 1/(exp(hbar w / k T) - 1); 0 at T = 0."""
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if temperature == 0:
        return 0.0
    x = HBAR * omega0 / (K_B * temperature)
    # exp(-x)/(1 - exp(-x)) stays finite for large x
    return math.exp(-x) / -math.expm1(-x)


def pump_decay_rates(gamma0: float, n_bar_a: float) -> tuple[float, float]:
    """(W12, W21) = (gamma0 n_a, gamma0 (1 + n_a))."""
    if gamma0 < 0 or n_bar_a < 0:
        raise ValueError("gamma0 and n_bar_a must be non-negative")
    return gamma0 * n_bar_a, gamma0 * (1.0 + n_bar_a)


def damping_rates(W12: float, W21: float, gamma_p: float) -> tuple[float, float]:
    """(gamma_par, gamma_perp) = (W12 + W21, gamma_p + gamma_par / 2)."""
    g_par = W12 + W21
    return g_par, gamma_p + 0.5 * g_par


def steady_state_inversion(W12: float, W21: float) -> float:
    if W12 + W21 == 0:
        raise ValueError("steady-state inversion undefined when W12 + W21 = 0")
    return (W12 - W21) / (W12 + W21)


def power_broadened_width(linewidth: float, rabi: float) -> float:
    """sqrt(linewidth^2 + rabi^2)."""
    return math.hypot(linewidth, rabi)


def cw_absorption(couplings: np.ndarray, densities: np.ndarray, weights: np.ndarray,
                  detunings: np.ndarray, gamma_perp: np.ndarray,
                  initial_inversion: float = -0.5) -> float:
    """Small-signal intensity absorption coefficient (1/m) of a weak continuous wave.

    Linear response of the Bloch equations with R3 frozen at its initial value.
    Undamped bins contribute nothing.
    """
    g = np.asarray(gamma_perp, dtype=float)
    denom = g**2 + np.asarray(detunings, dtype=float) ** 2
    lorentz = np.where(g > 0, g / np.where(denom > 0, denom, 1.0), 0.0)
    return float(-2.0 * initial_inversion * np.sum(couplings * densities * weights * lorentz))
