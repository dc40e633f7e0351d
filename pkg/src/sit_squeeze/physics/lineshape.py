"""Doppler, Lorentzian and pseudo-Voigt lineshapes and their discrete frequency grids."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.constants import K_B

_LN2 = math.log(2.0)
# Olivero-Longbothum style combination; 0.5346 is the published fit, 0.5 the
# form used for the vapor model.
DEFAULT_LORENTZ_COEFFICIENT = 0.5


@dataclass(frozen=True)
class LineshapeParams:
    lorentz_fwhm: float  # rad/s
    doppler_fwhm: float  # rad/s
    voigt_fwhm: float    # rad/s
    center: float = 0.0  # rad/s offset

    @classmethod
    def from_widths(cls, lorentz_fwhm: float, doppler_fwhm: float, center: float = 0.0, *,
                    lorentz_coefficient: float = DEFAULT_LORENTZ_COEFFICIENT) -> LineshapeParams:
        return cls(lorentz_fwhm=lorentz_fwhm, doppler_fwhm=doppler_fwhm,
                   voigt_fwhm=voigt_fwhm(lorentz_fwhm, doppler_fwhm, lorentz_coefficient),
                   center=center)

    @property
    def is_delta(self) -> bool:
        return self.voigt_fwhm == 0.0


@dataclass(frozen=True)
class FrequencyGrid:
    """Frequency bins (offsets from line center, rad/s) with weights summing to 1."""

    bin_centers: np.ndarray
    weights: np.ndarray
    bin_width: float

    @property
    def size(self) -> int:
        return int(self.bin_centers.size)

    @property
    def is_delta(self) -> bool:
        return self.size == 1

    def second_moment(self) -> float:
        mean = float(np.sum(self.weights * self.bin_centers))
        return float(np.sum(self.weights * (self.bin_centers - mean) ** 2))


def doppler_fwhm(temperature: float, atomic_mass: float, wavelength: float) -> float:
    """Doppler FWHM in rad/s: (4 pi / lambda) sqrt(2 ln2 k_B T / m)."""
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if atomic_mass <= 0 or wavelength <= 0:
        raise ValueError("atomic_mass and wavelength must be positive")
    return 4.0 * math.pi / wavelength * math.sqrt(2.0 * _LN2 * K_B * temperature / atomic_mass)


def voigt_fwhm(lorentz_fwhm: float, doppler_fwhm: float,
               lorentz_coefficient: float = DEFAULT_LORENTZ_COEFFICIENT) -> float:
    """Approximate Voigt FWHM, ``c L + sqrt(0.2166 L^2 + D^2)``."""
    if lorentz_fwhm < 0 or doppler_fwhm < 0:
        raise ValueError("widths must be non-negative")
    return lorentz_coefficient * lorentz_fwhm + math.sqrt(0.2166 * lorentz_fwhm**2
                                                          + doppler_fwhm**2)


def _lorentzian(x: np.ndarray, fwhm: float) -> np.ndarray:
    half = 0.5 * fwhm
    return (half / math.pi) / (x**2 + half**2)


def _gaussian(x: np.ndarray, fwhm: float) -> np.ndarray:
    return (2.0 / fwhm) * math.sqrt(_LN2 / math.pi) * np.exp(-4.0 * _LN2 * x**2 / fwhm**2)


def mixing_parameter(params: LineshapeParams) -> float:
    """Lorentzian fraction eta of the pseudo-Voigt, clipped to [0, 1]."""
    ratio = min(max(params.lorentz_fwhm / params.voigt_fwhm, 0.0), 1.0)
    eta = 1.36603 * ratio - 0.47719 * ratio**2 + 0.11116 * ratio**3
    return min(max(eta, 0.0), 1.0)


def voigt_profile(omega: np.ndarray | float, params: LineshapeParams) -> np.ndarray:
    """Normalized pseudo-Voigt density at angular frequency offsets *omega* (per rad/s)."""
    if params.is_delta:
        raise ValueError("all widths are zero: delta line has no density, use n_bins=1")
    x = np.asarray(omega, dtype=float) - params.center
    eta = mixing_parameter(params)
    width = params.voigt_fwhm
    return eta * _lorentzian(x, width) + (1.0 - eta) * _gaussian(x, width)


def discretize_lineshape(params: LineshapeParams, n_bins: int = 41,
                         span_fwhm: float = 6.0) -> FrequencyGrid:
    """Sample the profile on *n_bins* equally spaced bins spanning span_fwhm Voigt widths."""
    if n_bins < 1 or n_bins % 2 == 0:
        raise ValueError(f"n_freq_bins must be a positive odd number, got {n_bins}")
    if span_fwhm <= 0:
        raise ValueError(f"span_fwhm must be positive, got {span_fwhm}")
    if n_bins == 1 or params.is_delta:
        return FrequencyGrid(bin_centers=np.array([params.center]), weights=np.array([1.0]),
                             bin_width=0.0)
    half_span = 0.5 * span_fwhm * params.voigt_fwhm
    offsets = np.linspace(-half_span, half_span, n_bins)
    # exact antisymmetry about the center, linspace rounding aside
    offsets = 0.5 * (offsets - offsets[::-1])
    centers = offsets + params.center
    weights = voigt_profile(centers, params)
    weights = 0.5 * (weights + weights[::-1])
    return FrequencyGrid(bin_centers=centers, weights=weights / weights.sum(),
                         bin_width=float(offsets[1] - offsets[0]))
