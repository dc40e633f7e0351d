"""Physical constants (CODATA via scipy) and mercury reference values."""
from __future__ import annotations

from scipy import constants as _codata

K_B: float = _codata.k
HBAR: float = _codata.hbar
C: float = _codata.c
AMU: float = _codata.physical_constants["atomic mass constant"][0]

# 6^3D_3 -> 6^3P_2 line used as the pulse carrier.
CARRIER_WAVELENGTH: float = 365.5e-9

# Two-point fit of mercury vapor pressure (T in K, P in Pa).
VAPOR_PRESSURE_POINTS: tuple[tuple[float, float], tuple[float, float]] = (
    (273.0, 0.272),
    (293.0, 0.889),
)
VAPOR_PRESSURE_RANGE: tuple[float, float] = (250.0, 320.0)


def carrier_frequency(wavelength: float = CARRIER_WAVELENGTH) -> float:
    """Angular frequency (rad/s) of light at *wavelength* (m)."""
    return 2.0 * _codata.pi * C / wavelength
