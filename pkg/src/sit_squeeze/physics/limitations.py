"""What the model covers and where it stops.

Every run manifest and the CLI footer take their scope text from here, so the
approximations behind a squeezing number are stated the same way everywhere.
"""
from __future__ import annotations

from .lineshape import DEFAULT_LORENTZ_COEFFICIENT
from .rates import DEFAULT_GAMMA_P_FACTOR
from .sde import MIDPOINT_ITERATIONS

# Descriptive mirror of the numerical defaults, not a second configuration source.
MODEL_SCOPE: dict[str, object] = {
    "representation": "positive-P phase space, doubled field and atomic variables",
    "propagation": "unidirectional, retarded time, one transverse mode, fresh atoms per z cell",
    "integrator": f"Stratonovich midpoint, {MIDPOINT_ITERATIONS} fixed-point iterations",
    "lineshape": f"pseudo-Voigt bins, Lorentz coefficient {DEFAULT_LORENTZ_COEFFICIENT}",
    "dephasing": f"gamma_p = {DEFAULT_GAMMA_P_FACTOR:g} x gamma0 unless configured",
    "measurement": "balanced homodyne against the input pulse shape over the full window",
    "statistics": "batch means over contiguous trajectory blocks",
}

# Ordered most-important first.
LIMITATIONS: list[str] = [
    "Trajectories that escape (|R| > 1e3 or |Omega| > 1e6 x peak) are discarded and "
    "counted; a large discard fraction means the positive-P boundary terms are not "
    "negligible and the squeezing estimate is biased.",
    "Every transition is an independent two-level system driven by the same field; "
    "hyperfine and side lines share no levels, so optical pumping between them is absent.",
    "Fermion hyperfine offsets and strengths in the bundled table are estimates; the "
    "all-isotope results inherit their uncertainty.",
    "Collisional (pressure) broadening, gas dispersion and waveguide dispersion are "
    "neglected; pressure enters only through the atom density.",
    "Frequency bins holding fewer than the configured number of atoms per cell are "
    "dropped, which trims the far Doppler wings at low density.",
    "The local oscillator is fixed to the input pulse shape; no multimode or optimized "
    "LO is searched.",
    "The pseudo-Voigt discretization integrates Lorentzian tails only out to the bin "
    "span, so Lorentz-dominated lines lose part of their wing weight.",
]

SHORT_DISCLAIMER: str = (
    "Single-mode positive-P model with independent two-level lines and discard-on-"
    "divergence statistics; check the discard fraction and stderr before trusting S."
)


def model_limitations() -> dict:
    """Structured description of the model's scope and limits."""
    return {
        "scope": MODEL_SCOPE,
        "limitations": LIMITATIONS,
        "disclaimer": SHORT_DISCLAIMER,
    }
