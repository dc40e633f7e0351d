"""Fix the coupling scale from a target small-signal absorption coefficient."""
from __future__ import annotations

import logging
import math
from dataclasses import replace
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from ..errors import CalibrationError
from .field import init_weak_pulse
from .sde import CouplingSpec

if TYPE_CHECKING:
    from ..simulation import Simulation

log = logging.getLogger(__name__)

DEFAULT_WEAK_AREA = 0.1
DEFAULT_WEAK_STEPS = 4
# brentq refines the linear-response scale within this factor either side.
_BRACKET = 1.1


def _weak_pulse_ratio(sim: Simulation, weak_area: float, steps: int) -> complex:
    """Complex ratio of output to input area for a noiseless resonant weak pulse."""
    from ..simulation import propagate_batch

    weak = replace(sim.pulse, detuning=0.0, initial_phase=0.0)
    grid = replace(sim.grid, n_z=steps, record_indices=(0, steps))
    weak_sim = replace(sim.with_input(weak, init_weak_pulse(weak, sim.grid, weak_area)),
                       grid=grid, noise=False)
    rec = propagate_batch(weak_sim, [0], keep_fields=True)
    area_in = trapezoid(rec.fields[0, 0], dx=grid.dtau)
    area_out = trapezoid(rec.fields[0, 1], dx=grid.dtau)
    ratio = complex(area_out / area_in)
    if rec.diverged[0] or not np.isfinite(ratio):
        raise CalibrationError("weak pulse did not survive the absorption measurement",
                               diagnostics={"area_in": abs(area_in), "area_out": abs(area_out)})
    return ratio


def measure_absorption(sim: Simulation, *, weak_area: float = DEFAULT_WEAK_AREA,
                       steps: int = DEFAULT_WEAK_STEPS) -> float:
    """Intensity absorption coefficient (1/m) seen by a weak resonant pulse.

    A noiseless on-resonance weak pulse of the configured shape is sent through
    *steps* cells of the configured dz. In the weak-pulse limit its signed area
    decays as exp(-alpha z / 2), so alpha = -2 ln(area_out / area_in) / z.
    """
    if weak_area <= 0:
        raise ValueError(f"weak_area must be positive, got {weak_area}")
    if steps < 1:
        raise ValueError(f"steps must be at least 1, got {steps}")
    ratio = _weak_pulse_ratio(sim, weak_area, steps)
    if not ratio.real > 0:
        raise CalibrationError("weak pulse area changed sign within the measurement; the z step "
                               "is too coarse for this absorption",
                               diagnostics={"area_ratio": ratio, "dz": sim.grid.dz})
    return -2.0 * math.log(abs(ratio)) / (steps * sim.grid.dz)


def coupling_from_absorption(alpha_target: float, sim: Simulation, *,
                             weak_area: float = DEFAULT_WEAK_AREA,
                             steps: int = DEFAULT_WEAK_STEPS,
                             rtol: float = 1e-6) -> CouplingSpec:
    """Scale every coupling so the measured small-signal absorption equals *alpha_target*.

    The first cell's atoms see only the input pulse, so the area change across
    one cell is exactly linear in the coupling scale; that fixes the scale up to
    the weak pulse's small nonlinearity, which brentq then removes.
    Raises CalibrationError when the medium does not absorb or the root search fails.
    """
    if not alpha_target > 0:
        raise ValueError(f"target absorption must be positive, got {alpha_target}")
    dz = sim.grid.dz
    gain = (_weak_pulse_ratio(sim, weak_area, 1) - 1.0).real / dz
    diagnostics: dict = {"alpha_target": alpha_target, "area_gain_per_m": gain}
    if not gain < 0:
        raise CalibrationError("medium shows no small-signal absorption; cannot calibrate",
                               diagnostics=diagnostics)
    guess = math.expm1(-0.5 * alpha_target * dz) / (dz * gain)

    def residual(scale: float) -> float:
        trial = sim.with_couplings(sim.couplings.scaled(scale))
        return measure_absorption(trial, weak_area=weak_area, steps=steps) - alpha_target

    lo, hi = guess / _BRACKET, guess * _BRACKET
    f_lo, f_hi = residual(lo), residual(hi)
    diagnostics.update(scale_low=lo, scale_high=hi, residual_low=f_lo, residual_high=f_hi)
    log.debug("calibration bracket [%.6g, %.6g] residuals %.3g, %.3g", lo, hi, f_lo, f_hi)
    if f_lo * f_hi > 0:
        raise CalibrationError("absorption target is not bracketed by the coupling search",
                               diagnostics=diagnostics)
    try:
        scale = brentq(residual, lo, hi, rtol=rtol, maxiter=60)
    except (RuntimeError, ValueError) as exc:
        raise CalibrationError(f"coupling search did not converge: {exc}",
                               diagnostics=diagnostics) from exc
    log.info("calibrated coupling scale %.6g for alpha = %.4g /m", scale, alpha_target)
    return sim.couplings.scaled(scale)
