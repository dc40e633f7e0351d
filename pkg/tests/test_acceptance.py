"""Monte Carlo acceptance runs on a desk-scale grid; deselected unless ``-m slow``."""
import numpy as np
import pytest
from conftest import tiny_config

from sit_squeeze.ensemble import run_ensemble
from sit_squeeze.measurement.scans import phase_grid, run_phase, scan_pressure
from sit_squeeze.measurement.surface import SqueezingSurface
from sit_squeeze.simulation import Simulation, propagate_trajectory

pytestmark = pytest.mark.slow

N_TRAJ = 4000


def _desk(**sections):
    base = {
        "gas": {"temperature": 273.0, "pressure": None, "lines": "main"},
        "fiber": {"length": 0.05},
        "grid": {"n_z": 100, "n_t": 2048, "window": None, "n_freq_bins": 21,
                 "n_records": 26},
        "ensemble": {"n_traj": N_TRAJ, "batch_count": 10, "chunk_size": 16},
        "scan": {"n_phase": 61},
    }
    for name, changes in sections.items():
        base[name] = {**base.get(name, {}), **changes}
    return tiny_config(**base)


def test_empty_fiber_sits_at_shot_noise():
    cfg = _desk(gas={"pressure": 0.0})
    sim = Simulation.from_config(cfg)
    ts = run_ensemble(sim, N_TRAJ, threads=None)
    surface = SqueezingSurface.from_trajectories(ts, phase_grid(cfg.scan))
    deviation = np.abs(surface.S - 1.0)
    assert np.all(deviation <= 3 * surface.stderr + 1e-9)


def test_ensemble_mean_follows_noiseless_run():
    cfg = _desk()
    sim = Simulation.from_config(cfg)
    ts = run_ensemble(sim, N_TRAJ, threads=None, keep_fields=True)
    clean = propagate_trajectory(Simulation.from_config(
        cfg.with_section("ensemble", noise=False)), 0).fields[0]
    means = ts.batch_mean_fields()
    assert means.shape == (ts.batch_count,) + clean.shape
    stderr = means.std(axis=0, ddof=1) / np.sqrt(ts.batch_count)
    # RMS over tau at each recorded z
    error = np.sqrt(np.mean(np.abs(ts.mean_field() - clean) ** 2, axis=-1))
    spread = np.sqrt(np.mean(stderr ** 2, axis=-1))
    floor = 1e-6 * np.abs(clean).max(axis=-1)
    assert np.all(error <= 3 * spread + floor)


def test_squeezing_appears_at_small_negative_phase():
    result = run_phase(_desk(), threads=None)
    opt = result.surface.find_optimum()
    assert opt.S < 1.0 - 3 * opt.stderr
    assert -0.26 <= opt.theta <= -0.06


def test_all_isotopes_squeeze_no_better():
    single = run_phase(_desk(), threads=None).surface.find_optimum()
    mixed = run_phase(_desk(gas={"isotope_mode": "all"}), threads=None).surface.find_optimum()
    combined = np.hypot(single.stderr, mixed.stderr)
    assert mixed.S >= single.S - combined


def test_denser_vapor_squeezes_less_over_shorter_length():
    rows = scan_pressure(_desk(), modes=["202-only"], threads=None,
                         points=[(273.0, 0.272), (293.0, 0.889), (303.0, 1.516)])
    s_opt = [r.S_opt for r in rows]
    l_opt = [r.L_opt for r in rows]
    tolerance = [2 * r.stderr for r in rows]
    assert all(b >= a - t for a, b, t in zip(s_opt, s_opt[1:], tolerance))
    assert all(b <= a for a, b in zip(l_opt, l_opt[1:]))
