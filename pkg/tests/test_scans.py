import math

import numpy as np
import pytest
from conftest import tiny_config

from sit_squeeze.measurement.scans import (
    DetuningRow,
    phase_grid,
    point_configs,
    pressure_points,
    run_phase,
    scan_detuning,
    scan_pressure,
)
from sit_squeeze.physics.atomic_data import ISOTOPE_MODES


def test_phase_grid_spans_half_turn(tiny):
    grid = phase_grid(tiny.scan)
    assert grid.size == 5
    assert grid[0] == pytest.approx(-math.pi / 2)
    assert grid[-1] == pytest.approx(math.pi / 2)


def test_pressure_points_default_to_vapor_pressure():
    (t, p), = pressure_points([303.0])
    assert t == 303.0
    assert p == pytest.approx(1.516, rel=0.01)
    assert pressure_points([273.0, 293.0], [0.1, 0.2]) == [(273.0, 0.1), (293.0, 0.2)]


def test_pressure_points_must_pair_up():
    with pytest.raises(ValueError):
        pressure_points([273.0, 293.0], [0.1])


def test_point_configs_per_kind(tiny):
    assert point_configs(tiny) == [tiny]
    detuning = tiny.with_section("scan", kind="detuning", detunings=(0.0, 2.0))
    configs = point_configs(detuning)
    assert [c.pulse.detuning for c in configs] == [0.0, pytest.approx(2.0 / 4e-15)]
    pressure = tiny.with_section("scan", kind="pressure", temperatures=(273.0, 293.0))
    configs = point_configs(pressure)
    assert len(configs) == len(ISOTOPE_MODES) * 2
    assert {c.gas.isotope_mode for c in configs} == set(ISOTOPE_MODES)


def test_detuning_row_log_axis():
    row = DetuningRow(delta=0.0, delta_tau=9.0, S_opt=0.9, S_opt_dB=-0.46, L_opt=0.01,
                      theta_opt=-0.1, stderr=0.01)
    assert row.log10_delta_plus_1 == pytest.approx(1.0)


def test_run_phase_on_tiny_config(tiny):
    result = run_phase(tiny, n_traj=4)
    assert result.surface.S.shape == (3, 5)
    assert [row.z_m for row in result.propagation] == pytest.approx([0.0, 0.0025, 0.005])
    assert result.propagation[0].area_rad == pytest.approx(2 * math.pi, rel=1e-3)
    assert result.trajectories.n_requested == 4


def test_detuning_scan_rows(tiny):
    rows = scan_detuning(tiny, [0.0, 2.0, 20.0])
    assert [r.delta_tau for r in rows] == [0.0, 2.0, 20.0]
    assert rows[1].delta == pytest.approx(2.0 / 4e-15)
    assert all(np.isfinite(r.S_opt) for r in rows)
    # zero detuning reproduces the phase/length optimum drawn from the same seeds
    best = run_phase(tiny).surface.find_optimum()
    assert rows[0].S_opt == best.S
    assert rows[0].L_opt == best.z
    assert rows[0].theta_opt == best.theta
    # far off resonance the medium is transparent and the pulse stays coherent
    far = rows[2]
    assert np.isfinite(far.stderr)
    assert abs(far.S_opt - 1.0) < 0.02 + 3 * far.stderr


def test_detuning_scan_rejects_negative(tiny):
    with pytest.raises(ValueError):
        scan_detuning(tiny, [-1.0], n_traj=2)


def test_pressure_scan_rows():
    cfg = tiny_config()
    rows = scan_pressure(cfg, [(273.0, 0.272)], ["202-only"], n_traj=2)
    assert len(rows) == 1
    assert rows[0].isotope_mode == "202-only"
    assert rows[0].pressure_Pa == 0.272
