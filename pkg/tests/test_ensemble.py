import logging

import numpy as np
import pytest
from conftest import tiny_config

import sit_squeeze.ensemble as ensemble
import sit_squeeze.simulation as simulation
from sit_squeeze.ensemble import THREADS_ENV, batch_of, resolve_threads, run_ensemble
from sit_squeeze.errors import DivergenceError
from sit_squeeze.measurement.homodyne import squeezing_ratio
from sit_squeeze.simulation import Simulation


def test_noiseless_trajectories_are_identical():
    sim = Simulation.from_config(tiny_config(ensemble={"noise": False}))
    traj = run_ensemble(sim, 2)
    np.testing.assert_array_equal(traj.overlap[0], traj.overlap[1])
    assert traj.n_used == 2
    assert traj.discard_fraction == 0.0


def test_worker_count_does_not_change_results(tiny):
    sim = Simulation.from_config(tiny)
    serial = run_ensemble(sim, 4, threads=1)
    pooled = run_ensemble(sim, 4, threads=2)
    np.testing.assert_array_equal(serial.overlap, pooled.overlap)
    np.testing.assert_array_equal(serial.overlap_dag, pooled.overlap_dag)
    np.testing.assert_array_equal(serial.batch_ids, pooled.batch_ids)


def test_mean_field_starts_at_input():
    sim = Simulation.from_config(tiny_config(ensemble={"noise": False}))
    traj = run_ensemble(sim, 3, keep_fields=True)
    np.testing.assert_allclose(traj.mean_field()[0], sim.input_field.omega)
    assert traj.batch_mean_fields().shape == (3, 3, sim.grid.n_t)


def test_mean_field_needs_kept_fields(tiny):
    traj = run_ensemble(Simulation.from_config(tiny), 2)
    with pytest.raises(ValueError):
        traj.mean_field()


def test_empty_fiber_gives_shot_noise():
    sim = Simulation.from_config(tiny_config(gas={"pressure": 0.0}))
    traj = run_ensemble(sim, 4)
    m = traj.quadrature([0.0, 1.0])
    s = squeezing_ratio(m, traj.field_coupling, traj.group_velocity)
    np.testing.assert_allclose(s, 1.0, atol=1e-4)


def test_all_diverged_raises(tiny, monkeypatch):
    monkeypatch.setattr(simulation, "FIELD_DIVERGENCE_FACTOR", 1e-3)
    with pytest.raises(DivergenceError) as info:
        run_ensemble(Simulation.from_config(tiny), 4, threads=1)
    assert info.value.requested == 4
    assert info.value.discarded == 4
    assert info.value.fraction == 1.0


def _mark_diverged(monkeypatch, bad):
    original = ensemble.propagate_batch

    def propagate(sim, indices, *, keep_fields=False):
        rec = original(sim, indices, keep_fields=keep_fields)
        rec.diverged = rec.diverged | np.isin(rec.indices, bad)
        return rec

    monkeypatch.setattr(ensemble, "propagate_batch", propagate)


def test_partial_divergence_warns_and_drops(tiny, monkeypatch, caplog):
    _mark_diverged(monkeypatch, [3])
    with caplog.at_level(logging.WARNING, logger="sit_squeeze.ensemble"):
        traj = run_ensemble(Simulation.from_config(tiny), 10, threads=1, keep_fields=True)
    assert traj.n_discarded == 1
    assert traj.n_used == 9
    assert 3 not in traj.batch_ids.tolist()
    assert traj.batch_sizes[3] == 0
    assert traj.warnings == ["10.0% of trajectories diverged and were discarded"]
    assert "10.0% of trajectories diverged" in caplog.text


def test_small_discard_fraction_is_silent(tiny, monkeypatch, caplog):
    _mark_diverged(monkeypatch, [0])
    with caplog.at_level(logging.WARNING, logger="sit_squeeze.ensemble"):
        traj = run_ensemble(Simulation.from_config(tiny), 24, threads=1)
    assert traj.n_discarded == 1
    assert traj.warnings == []
    assert "diverged" not in caplog.text


def test_needs_two_trajectories(tiny):
    with pytest.raises(ValueError):
        run_ensemble(Simulation.from_config(tiny), 1)


def test_batch_assignment():
    assert batch_of(np.arange(10), 10, 3).tolist() == [0, 0, 0, 0, 1, 1, 1, 2, 2, 2]


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_threads(None) == 3
    assert resolve_threads(2) == 2
    with pytest.raises(ValueError):
        resolve_threads(0)
