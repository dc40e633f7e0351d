import pytest
from conftest import tiny_config

from sit_squeeze.errors import CalibrationError
from sit_squeeze.physics.calibration import coupling_from_absorption, measure_absorption
from sit_squeeze.simulation import Simulation


@pytest.fixture
def sim():
    return Simulation.from_config(tiny_config(grid={"n_z": 20}, ensemble={"noise": False}))


def test_weak_pulse_is_absorbed(sim):
    assert measure_absorption(sim) > 0


def test_absorption_grows_with_density(sim):
    base = measure_absorption(sim)
    assert measure_absorption(sim.with_density_scale(2.0)) == pytest.approx(2 * base, rel=0.05)


def test_calibration_hits_target(sim):
    target = 0.5 * measure_absorption(sim)
    calibrated = sim.with_couplings(coupling_from_absorption(target, sim))
    assert measure_absorption(calibrated) == pytest.approx(target, rel=0.01)
    ratio = calibrated.couplings.field_coupling / sim.couplings.field_coupling
    assert 0.3 < ratio < 0.7


def test_calibrate_from_config():
    cfg = tiny_config(grid={"n_z": 20}, atoms={"absorption_per_m": 5.0})
    sim = Simulation.from_config(cfg)
    assert measure_absorption(sim) == pytest.approx(5.0, rel=0.01)
    uncalibrated = Simulation.from_config(cfg, calibrate=False)
    assert uncalibrated.couplings.field_coupling != sim.couplings.field_coupling


def test_transparent_medium_cannot_be_calibrated(sim):
    dark = sim.with_couplings(sim.couplings.scaled(0.0))
    with pytest.raises(CalibrationError) as info:
        coupling_from_absorption(10.0, dark)
    assert "alpha_target" in info.value.diagnostics


@pytest.mark.parametrize("kwargs", [{"weak_area": 0.0}, {"steps": 0}])
def test_weak_pulse_arguments_validated(sim, kwargs):
    with pytest.raises(ValueError):
        measure_absorption(sim, **kwargs)


def test_target_must_be_positive(sim):
    with pytest.raises(ValueError):
        coupling_from_absorption(0.0, sim)
