import pytest
from typer.testing import CliRunner

import sit_squeeze.core.registry as registry
import sit_squeeze.simulation as simulation
from sit_squeeze.cli import app
from sit_squeeze.config import FULL_SCALE_TRAJECTORIES
from sit_squeeze.errors import ConfigError
from sit_squeeze.results.manifest import read_manifest
from sit_squeeze.results.paths import DETUNING_CSV, MANIFEST, PROPAGATION_CSV, SURFACE_CSV

runner = CliRunner()


def _run(config, out, *extra):
    return runner.invoke(app, ["run", "--config", str(config), "--out", str(out),
                               "--threads", "1", *extra])


def test_lines_lists_isotopes():
    result = runner.invoke(app, ["lines"])
    assert result.exit_code == 0
    assert "202Hg" in result.stdout
    assert "199Hg" in result.stdout


def test_phase_run_writes_outputs(tiny_ini, tmp_path):
    result = _run(tiny_ini, tmp_path / "out")
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    for name in (SURFACE_CSV, PROPAGATION_CSV, MANIFEST):
        assert (out / name).is_file()
    assert not list(out.glob("*.partial"))
    manifest = read_manifest(out / MANIFEST)
    assert manifest.run["scan"] == "phase"
    assert set(manifest.checksums) == {SURFACE_CSV, PROPAGATION_CSV}
    assert "S* =" in result.stdout


def test_rerun_is_byte_identical(tiny_ini, tmp_path):
    assert _run(tiny_ini, tmp_path / "a").exit_code == 0
    assert _run(tiny_ini, tmp_path / "b").exit_code == 0
    for name in (SURFACE_CSV, PROPAGATION_CSV):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_override_changes_result(tiny_ini, tmp_path):
    assert _run(tiny_ini, tmp_path / "a").exit_code == 0
    assert _run(tiny_ini, tmp_path / "b", "--seed", "99").exit_code == 0
    assert read_manifest(tmp_path / "b" / MANIFEST).config.ensemble.master_seed == 99
    assert ((tmp_path / "a" / SURFACE_CSV).read_bytes()
            != (tmp_path / "b" / SURFACE_CSV).read_bytes())


def test_detuning_scan(tiny_ini, tmp_path):
    result = _run(tiny_ini, tmp_path / "out", "--scan", "detuning")
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "out" / DETUNING_CSV).read_text().splitlines()
    assert lines[0].startswith("delta,delta_tau,log10_delta_plus_1")
    assert len(lines) == 3


def test_unknown_key_exits_1(tiny_ini, tmp_path):
    tiny_ini.write_text(tiny_ini.read_text() + "\n[pulse]\nchirp = 1\n")
    result = _run(tiny_ini, tmp_path / "out")
    assert result.exit_code == 1
    assert not (tmp_path / "out" / MANIFEST).exists()


def test_unknown_scan_kind_exits_1(tiny_ini, tmp_path):
    assert _run(tiny_ini, tmp_path / "out", "--scan", "spectrum").exit_code == 1


def test_missing_config_exits_1(tmp_path):
    assert _run(tmp_path / "absent.cfg", tmp_path / "out").exit_code == 1


@pytest.mark.parametrize("flag", ["--paper-scale", "--full-scale"])
def test_scale_flag_raises_trajectory_count(tiny_ini, tmp_path, monkeypatch, flag):
    seen = {}

    def capture(cfg, threads):
        seen["n_traj"] = cfg.ensemble.n_traj
        raise ConfigError("stop after capture")

    monkeypatch.setattr(registry, "get_runner", lambda kind: capture)
    result = _run(tiny_ini, tmp_path / "out", flag)
    assert result.exit_code == 1, result.output
    assert seen["n_traj"] == FULL_SCALE_TRAJECTORIES == 12000


def test_divergence_exits_2(tiny_ini, tmp_path, monkeypatch):
    monkeypatch.setattr(simulation, "FIELD_DIVERGENCE_FACTOR", 1e-3)
    result = _run(tiny_ini, tmp_path / "out")
    assert result.exit_code == 2
    assert not (tmp_path / "out" / MANIFEST).exists()


def test_output_path_is_a_file_exits_3(tiny_ini, tmp_path):
    blocker = tmp_path / "taken"
    blocker.write_text("x")
    assert _run(tiny_ini, blocker).exit_code == 3


def test_plot_missing_csv_exits_4(tmp_path):
    result = runner.invoke(app, ["plot", "--csv", str(tmp_path / "none.csv"), "--kind", "phase",
                                 "--out", str(tmp_path / "x.svg")])
    assert result.exit_code == 4


def test_plot_missing_column_exits_4(tmp_path):
    csv = tmp_path / "bad.csv"
    csv.write_text("z_m,S\n0,1\n")
    result = runner.invoke(app, ["plot", "--csv", str(csv), "--kind", "phase",
                                 "--out", str(tmp_path / "x.svg")])
    assert result.exit_code == 4
