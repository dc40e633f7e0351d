import pytest

from sit_squeeze.config import (
    EnsembleSettings,
    FiberSettings,
    GasSettings,
    GridSettings,
    OutputSettings,
    RunConfig,
    ScanSettings,
)

# 4 fs pulse centered in a 32-duration window, 52 steps per duration.
TINY_WINDOW = 32 * 4e-15
TINY_N_T = 1664

TINY_INI = f"""\
[gas]
temperature = 273.0
pressure = auto
isotope_mode = 202-only
lines = main

[fiber]
length = 0.005

[grid]
n_z = 2
n_t = {TINY_N_T}
window = {TINY_WINDOW!r}
n_freq_bins = 3
n_records = 3

[ensemble]
n_traj = 20
batch_count = 10
chunk_size = 2
master_seed = 7

[scan]
kind = phase
n_phase = 5
detunings = 0, 2

[output]
formats = csv
"""


def tiny_config(**sections) -> RunConfig:
    """A configuration that builds and runs in well under a second per trajectory."""
    cfg = RunConfig(
        gas=GasSettings(lines="main"),
        fiber=FiberSettings(length=0.005),
        grid=GridSettings(n_z=2, n_t=TINY_N_T, window=TINY_WINDOW, n_freq_bins=3,
                          n_records=3),
        ensemble=EnsembleSettings(n_traj=20, batch_count=10, chunk_size=2, master_seed=7),
        scan=ScanSettings(n_phase=5),
        output=OutputSettings(formats=("csv",)),
    )
    for name, changes in sections.items():
        cfg = cfg.with_section(name, **changes)
    return cfg


@pytest.fixture
def tiny():
    return tiny_config()


@pytest.fixture
def tiny_ini(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text(TINY_INI)
    return path
