"""Atomic CSV output with a frozen numeric format."""
from __future__ import annotations

import csv
import hashlib
import os
from collections.abc import Iterable, Sequence
from pathlib import Path

from .paths import partial_path


def format_value(value) -> str:
    """Numbers as 9 significant digits in scientific notation; strings unchanged."""
    if isinstance(value, str):
        return value
    return f"{float(value):.8e}"


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write to ``<path>.partial`` and rename over *path* once complete."""
    path = Path(path)
    tmp = partial_path(path)
    try:
        with open(tmp, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"row has {len(row)} values for {len(header)} columns")
                writer.writerow([format_value(v) for v in row])
            f.flush()
            os.fsync(f.fileno())
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    os.replace(tmp, path)
    return path


def write_text_atomic(path: str | Path, text: str) -> Path:
    path = Path(path)
    tmp = partial_path(path)
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def surface_rows(surface) -> list[list]:
    """Long format: one row per (z, theta)."""
    s_db = surface.S_dB
    return [[surface.z[i], surface.theta[j], surface.S[i, j], s_db[i, j], surface.stderr[i, j]]
            for i in range(surface.z.size) for j in range(surface.theta.size)]


SURFACE_HEADER = ("z_m", "theta_rad", "S", "S_dB", "stderr")
PROPAGATION_HEADER = ("z_m", "area_rad", "energy")
DETUNING_HEADER = ("delta", "delta_tau", "log10_delta_plus_1", "S_opt", "S_opt_dB", "L_opt",
                   "theta_opt", "stderr")
PRESSURE_HEADER = ("isotope_mode", "temperature_K", "pressure_Pa", "S_opt", "S_opt_dB",
                   "L_opt", "theta_opt", "stderr")


def detuning_rows(rows) -> list[list]:
    return [[r.delta, r.delta_tau, r.log10_delta_plus_1, r.S_opt, r.S_opt_dB, r.L_opt,
             r.theta_opt, r.stderr] for r in rows]


def pressure_rows(rows) -> list[list]:
    return [[r.isotope_mode, r.temperature_K, r.pressure_Pa, r.S_opt, r.S_opt_dB, r.L_opt,
             r.theta_opt, r.stderr] for r in rows]


def propagation_rows(rows) -> list[list]:
    return [[r.z_m, r.area_rad, r.energy] for r in rows]
