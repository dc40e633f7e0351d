"""Output file names and directory resolution."""
from __future__ import annotations

from pathlib import Path

SURFACE_CSV = "squeezing_surface.csv"
PROPAGATION_CSV = "propagation.csv"
DETUNING_CSV = "detuning_scan.csv"
PRESSURE_CSV = "pressure_scan.csv"
MANIFEST = "manifest.txt"
PARTIAL_SUFFIX = ".partial"

# Plot kind -> (CSV it reads, SVG it writes by default).
PLOT_SOURCES: dict[str, tuple[str, str]] = {
    "phase": (SURFACE_CSV, "squeezing_phase.svg"),
    "length": (SURFACE_CSV, "squeezing_length.svg"),
    "heatmap": (SURFACE_CSV, "squeezing_heatmap.svg"),
    "detuning": (DETUNING_CSV, "detuning_scan.svg"),
    "pressure": (PRESSURE_CSV, "pressure_scan.svg"),
}


def output_dir(directory: str | Path) -> Path:
    """Resolve *directory* and create it; raises OSError when it is a file."""
    resolved = Path(directory).expanduser().resolve()
    if resolved.exists() and not resolved.is_dir():
        raise NotADirectoryError(f"output path '{resolved}' exists and is not a directory")
    resolved.mkdir(parents=True, exist_ok=True)
    return resolved


def partial_path(path: Path) -> Path:
    return path.with_name(path.name + PARTIAL_SUFFIX)
