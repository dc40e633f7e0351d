"""sit-squeeze command-line interface."""
from __future__ import annotations

import logging
import time
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .config import SCAN_KINDS, RunConfig, parse_config
from .errors import ConfigError, DivergenceError, PlotInputError, SitSqueezeError
from .physics.limitations import SHORT_DISCLAIMER

app = typer.Typer(add_completion=False,
                  help="Positive-P simulation of squeezed SIT pulses in mercury vapor.")
console = Console()
err_console = Console(stderr=True)
log = logging.getLogger("sit_squeeze")

IO_EXIT_CODE = 3


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(message)s",
                        datefmt="[%X]", force=True,
                        handlers=[RichHandler(console=err_console, show_path=False)])


def _fail(exc: BaseException) -> typer.Exit:
    if isinstance(exc, DivergenceError):
        report = exc.report()
        err_console.print(f"[red]Divergence:[/red] {exc} "
                          f"({report['discarded']}/{report['requested']} discarded)")
        return typer.Exit(exc.exit_code)
    if isinstance(exc, SitSqueezeError):
        label = "Config error" if isinstance(exc, ConfigError) else "Error"
        err_console.print(f"[red]{label}:[/red] {exc}")
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            for key, value in diagnostics.items():
                err_console.print(f"  {key} = {value}")
        return typer.Exit(exc.exit_code)
    err_console.print(f"[red]I/O error:[/red] {exc}")
    return typer.Exit(IO_EXIT_CODE)


def _prepare(config: Path, scan: str | None, seed: int | None, full_scale: bool,
             out: Path | None) -> RunConfig:
    cfg = parse_config(config)
    if scan is not None:
        if scan not in SCAN_KINDS:
            raise ConfigError(f"unknown scan kind '{scan}'; known: {list(SCAN_KINDS)}")
        cfg = cfg.with_section("scan", kind=scan)
    if seed is not None:
        cfg = cfg.with_section("ensemble", master_seed=seed)
    if full_scale:
        cfg = cfg.full_scale()
    if out is not None:
        cfg = cfg.with_section("output", directory=str(out))
    return cfg


def _validate(cfg: RunConfig):
    """Build every point's model once so a bad scan fails before any output exists."""
    from .measurement.scans import point_configs
    from .simulation import Simulation

    try:
        points = point_configs(cfg)
    except ValueError as exc:
        raise cfg.locate(ConfigError(str(exc), key="temperatures")) from None
    sims = [Simulation.from_config(p, calibrate=False) for p in points]
    return sims[0]


def _write_outputs(cfg: RunConfig, kind: str, result,
                   directory: Path) -> tuple[list[Path], dict]:
    from .results import writer
    from .results.paths import (
        DETUNING_CSV,
        PLOT_SOURCES,
        PRESSURE_CSV,
        PROPAGATION_CSV,
        SURFACE_CSV,
    )
    from .results.plots import render_plot

    outputs: list[Path] = []
    if kind == "phase":
        surface = result.surface
        outputs.append(writer.write_csv(directory / SURFACE_CSV, writer.SURFACE_HEADER,
                                        writer.surface_rows(surface)))
        outputs.append(writer.write_csv(directory / PROPAGATION_CSV, writer.PROPAGATION_HEADER,
                                        writer.propagation_rows(result.propagation)))
        stats = {**surface.to_dict(), **result.trajectories.report()}
        plots = ("phase", "length", "heatmap")
    elif kind == "detuning":
        outputs.append(writer.write_csv(directory / DETUNING_CSV, writer.DETUNING_HEADER,
                                        writer.detuning_rows(result)))
        stats = {"points": len(result), "discarded": sum(r.n_discarded for r in result)}
        plots = ("detuning",)
    else:
        outputs.append(writer.write_csv(directory / PRESSURE_CSV, writer.PRESSURE_HEADER,
                                        writer.pressure_rows(result)))
        stats = {"points": len(result), "discarded": sum(r.n_discarded for r in result)}
        plots = ("pressure",)
    if "svg" in cfg.output.formats:
        for plot_kind in plots:
            source, svg = PLOT_SOURCES[plot_kind]
            outputs.append(render_plot(directory / source, plot_kind, directory / svg))
    return outputs, stats


@app.command()
def run(
    config: Path = typer.Option(..., "--config", help="Run configuration (INI)."),
    scan: str = typer.Option(None, help="phase | detuning | pressure (default: scan.kind)."),
    threads: int = typer.Option(None, envvar="SIT_SQUEEZE_THREADS",
                                help="Worker processes (default: CPU count)."),
    seed: int = typer.Option(None, help="Override ensemble.master_seed."),
    full_scale: bool = typer.Option(False, "--paper-scale", "--full-scale",
                                    help="Raise n_traj to the full-scale 12000."),
    out: Path = typer.Option(None, help="Output directory (default: output.directory)."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging."),
) -> None:
    """Run a scan and write CSVs, SVGs and manifest.txt."""
    _configure_logging(verbose)
    from .core.registry import get_runner
    from .ensemble import resolve_threads
    from .results.manifest import write_manifest
    from .results.paths import output_dir

    try:
        cfg = _prepare(config, scan, seed, full_scale, out)
        base = _validate(cfg)
        workers = resolve_threads(threads)
        directory = output_dir(cfg.output.directory)
        kind = cfg.scan.kind
        started = time.perf_counter()
        result = get_runner(kind)(cfg, threads=workers)
        wall = time.perf_counter() - started
        outputs, stats = _write_outputs(cfg, kind, result, directory)
        model = result.simulation.describe() if kind == "phase" else base.describe()
        manifest = write_manifest(
            directory, cfg, outputs=outputs, model=model,
            run={"scan": kind, "master_seed": cfg.ensemble.master_seed,
                 "n_traj": cfg.ensemble.n_traj, "threads": workers,
                 "wall_time_s": round(wall, 3), **stats})
    except (SitSqueezeError, OSError) as exc:
        raise _fail(exc) from None

    if kind == "phase":
        console.print(result.surface.summary())
        for note in result.trajectories.warnings:
            console.print(f"[yellow]{note}[/yellow]")
    console.print(f"[green]Wrote[/green] {len(outputs)} files and {manifest}")
    console.print(f"[dim]{SHORT_DISCLAIMER}[/dim]")


@app.command()
def plot(
    csv: Path = typer.Option(..., "--csv", help="Result CSV written by `run`."),
    kind: str = typer.Option(..., help="phase | length | heatmap | detuning | pressure"),
    out: Path = typer.Option(..., help="SVG to write."),
) -> None:
    """Render a figure from a result CSV."""
    from .results.plots import render_plot

    try:
        path = render_plot(csv, kind, out)
    except (SitSqueezeError, OSError) as exc:
        if isinstance(exc, FileNotFoundError):
            err_console.print(f"[red]Plot input:[/red] {exc}")
            raise typer.Exit(PlotInputError.exit_code) from None
        raise _fail(exc) from None
    console.print(f"[green]Saved[/green] {path}")


@app.command()
def lines(
    data_file: Path = typer.Option(None, help="Transition table (default: bundled)."),
) -> None:
    """List isotopes and transitions of the mercury data table."""
    import math

    from .physics.atomic_data import mercury_isotope_table

    try:
        table = mercury_isotope_table(data_file)
    except (SitSqueezeError, OSError) as exc:
        raise _fail(exc) from None
    out = Table(title="Mercury isotopes and transitions")
    for column in ("isotope", "abundance", "I", "transition", "offset (GHz)",
                   "γ0/2π (MHz)", "strength"):
        out.add_column(column)
    for iso in table:
        for k, t in enumerate(iso.transitions):
            out.add_row(f"{iso.mass_number}Hg" if k == 0 else "",
                        f"{iso.abundance:.4f}" if k == 0 else "",
                        f"{iso.nuclear_spin:g}" if k == 0 else "", t.label,
                        f"{t.center_frequency_offset / (2e9 * math.pi):+.3f}",
                        f"{t.gamma0 / (2e6 * math.pi):.3f}", f"{t.relative_strength:.4f}")
    console.print(out)


if __name__ == "__main__":
    app()
