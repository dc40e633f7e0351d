"""SVG figures from result CSVs: phase, length, heat map, detuning and pressure scans."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import PlotInputError
from .paths import PLOT_SOURCES
from .reader import read_table
from .writer import DETUNING_HEADER, PRESSURE_HEADER, SURFACE_HEADER

PLOT_KINDS = tuple(PLOT_SOURCES)


def _db(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(values > 0, 10.0 * np.log10(np.where(values > 0, values, 1.0)), np.nan)


def _band(ax, x, s, err, **kwargs) -> None:
    """Line in dB with a shaded S +/- stderr band."""
    ax.plot(x, _db(s), **kwargs)
    ax.fill_between(x, _db(s - err), _db(s + err), alpha=0.25, linewidth=0,
                    color=kwargs.get("color"))


def _surface(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    t = read_table(path, SURFACE_HEADER)
    z, theta = np.unique(t["z_m"]), np.unique(t["theta_rad"])
    if z.size * theta.size != t["z_m"].size:
        raise PlotInputError(f"{path}: rows do not form a complete (z, theta) grid")
    order = np.lexsort((t["theta_rad"], t["z_m"]))
    shape = (z.size, theta.size)
    return z, theta, t["S"][order].reshape(shape), t["stderr"][order].reshape(shape)


def _phase(ax, path: Path) -> None:
    z, theta, s, err = _surface(path)
    idx = np.argmin(s, axis=0)
    cols = np.arange(theta.size)
    _band(ax, theta, s[idx, cols], err[idx, cols], color="C0")
    ax.set_xlabel("local oscillator phase θ (rad)")
    ax.set_ylabel("optimum squeezing over length (dB)")


def _length(ax, path: Path) -> None:
    z, theta, s, err = _surface(path)
    j = np.unravel_index(np.argmin(s), s.shape)[1]
    _band(ax, 1e3 * z, s[:, j], err[:, j], color="C0", label=f"θ = {theta[j]:+.3f} rad")
    ax.set_xlabel("propagation length z (mm)")
    ax.set_ylabel("squeezing (dB)")
    ax.legend(frameon=False)


def _heatmap(fig, ax, path: Path) -> None:
    z, theta, s, _ = _surface(path)
    mesh = ax.pcolormesh(1e3 * z, theta, _db(s).T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="squeezing (dB)")
    ax.plot(1e3 * z, theta[np.argmin(s, axis=1)], color="w", linewidth=1.0)
    ax.set_xlabel("propagation length z (mm)")
    ax.set_ylabel("local oscillator phase θ (rad)")


def _detuning(fig, ax, path: Path) -> None:
    t = read_table(path, DETUNING_HEADER)
    x = t["log10_delta_plus_1"]
    order = np.argsort(x)
    _band(ax, x[order], t["S_opt"][order], t["stderr"][order], color="C0", marker="o")
    ax.set_xlabel("log10(δ τp + 1)")
    ax.set_ylabel("optimum squeezing (dB)")
    twin = ax.twinx()
    twin.plot(x[order], 1e3 * t["L_opt"][order], color="C1", marker="s", linestyle="--")
    twin.set_ylabel("detection length (mm)", color="C1")


def _pressure(fig, ax, path: Path) -> None:
    t = read_table(path, PRESSURE_HEADER, text_columns=("isotope_mode",))
    twin = ax.twinx()
    for k, mode in enumerate(sorted(set(t["isotope_mode"]))):
        rows = t["isotope_mode"] == mode
        order = np.argsort(t["pressure_Pa"][rows])
        p = t["pressure_Pa"][rows][order]
        _band(ax, p, t["S_opt"][rows][order], t["stderr"][rows][order], color=f"C{k}",
              marker="o", label=mode)
        twin.plot(p, 1e3 * t["L_opt"][rows][order], color=f"C{k}", marker="s", linestyle="--")
    ax.set_xlabel("pressure (Pa)")
    ax.set_ylabel("optimum squeezing (dB)")
    twin.set_ylabel("detection length (mm, dashed)")
    ax.legend(frameon=False)


def render_plot(csv_path: str | Path, kind: str, out: str | Path) -> Path:
    """Render *kind* from *csv_path* into a self-contained SVG at *out*."""
    if kind not in PLOT_KINDS:
        raise PlotInputError(f"unknown plot kind '{kind}'; known: {list(PLOT_KINDS)}")
    import matplotlib
    from matplotlib.figure import Figure

    csv_path, out = Path(csv_path), Path(out)
    fig = Figure(figsize=(6.4, 4.2), layout="constrained")
    ax = fig.add_subplot()
    if kind == "phase":
        _phase(ax, csv_path)
    elif kind == "length":
        _length(ax, csv_path)
    elif kind == "heatmap":
        _heatmap(fig, ax, csv_path)
    elif kind == "detuning":
        _detuning(fig, ax, csv_path)
    else:
        _pressure(fig, ax, csv_path)
    if kind != "heatmap":
        ax.axhline(0.0, color="0.5", linewidth=0.8)
    out.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": "sit-squeeze"}):
        fig.savefig(out, format="svg", metadata={"Date": None})
    return out
