"""SVG plot emission for ACFs and wavelet spectra.

Figures are built directly on matplotlib Figure objects (no pyplot
state). Key artists carry stable SVG ids so documents can be checked
geometrically: "two-sigma-upper"/"two-sigma-lower" dashed bound lines,
"peak-marker" for the ACF band maximum, "sig-contour" for the 95%
wavelet contour, "coi-hatch" for the cone of influence, and
"period-ref-<p>" reference lines on the period axis.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .acfspec import AcfResult, global_max_lag
from .waveletspec import GlobalSpectrum, WaveletSpectrum


def _new_figure(width: float, height: float) -> Figure:
    fig = Figure(figsize=(width, height), layout="constrained")
    FigureCanvasAgg(fig)
    return fig


def plot_acf(
    result: AcfResult,
    path: str | Path,
    band: tuple[int, int] = (2, 40),
    title: str = "",
) -> Path:
    """Stem-style ACF plot with dashed 2-sigma bounds and the band maximum marked."""
    fig = _new_figure(7.0, 4.0)
    ax = fig.add_subplot(111)
    lags = result.lags
    ax.vlines(lags[1:], 0.0, result.c[1:], color="0.3", linewidth=1.0)
    ax.plot(lags[1:], result.c[1:], "o", color="0.3", markersize=2.5)

    two = 2.0 * result.sigma_bound
    upper = ax.axhline(two, linestyle="--", color="tab:red", linewidth=1.0)
    upper.set_gid("two-sigma-upper")
    lower = ax.axhline(-two, linestyle="--", color="tab:red", linewidth=1.0)
    lower.set_gid("two-sigma-lower")
    ax.axhline(0.0, color="0.6", linewidth=0.8)

    hi = min(band[1], result.max_lag)
    peak = global_max_lag(result, (band[0], hi))
    (marker,) = ax.plot(
        [peak.lag], [peak.value], marker="o", linestyle="none",
        markersize=7, markerfacecolor="none", markeredgecolor="tab:blue",
    )
    marker.set_gid("peak-marker")

    ax.set_xlabel("lag (rotations)")
    ax.set_ylabel("autocorrelation")
    ax.set_xlim(0, result.max_lag + 1)
    if title:
        ax.set_title(title)
    out = Path(path)
    fig.savefig(out, format="svg", dpi=150)
    return out


def plot_wavelet(
    spectrum: WaveletSpectrum,
    global_spec: GlobalSpectrum,
    path: str | Path,
    period_refs: tuple[float, ...] = (10.0,),
    title: str = "",
) -> Path:
    """Time-period power map with 95% contour and coi, plus the global spectrum.

    The period axis is log-2 and increases downward on both panels.
    """
    fig = _new_figure(9.0, 4.2)
    grid = fig.add_gridspec(1, 2, width_ratios=(3, 1), wspace=0.25)
    ax_map = fig.add_subplot(grid[0, 0])
    ax_glob = fig.add_subplot(grid[0, 1], sharey=ax_map)

    times = spectrum.times
    periods = spectrum.periods
    mesh = ax_map.pcolormesh(
        times, periods, spectrum.power.T, cmap="viridis", shading="nearest"
    )
    ax_map.set_gid("power-map")
    mesh.set_rasterized(True)
    if spectrum.significance_ratio is not None:
        contour = ax_map.contour(
            times, periods, spectrum.significance_ratio.T,
            levels=[1.0], colors="black", linewidths=1.2,
        )
        contour.set_gid("sig-contour")
    coi_fill = ax_map.fill_between(
        times,
        np.minimum(np.maximum(spectrum.coi, periods[0]), periods[-1]),
        periods[-1],
        facecolor="none",
        edgecolor="white",
        hatch="xx",
        linewidth=0.0,
    )
    coi_fill.set_gid("coi-hatch")

    ax_map.set_yscale("log", base=2)
    ax_map.set_ylim(periods[-1], periods[0])
    ax_map.set_xlabel("time (rotation)")
    ax_map.set_ylabel("period (rotations)")
    if title:
        ax_map.set_title(title)

    finite = np.isfinite(global_spec.mean_power)
    ax_glob.plot(
        global_spec.mean_power[finite], global_spec.periods[finite],
        color="0.2", linewidth=1.2,
    )
    sig = ax_glob.plot(
        global_spec.significance_level[finite], global_spec.periods[finite],
        linestyle="--", color="tab:red", linewidth=1.0,
    )[0]
    sig.set_gid("global-threshold")
    ax_glob.set_xlabel("mean power")

    for ref in period_refs:
        line = ax_map.axhline(ref, linestyle=":", color="tab:orange", linewidth=1.0)
        line.set_gid(f"period-ref-{ref:g}")
        side = ax_glob.axhline(ref, linestyle=":", color="tab:orange", linewidth=1.0)
        side.set_gid(f"period-ref-{ref:g}-global")

    out = Path(path)
    fig.savefig(out, format="svg", dpi=150)
    return out
