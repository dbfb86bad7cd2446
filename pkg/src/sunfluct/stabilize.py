"""Variance stabilization of fluctuation series.

The local fluctuation scale is modeled as a power law of the smoothed
activity level, sigma_local = amplitude * smoothed**exponent, fit by
least squares in log-log space. Dividing fluctuations by
smoothed**exponent yields a series with approximately constant variance,
whose stationarity is then checked window by window.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from .errors import (
    DegenerateSeriesError,
    InsufficientDataError,
    ParameterError,
)
from .timeseries import Flag, RotationSeries, SeriesKind

#: Window-width candidates for the local-scale estimate, in rotations.
DEFAULT_WINDOW_CANDIDATES = (7, 9, 11, 13, 15, 17)

#: Fixed window used to score post-transform variance flatness, so the
#: score is comparable across local-window candidates.
FLATNESS_EVAL_WINDOW = 13


@dataclass(frozen=True)
class StabilizationFit:
    """Power-law amplitude model fitted in log-log space."""

    exponent: float
    log_amplitude: float
    window: int
    exponent_stderr: float
    f_statistic: float
    p_value: float
    n_points: int
    n_excluded_nonpositive: int

    def __post_init__(self) -> None:
        if self.window % 2 == 0 or self.window < 3:
            raise ParameterError(f"local window must be odd and >= 3, got {self.window}")
        if self.exponent_stderr < 0 or not (0.0 <= self.p_value <= 1.0):
            raise ParameterError("fit diagnostics out of range")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass(frozen=True)
class StationarityReport:
    """Sliding-window mean/std diagnostics of a (nominally stationary) series."""

    window: int
    stride: int
    centers: list[int]
    windowed_means: list[float]
    windowed_stds: list[float]
    grand_mean: float
    grand_std_of_means: float
    grand_mean_std: float
    grand_std_of_stds: float
    frac_means_in_1sigma: float
    frac_stds_in_2sigma: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        lines = ["center_rotation,window_mean,window_std"]
        for c, m, s in zip(self.centers, self.windowed_means, self.windowed_stds):
            lines.append(f"{c},{m!r},{s!r}")
        return "\n".join(lines) + "\n"


def contiguous_interior(series: RotationSeries) -> tuple[int, np.ndarray]:
    """Longest contiguous run of valid positions: (start index, values)."""
    mask = series.valid_mask()
    if not mask.any():
        raise InsufficientDataError("series has no valid positions")
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    j = int(np.argmax(ends - starts))
    return int(starts[j]), series.values[starts[j] : ends[j]].copy()


def local_std(f: RotationSeries, u: int) -> RotationSeries:
    """Centered moving standard deviation with divisor u (window mean removed).

    Defined only where a full window of valid values fits; elsewhere NaN
    with an edge or sparse-window flag.
    """
    if u % 2 == 0 or u < 3:
        raise ParameterError(f"local window must be odd and >= 3, got {u}")
    n = len(f)
    valid = f.valid_mask()
    if u > int(valid.sum()):
        raise ParameterError(f"local window {u} exceeds valid length {int(valid.sum())}")
    half = u // 2
    x = np.where(valid, f.values, 0.0)
    kernel = np.ones(u)
    s1 = np.convolve(x, kernel, mode="same")
    s2 = np.convolve(x * x, kernel, mode="same")
    have = np.convolve(valid.astype(np.float64), kernel, mode="same")

    mean = s1 / u
    var = s2 / u - mean * mean
    var = np.maximum(var, 0.0)  # guard tiny negative round-off

    values = np.full(n, np.nan)
    flags = f.flags.copy()
    interior = np.zeros(n, dtype=bool)
    interior[half : n - half] = True
    full = have > u - 0.5
    ok = interior & full
    values[ok] = np.sqrt(var[ok])
    flags[~interior] |= np.uint8(Flag.EDGE)
    flags[interior & ~full] |= np.uint8(Flag.SPARSE_WINDOW)
    return f.with_values(values, kind=SeriesKind.SMOOTHED, flags=flags, label="local_std")


def fit_amplitude_model(
    f: RotationSeries,
    smoothed: RotationSeries,
    u: int,
) -> StabilizationFit:
    """Fit log(local_std) = log_amplitude + exponent * log(smoothed).

    Positions are retained only where both the windowed std and the
    smoothed level are valid and strictly positive; exclusions for
    non-positive levels are counted on the fit.
    """
    scale = local_std(f, u)
    n_valid = int(f.valid_mask().sum())
    if n_valid < 10 * u:
        raise InsufficientDataError(
            f"need at least {10 * u} valid fluctuation points for window {u}, have {n_valid}"
        )
    usable = scale.valid_mask() & smoothed.valid_mask()
    positive = usable & (scale.values > 0) & (smoothed.values > 0)
    n_excluded = int((usable & ~positive).sum())
    y = np.log(scale.values[positive])
    x = np.log(smoothed.values[positive])
    n = y.size
    if n < 30:
        raise InsufficientDataError(f"only {n} retained points for the amplitude fit (need 30)")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if float(np.ptp(x)) < 1e-12 * max(1.0, abs(float(x.mean()))):
        raise DegenerateSeriesError("smoothed level is constant; amplitude fit is degenerate")

    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    sse = float(np.sum(resid**2))
    ssr = float(np.sum(((intercept + slope * x) - y.mean()) ** 2))
    dof = n - 2
    mse = sse / dof
    stderr = math.sqrt(mse / sxx) if mse > 0 else 0.0
    if sse > 0:
        f_stat = ssr / mse
        p_value = float(stats.f.sf(f_stat, 1, dof))
    else:
        f_stat = math.inf
        p_value = 0.0
    return StabilizationFit(
        exponent=float(slope),
        log_amplitude=float(intercept),
        window=u,
        exponent_stderr=stderr,
        f_statistic=f_stat,
        p_value=p_value,
        n_points=n,
        n_excluded_nonpositive=n_excluded,
    )


def stabilize(
    f: RotationSeries,
    smoothed: RotationSeries,
    fit: StabilizationFit,
) -> RotationSeries:
    """Divide fluctuations by smoothed**exponent; exponent 0 is the identity."""
    ok = f.valid_mask() & smoothed.valid_mask() & (smoothed.values > 0)
    with np.errstate(invalid="ignore"):
        values = np.where(ok, f.values / np.power(np.where(ok, smoothed.values, 1.0), fit.exponent), np.nan)
    flags = (f.flags | smoothed.flags).astype(np.uint8)
    flags[f.valid_mask() & smoothed.valid_mask() & ~ok] |= np.uint8(Flag.BAD_TRANSFORM)
    return f.with_values(values, kind=SeriesKind.STABILIZED, flags=flags)


def flatness_statistic(x: RotationSeries, window: int = FLATNESS_EVAL_WINDOW) -> float:
    """Max/min ratio of windowed variances over the valid interior.

    Non-overlapping windows; 1.0 for a perfectly flat variance profile,
    inf when some window is constant while others are not.
    """
    _, vals = contiguous_interior(x)
    n_win = vals.size // window
    if n_win < 2:
        raise InsufficientDataError(
            f"need at least 2 windows of {window} points, have {vals.size} values"
        )
    chunks = vals[: n_win * window].reshape(n_win, window)
    variances = chunks.var(axis=1)
    vmax, vmin = float(variances.max()), float(variances.min())
    if vmax == 0.0:
        return 1.0
    if vmin == 0.0:
        return math.inf
    return vmax / vmin


def select_u(
    f: RotationSeries,
    smoothed: RotationSeries,
    candidates: tuple[int, ...] = DEFAULT_WINDOW_CANDIDATES,
) -> tuple[int, StabilizationFit]:
    """Pick the local window whose transform flattens the variance best.

    Every candidate is scored with the same fixed evaluation window so
    scores are comparable; exact ties prefer the candidate closest to 13.
    """
    if not candidates:
        raise ParameterError("no local-window candidates supplied")
    best: tuple[float, int, int, StabilizationFit] | None = None
    last_error: Exception | None = None
    for u in candidates:
        try:
            fit = fit_amplitude_model(f, smoothed, u)
            score = flatness_statistic(stabilize(f, smoothed, fit))
        except (InsufficientDataError, DegenerateSeriesError, ParameterError) as exc:
            last_error = exc
            continue
        key = (score, abs(u - 13), u, fit)
        if best is None or key[:3] < best[:3]:
            best = key
    if best is None:
        assert last_error is not None
        raise last_error
    return best[2], best[3]


def stationarity_report(
    x: RotationSeries,
    u: int,
    stride: int | None = None,
) -> StationarityReport:
    """Windowed mean/std diagnostics with band-coverage fractions.

    Windows are centered at interior positions u//2, u//2 + stride, ...
    of the valid interior. Coverage uses closed intervals: the fraction
    of windowed means within one standard deviation (of the means) of
    their grand mean, and of windowed stds within two standard deviations
    (of the stds) of their grand mean.
    """
    if u % 2 == 0 or u < 3:
        raise ParameterError(f"window must be odd and >= 3, got {u}")
    if stride is None:
        stride = u
    if stride < 1:
        raise ParameterError(f"stride must be positive, got {stride}")
    offset, vals = contiguous_interior(x)
    half = u // 2
    centers = list(range(half, vals.size - half, stride))
    if len(centers) < 3:
        raise InsufficientDataError(
            f"only {len(centers)} windows of {u} fit in {vals.size} valid points (need 3)"
        )
    means, stds = [], []
    for c in centers:
        w = vals[c - half : c + half + 1]
        means.append(float(w.mean()))
        stds.append(float(np.sqrt(np.sum((w - w.mean()) ** 2) / u)))
    means_arr = np.array(means)
    stds_arr = np.array(stds)
    grand_mean = float(means_arr.mean())
    sd_means = float(means_arr.std(ddof=1))
    grand_mean_std = float(stds_arr.mean())
    sd_stds = float(stds_arr.std(ddof=1))
    frac_means = float(np.mean(np.abs(means_arr - grand_mean) <= sd_means))
    frac_stds = float(np.mean(np.abs(stds_arr - grand_mean_std) <= 2 * sd_stds))
    center_rotations = [x.start_rotation + offset + c for c in centers]
    return StationarityReport(
        window=u,
        stride=stride,
        centers=center_rotations,
        windowed_means=means,
        windowed_stds=stds,
        grand_mean=grand_mean,
        grand_std_of_means=sd_means,
        grand_mean_std=grand_mean_std,
        grand_std_of_stds=sd_stds,
        frac_means_in_1sigma=frac_means,
        frac_stds_in_2sigma=frac_stds,
    )
