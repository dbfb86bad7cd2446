"""Morlet continuous wavelet spectra with red-noise significance.

Conventions (mother normalization, Fourier-period conversion, cone of
influence, chi-square significance against an AR(1) background, and the
time-averaged spectrum with reduced degrees of freedom) follow the
standard practical-wavelet-analysis recipe for the Morlet wavelet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.fft import fft, ifft
from scipy.stats import chi2

from .errors import DegenerateSeriesError, ParameterError
from .segment import Activity, ActivityMask
from .stabilize import contiguous_interior
from .timeseries import RotationSeries

#: Morlet nondimensional frequency; 6 makes scale ~ period.
OMEGA0 = 6.0

#: Decorrelation factor for time-averaged significance (Morlet).
GAMMA_DECORRELATION = 2.32

#: Default dyadic scale grid: 2..64 rotations, 8 sub-octaves.
SCALE_MIN = 2.0
SCALE_STEP = 0.125
N_SCALES = 41


def fourier_factor(omega0: float = OMEGA0) -> float:
    """Ratio of Fourier period to Morlet scale."""
    return 4.0 * math.pi / (omega0 + math.sqrt(2.0 + omega0 * omega0))


def dyadic_scales(
    scale_min: float = SCALE_MIN,
    scale_step: float = SCALE_STEP,
    n_scales: int = N_SCALES,
) -> np.ndarray:
    if scale_min <= 0 or scale_step <= 0 or n_scales < 1:
        raise ParameterError("scale grid parameters must be positive")
    return scale_min * 2.0 ** (scale_step * np.arange(n_scales))


@dataclass(frozen=True)
class WaveletSpectrum:
    """Time-by-scale wavelet power with edge and significance metadata."""

    times: np.ndarray
    scales: np.ndarray
    periods: np.ndarray
    power: np.ndarray
    coi: np.ndarray
    alpha: float
    omega0: float
    significance_mask: np.ndarray | None = None
    significance_ratio: np.ndarray | None = None
    label: str = ""

    def __post_init__(self) -> None:
        if self.power.shape != (self.times.size, self.scales.size):
            raise ParameterError("power grid must be time x scale")
        if np.any(np.diff(self.periods) <= 0):
            raise ParameterError("periods must increase strictly with scale")
        if not (0.0 <= self.alpha < 1.0):
            raise ParameterError(f"lag-1 autocorrelation {self.alpha} outside [0, 1)")

    def in_coi(self) -> np.ndarray:
        """Boolean time-by-scale grid, true where the period is inside the cone."""
        return self.periods[None, :] <= self.coi[:, None]

    def to_csv(self) -> str:
        mask = self.significance_mask
        lines = ["time,period,power,significant"]
        for i, t in enumerate(self.times):
            for j, p in enumerate(self.periods):
                sig = int(bool(mask[i, j])) if mask is not None else 0
                lines.append(f"{t},{p!r},{self.power[i, j]!r},{sig}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GlobalSpectrum:
    """Time-averaged wavelet power per period, with 95% thresholds."""

    periods: np.ndarray
    mean_power: np.ndarray
    significance_level: np.ndarray

    def __post_init__(self) -> None:
        if not (self.periods.size == self.mean_power.size == self.significance_level.size):
            raise ParameterError("global-spectrum arrays must align")

    def argmax_period(self) -> float:
        """Period of the largest finite mean power."""
        if not np.isfinite(self.mean_power).any():
            raise DegenerateSeriesError("global spectrum has no finite values")
        return float(self.periods[np.nanargmax(self.mean_power)])

    def to_csv(self) -> str:
        lines = ["period,mean_power,significance_level"]
        for p, mp, sl in zip(self.periods, self.mean_power, self.significance_level):
            lines.append(f"{p!r},{mp!r},{sl!r}")
        return "\n".join(lines) + "\n"


def cwt(
    values: np.ndarray,
    scales: np.ndarray,
    dt: float = 1.0,
    omega0: float = OMEGA0,
) -> np.ndarray:
    """Complex Morlet transform of a plain array; linear in the input.

    Returns a (time x scale) grid. The input is zero-padded to the next
    power of two; no demeaning or rescaling happens here.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ParameterError("need a 1-D sample array")
    scales = np.asarray(scales, dtype=np.float64)
    n = x.size
    # pad to the power of two above ~1.4n so edges see zeros, never wrap
    size = 1 << (int(math.log2(n) + 0.4999) + 1)
    spectrum = fft(x, size)
    k = np.fft.fftfreq(size, d=dt) * 2.0 * math.pi
    positive = k > 0

    out = np.empty((n, scales.size), dtype=np.complex128)
    for j, s in enumerate(scales):
        expnt = -0.5 * (s * k - omega0) ** 2
        norm = math.sqrt(2.0 * math.pi * s / dt) * math.pi**-0.25
        daughter = np.where(positive, norm * np.exp(np.where(positive, expnt, 0.0)), 0.0)
        out[:, j] = ifft(spectrum * daughter)[:n]
    return out


def coi_periods(n: int, dt: float = 1.0, omega0: float = OMEGA0) -> np.ndarray:
    """Cone-of-influence period per time step (e-folding of edge effects)."""
    edge = np.minimum(np.arange(n), np.arange(n)[::-1]).astype(np.float64)
    edge[edge == 0] = 1e-5
    return fourier_factor(omega0) / math.sqrt(2.0) * dt * edge


def lag1_autocorrelation(values: np.ndarray) -> float:
    """Sample lag-1 autocorrelation, clamped to [0, 0.99]."""
    x = np.asarray(values, dtype=np.float64)
    x = x - x.mean()
    denom = float(np.sum(x * x))
    if denom == 0.0:
        raise DegenerateSeriesError("zero-variance series has no lag-1 autocorrelation")
    alpha = float(np.sum(x[:-1] * x[1:]) / denom)
    return min(max(alpha, 0.0), 0.99)


def morlet_cwt(
    series: RotationSeries,
    scale_min: float = SCALE_MIN,
    scale_step: float = SCALE_STEP,
    n_scales: int = N_SCALES,
    omega0: float = OMEGA0,
) -> WaveletSpectrum:
    """Wavelet power of a series' valid interior, standardized first.

    Standardization (zero mean, unit variance) puts power and the
    red-noise thresholds in units of the input variance.
    """
    offset, vals = contiguous_interior(series)
    n = vals.size
    if n < 32:
        raise ParameterError(f"valid interior of {n} points is too short (need 32)")
    std = vals.std()
    if std == 0.0:
        raise DegenerateSeriesError("constant series has no wavelet spectrum")
    x = (vals - vals.mean()) / std
    scales = dyadic_scales(scale_min, scale_step, n_scales)
    wave = cwt(x, scales, dt=1.0, omega0=omega0)
    return WaveletSpectrum(
        times=series.start_rotation + offset + np.arange(n, dtype=np.int64),
        scales=scales,
        periods=fourier_factor(omega0) * scales,
        power=np.abs(wave) ** 2,
        coi=coi_periods(n, dt=1.0, omega0=omega0),
        alpha=lag1_autocorrelation(x),
        omega0=omega0,
        label=series.label or series.kind.value,
    )


def red_noise_background(alpha: float, periods: np.ndarray, dt: float = 1.0) -> np.ndarray:
    """Normalized AR(1) spectrum at the Fourier frequencies of the periods."""
    freq = dt / np.asarray(periods, dtype=np.float64)
    return (1.0 - alpha**2) / (1.0 + alpha**2 - 2.0 * alpha * np.cos(2.0 * math.pi * freq))


def red_noise_significance(spectrum: WaveletSpectrum, level: float = 0.95) -> WaveletSpectrum:
    """Flag grid points whose power beats the AR(1) null at the given level.

    Pointwise test: each |W|^2 is chi-square with 2 degrees of freedom
    around the background spectrum. Points outside the cone of influence
    are never flagged.
    """
    if not (0.5 < level < 1.0):
        raise ParameterError(f"significance level {level} outside (0.5, 1)")
    background = red_noise_background(spectrum.alpha, spectrum.periods)
    threshold = background * (chi2.ppf(level, 2) / 2.0)
    ratio = spectrum.power / threshold[None, :]
    mask = (ratio > 1.0) & spectrum.in_coi()
    return replace(spectrum, significance_mask=mask, significance_ratio=ratio)


def global_spectrum(spectrum: WaveletSpectrum, level: float = 0.95) -> GlobalSpectrum:
    """Time-average of power over in-coi times, with reduced-dof thresholds.

    Scales whose period never fits inside the cone get NaN mean power and
    an infinite threshold.
    """
    in_coi = spectrum.in_coi()
    n_avg = in_coi.sum(axis=0).astype(np.float64)
    mean_power = np.full(spectrum.scales.size, np.nan)
    thresholds = np.full(spectrum.scales.size, np.inf)
    background = red_noise_background(spectrum.alpha, spectrum.periods)
    for j in range(spectrum.scales.size):
        if n_avg[j] < 1:
            continue
        mean_power[j] = spectrum.power[in_coi[:, j], j].mean()
        dof = 2.0 * math.sqrt(
            1.0 + (n_avg[j] / (GAMMA_DECORRELATION * spectrum.scales[j])) ** 2
        )
        thresholds[j] = background[j] * chi2.ppf(level, dof) / dof
    return GlobalSpectrum(
        periods=spectrum.periods.copy(),
        mean_power=mean_power,
        significance_level=thresholds,
    )


@dataclass(frozen=True)
class SignificantExtent:
    """A maximal run of times where some in-band period is significant."""

    start_time: int
    end_time: int
    activity_labels: tuple[str, ...] = ()


def significant_extents(
    spectrum: WaveletSpectrum,
    period_band: tuple[float, float] = (7.0, 13.0),
    mask: ActivityMask | None = None,
) -> list[SignificantExtent]:
    """Contiguous time intervals with significant power in a period band."""
    if spectrum.significance_mask is None:
        raise ParameterError("significance mask not computed; run the red-noise test first")
    lo, hi = period_band
    cols = (spectrum.periods >= lo) & (spectrum.periods <= hi)
    if not cols.any():
        raise ParameterError(f"no scale grid periods inside band {period_band}")
    hot = spectrum.significance_mask[:, cols].any(axis=1)
    extents = []
    edges = np.diff(np.concatenate(([0], hot.astype(np.int8), [0])))
    for a, b in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
        t0, t1 = int(spectrum.times[a]), int(spectrum.times[b - 1])
        labels: tuple[str, ...] = ()
        if mask is not None:
            seen = []
            for rot in range(t0, t1 + 1):
                lab = mask.label_of(rot).value
                if lab not in seen:
                    seen.append(lab)
            labels = tuple(seen)
        extents.append(SignificantExtent(t0, t1, labels))
    return extents


def acf_wavelet_agreement(
    acf_result,
    global_spec: GlobalSpectrum,
    band: tuple[int, int] = (7, 13),
) -> float:
    """Pearson correlation of ACF values and interpolated global power.

    The global spectrum is interpolated linearly in period onto the
    integer lags of the band.
    """
    lo, hi = band
    lags = np.arange(lo, hi + 1)
    if lags.size < 3:
        raise ParameterError(f"band {band} holds fewer than 3 integer lags")
    if hi > acf_result.max_lag:
        raise ParameterError(f"band {band} outside ACF lags")
    finite = np.isfinite(global_spec.mean_power)
    if finite.sum() < 2:
        raise DegenerateSeriesError("global spectrum too sparse to interpolate")
    power = np.interp(
        lags.astype(np.float64),
        global_spec.periods[finite],
        global_spec.mean_power[finite],
    )
    c = acf_result.c[lo : hi + 1]
    if float(np.std(c)) == 0.0 or float(np.std(power)) == 0.0:
        raise DegenerateSeriesError("constant band values have no correlation")
    return float(np.corrcoef(c, power)[0, 1])


def masked_band_power(
    spectrum: WaveletSpectrum,
    mask: ActivityMask,
    activity: Activity,
    period_band: tuple[float, float] = (7.0, 13.0),
) -> float:
    """Mean in-band, in-coi power over times carrying one activity label.

    The transform always runs on the full series; activity selection
    happens here, on the power grid, never by concatenating segments.
    """
    lo, hi = period_band
    cols = (spectrum.periods >= lo) & (spectrum.periods <= hi)
    if not cols.any():
        raise ParameterError(f"no scale grid periods inside band {period_band}")
    rows = np.array(
        [mask.label_of(int(t)) is activity for t in spectrum.times], dtype=bool
    )
    grid = spectrum.in_coi() & rows[:, None] & cols[None, :]
    if not grid.any():
        raise DegenerateSeriesError("no in-coi grid points with the requested label")
    return float(spectrum.power[grid].mean())
