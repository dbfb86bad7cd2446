"""Autocorrelation analysis with white-noise significance bounds.

The estimator is the biased one (global mean subtracted, full-sample
denominator), which keeps every coefficient in [-1, 1]. Bounds are the
white-noise standard errors 1/sqrt(M) and 2/sqrt(M). Peaks inside a lag
band are classified against those bounds and measured for width, and two
ACFs can be compared lag by lag.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft

from .errors import DegenerateSeriesError, ParameterError, ShortSeriesWarning
from .segment import SegmentSeries
from .stabilize import contiguous_interior
from .timeseries import RotationSeries

#: Default maximum lag, in rotations (covers the plotted range).
MAX_LAG = 40

#: Default lag band for peak hunting, in rotations.
PEAK_BAND = (7, 13)


class SignificanceClass(Enum):
    BELOW_1SIGMA = "below_1sigma"
    BETWEEN_1_AND_2_SIGMA = "between_1_and_2_sigma"
    ABOVE_2SIGMA = "above_2sigma"


@dataclass(frozen=True)
class AcfResult:
    lags: np.ndarray
    c: np.ndarray
    n_effective: int
    sigma_bound: float
    series_id: str = ""
    seam_aware: bool = False

    def __post_init__(self) -> None:
        lags = np.asarray(self.lags, dtype=np.int64)
        c = np.asarray(self.c, dtype=np.float64)
        if lags.shape != c.shape or lags.ndim != 1:
            raise ParameterError("lags and coefficients must align")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "c", c)
        if self.sigma_bound <= 0:
            raise ParameterError("sigma bound must be positive")

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])

    def to_csv(self) -> str:
        one, two = self.sigma_bound, 2 * self.sigma_bound
        lines = ["lag,c,one_sigma,two_sigma"]
        for lag, val in zip(self.lags, self.c):
            lines.append(f"{lag},{val!r},{one!r},{two!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AcfPeak:
    lag: int
    value: float
    significance_class: SignificanceClass
    width_at_1sigma: int

    def to_dict(self) -> dict:
        return {
            "lag": self.lag,
            "value": self.value,
            "significance_class": self.significance_class.value,
            "width_at_1sigma": self.width_at_1sigma,
        }


def acf_bounds(m: int) -> tuple[float, float]:
    """White-noise standard-error bounds (1/sqrt(M), 2/sqrt(M))."""
    if m < 2:
        raise ParameterError(f"need at least 2 samples for bounds, got {m}")
    one = 1.0 / math.sqrt(m)
    return one, 2.0 * one


def _lagged_products(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Sum_i x_i * x_(i+tau) for tau = 0..max_lag, FFT-accelerated."""
    n = x.size
    size = next_fast_len(2 * n + 1, real=True)
    spectrum = rfft(x, size)
    corr = irfft(spectrum * np.conj(spectrum), size)
    return corr[: max_lag + 1]


def _series_values(series) -> tuple[np.ndarray, tuple[int, ...], str]:
    if isinstance(series, RotationSeries):
        _, vals = contiguous_interior(series)
        return vals, (), series.label or series.kind.value
    if isinstance(series, SegmentSeries):
        vals, seams = series.compact()
        return vals, seams, series.label
    vals = np.asarray(series, dtype=np.float64)
    if vals.ndim != 1:
        raise ParameterError("expected a 1-D sample array")
    return vals, (), ""


def acf(series, max_lag: int = MAX_LAG, series_id: str | None = None) -> AcfResult:
    """Sample autocorrelation for lags 0..max_lag.

    Accepts a RotationSeries (truncated to its contiguous valid
    interior), a SegmentSeries (concatenated values; seam products
    included here, see acf_seam_aware), or a plain array.
    """
    vals, _, default_id = _series_values(series)
    m = vals.size
    if max_lag < 1:
        raise ParameterError(f"max_lag must be >= 1, got {max_lag}")
    if m <= max_lag:
        raise ParameterError(f"series of length {m} cannot support lag {max_lag}")
    if m < 4 * max_lag:
        warnings.warn(
            f"series length {m} is below 4*max_lag = {4 * max_lag}; "
            "high-lag coefficients are noisy",
            ShortSeriesWarning,
            stacklevel=2,
        )
    x = vals - vals.mean()
    denom = float(np.sum(x * x))
    if denom == 0.0:
        raise DegenerateSeriesError("zero-variance series has no autocorrelation")
    c = _lagged_products(x, max_lag) / denom
    c[0] = 1.0
    return AcfResult(
        lags=np.arange(max_lag + 1),
        c=c,
        n_effective=m,
        sigma_bound=acf_bounds(m)[0],
        series_id=default_id if series_id is None else series_id,
    )


def acf_seam_aware(segments: SegmentSeries, max_lag: int = MAX_LAG,
                   series_id: str | None = None) -> AcfResult:
    """Autocorrelation of a concatenation, skipping seam-crossing products.

    The global mean and the full sum of squares still normalize the
    coefficients, so the result is directly comparable with acf() on the
    same concatenation.
    """
    vals, seams = segments.compact()
    m = vals.size
    if m <= max_lag:
        raise ParameterError(f"series of length {m} cannot support lag {max_lag}")
    x = vals - vals.mean()
    denom = float(np.sum(x * x))
    if denom == 0.0:
        raise DegenerateSeriesError("zero-variance series has no autocorrelation")
    numer = np.zeros(max_lag + 1)
    for block in np.split(x, list(seams)):
        if block.size == 0:
            continue
        lag_cap = min(max_lag, block.size - 1)
        numer[: lag_cap + 1] += _lagged_products(block, lag_cap)
    c = numer / denom
    c[0] = 1.0
    return AcfResult(
        lags=np.arange(max_lag + 1),
        c=c,
        n_effective=m,
        sigma_bound=acf_bounds(m)[0],
        series_id=segments.label if series_id is None else series_id,
        seam_aware=True,
    )


def classify(value: float, sigma_bound: float) -> SignificanceClass:
    if value > 2 * sigma_bound:
        return SignificanceClass.ABOVE_2SIGMA
    if value > sigma_bound:
        return SignificanceClass.BETWEEN_1_AND_2_SIGMA
    return SignificanceClass.BELOW_1SIGMA


def _width_at_1sigma(c: np.ndarray, peak_lag: int, sigma: float) -> int:
    if c[peak_lag] < sigma:
        return 0
    lo = peak_lag
    while lo - 1 >= 1 and c[lo - 1] >= sigma:
        lo -= 1
    hi = peak_lag
    while hi + 1 < c.size and c[hi + 1] >= sigma:
        hi += 1
    return hi - lo + 1


def find_peaks(result: AcfResult, band: tuple[int, int] = PEAK_BAND) -> list[AcfPeak]:
    """Local maxima of the ACF within a lag band, classified and sized.

    A lag qualifies as a strict local maximum against its immediate
    neighbors, or as a band endpoint that attains the band maximum.
    """
    lo, hi = band
    if lo < 1 or hi > result.max_lag or lo > hi:
        raise ParameterError(f"band {band} outside computed lags 1..{result.max_lag}")
    c = result.c
    band_max = float(c[lo : hi + 1].max())
    peaks = []
    for lag in range(lo, hi + 1):
        left, right = c[lag - 1], c[lag + 1] if lag + 1 < c.size else -np.inf
        if lo < lag < hi:
            is_peak = c[lag] > left and c[lag] > right
        elif lag == lo:
            is_peak = c[lag] == band_max and c[lag] > right
        else:
            is_peak = c[lag] == band_max and c[lag] > left
        if is_peak:
            peaks.append(
                AcfPeak(
                    lag=lag,
                    value=float(c[lag]),
                    significance_class=classify(float(c[lag]), result.sigma_bound),
                    width_at_1sigma=_width_at_1sigma(c, lag, result.sigma_bound),
                )
            )
    return peaks


def global_max_lag(result: AcfResult, band: tuple[int, int] = (2, MAX_LAG)) -> AcfPeak:
    """The band's global maximum as a classified peak."""
    lo, hi = band
    if lo < 1 or hi > result.max_lag or lo > hi:
        raise ParameterError(f"band {band} outside computed lags 1..{result.max_lag}")
    lag = lo + int(np.argmax(result.c[lo : hi + 1]))
    return AcfPeak(
        lag=lag,
        value=float(result.c[lag]),
        significance_class=classify(float(result.c[lag]), result.sigma_bound),
        width_at_1sigma=_width_at_1sigma(result.c, lag, result.sigma_bound),
    )


def compare_acfs(a: AcfResult, b: AcfResult) -> list[int]:
    """Lags (ascending) where the two ACFs differ by more than 2 sigma.

    Sigma is the larger of the two series' white-noise bounds; lag 0 is
    skipped since both coefficients are 1 by construction.
    """
    if a.max_lag != b.max_lag:
        raise ParameterError(f"lag ranges differ: {a.max_lag} vs {b.max_lag}")
    threshold = 2.0 * max(a.sigma_bound, b.sigma_bound)
    diff = np.abs(a.c - b.c)
    return [int(lag) for lag in a.lags[1:] if diff[lag] > threshold]


def decrease_statistic(
    f_acf: AcfResult,
    x_acf: AcfResult,
    band: tuple[int, int] = PEAK_BAND,
) -> float:
    """Largest in-band drop from the first ACF to the second, in sigma units.

    A value of at least 1 means the stabilized series lost a full
    standard error of correlation somewhere in the band.
    """
    lo, hi = band
    if hi > f_acf.max_lag or hi > x_acf.max_lag or lo < 1 or lo > hi:
        raise ParameterError(f"band {band} outside computed lags")
    sigma = max(f_acf.sigma_bound, x_acf.sigma_bound)
    drop = f_acf.c[lo : hi + 1] - x_acf.c[lo : hi + 1]
    return float(drop.max() / sigma)


def peaks_to_json(peaks: list[AcfPeak]) -> str:
    return json.dumps([p.to_dict() for p in peaks], indent=2, sort_keys=True)
