"""Per-rotation series: means, centered smoothing, fluctuations, sign splits.

The core container is RotationSeries, an array of values indexed by
absolute Carrington rotation number. Invalid positions hold NaN and carry
a quality flag; alignment between series is always by rotation number,
never by list position.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace
from enum import Enum, IntFlag
from typing import Iterable

import numpy as np

from .errors import AlignmentError, DegenerateSeriesError, InputError, ParameterError
from .ingest import CarringtonCalendar, DailyAreaRecord, Hemisphere

#: Days with observations below this count mark a rotation low-coverage.
LOW_COVERAGE_DAYS = 10

#: Default centered smoothing window, in rotations.
SMOOTH_WINDOW = 13


class SeriesKind(Enum):
    MEAN = "mean"
    SMOOTHED = "smoothed"
    FLUCTUATION = "fluctuation"
    STABILIZED = "stabilized"


class Flag(IntFlag):
    OK = 0
    MISSING = 1
    LOW_COVERAGE = 2
    EDGE = 4
    BAD_TRANSFORM = 8
    SPARSE_WINDOW = 16


#: Flags that invalidate a position (LOW_COVERAGE alone does not).
_INVALIDATING = Flag.MISSING | Flag.EDGE | Flag.BAD_TRANSFORM | Flag.SPARSE_WINDOW


@dataclass(frozen=True)
class RotationSeries:
    """Values addressed by absolute rotation number start_rotation + i."""

    start_rotation: int
    values: np.ndarray
    kind: SeriesKind
    hemisphere: Hemisphere
    flags: np.ndarray = field(default=None)  # type: ignore[assignment]
    label: str = ""

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ParameterError("series values must be a non-empty 1-D array")
        flags = self.flags
        if flags is None:
            flags = np.zeros(vals.size, dtype=np.uint8)
        else:
            flags = np.asarray(flags, dtype=np.uint8)
            if flags.shape != vals.shape:
                raise ParameterError("flags must match values in length")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "flags", flags)
        if self.kind is SeriesKind.MEAN:
            valid = self.valid_mask()
            if np.any(vals[valid] < 0):
                raise ParameterError("mean-area series cannot hold negative values")

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end_rotation(self) -> int:
        """Last rotation number covered (inclusive)."""
        return self.start_rotation + len(self) - 1

    def rotations(self) -> np.ndarray:
        return self.start_rotation + np.arange(len(self), dtype=np.int64)

    def valid_mask(self) -> np.ndarray:
        return np.isfinite(self.values) & ((self.flags & int(_INVALIDATING)) == 0)

    def valid_values(self) -> np.ndarray:
        return self.values[self.valid_mask()]

    def index_of(self, rotation: int) -> int:
        i = rotation - self.start_rotation
        if not (0 <= i < len(self)):
            raise AlignmentError(
                f"rotation {rotation} outside series span "
                f"[{self.start_rotation}, {self.end_rotation}]"
            )
        return i

    def with_values(
        self,
        values: np.ndarray,
        kind: SeriesKind | None = None,
        flags: np.ndarray | None = None,
        label: str | None = None,
    ) -> "RotationSeries":
        return replace(
            self,
            values=values,
            kind=self.kind if kind is None else kind,
            flags=self.flags.copy() if flags is None else flags,
            label=self.label if label is None else label,
        )

    def slice_rotations(self, first: int, last: int) -> "RotationSeries":
        """Sub-series covering rotations [first, last] inclusive."""
        a, b = self.index_of(first), self.index_of(last)
        if b < a:
            raise ParameterError("empty rotation slice")
        return replace(
            self,
            start_rotation=first,
            values=self.values[a : b + 1].copy(),
            flags=self.flags[a : b + 1].copy(),
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("rotation,value,flag\n")
        for rot, val, flg in zip(self.rotations(), self.values, self.flags):
            out.write(f"{rot},{float(val)!r},{int(flg)}\n")
        return out.getvalue()

    @classmethod
    def from_csv(
        cls,
        text: str,
        kind: SeriesKind,
        hemisphere: Hemisphere,
        label: str = "",
    ) -> "RotationSeries":
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("rotation,"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise InputError(f"series CSV line {lineno}: expected 3 fields")
            rows.append((int(parts[0]), float(parts[1]), int(parts[2])))
        if not rows:
            raise InputError("series CSV holds no data rows")
        rows.sort(key=lambda r: r[0])
        start = rows[0][0]
        if rows[-1][0] - start + 1 != len(rows):
            raise InputError("series CSV rotations are not contiguous")
        return cls(
            start_rotation=start,
            values=np.array([r[1] for r in rows]),
            kind=kind,
            hemisphere=hemisphere,
            flags=np.array([r[2] for r in rows], dtype=np.uint8),
            label=label,
        )


@dataclass(frozen=True)
class FluctuationSet:
    """A fluctuation series with its positive and negative parts."""

    f: RotationSeries
    f_plus: RotationSeries
    f_minus: RotationSeries


def _require_aligned(a: RotationSeries, b: RotationSeries) -> None:
    if a.start_rotation != b.start_rotation or len(a) != len(b):
        raise AlignmentError(
            f"series cover rotations [{a.start_rotation}, {a.end_rotation}] vs "
            f"[{b.start_rotation}, {b.end_rotation}]; alignment is by rotation number"
        )
    if a.hemisphere is not b.hemisphere:
        raise AlignmentError(
            f"series hemispheres differ: {a.hemisphere.value} vs {b.hemisphere.value}"
        )


def rotation_means(
    records: Iterable[DailyAreaRecord],
    cal: CarringtonCalendar,
    hemisphere: Hemisphere,
) -> RotationSeries:
    """Average daily areas within each rotation for one hemisphere.

    The mean divides by the number of observed days only; rotations with
    no observations inside the covered span are NaN with a MISSING flag,
    and rotations with fewer than LOW_COVERAGE_DAYS observed days keep
    their value but carry a LOW_COVERAGE flag.
    """
    sums: dict[int, float] = {}
    counts: dict[int, int] = {}
    for rec in records:
        if rec.hemisphere is not hemisphere:
            continue
        rot = cal.rotation_of(rec.day)
        sums[rot] = sums.get(rot, 0.0) + rec.area
        counts[rot] = counts.get(rot, 0) + 1
    if not sums:
        raise InputError(f"no daily records for hemisphere {hemisphere.value}")

    start, end = min(sums), max(sums)
    n = end - start + 1
    values = np.full(n, np.nan)
    flags = np.zeros(n, dtype=np.uint8)
    for rot in range(start, end + 1):
        i = rot - start
        k = counts.get(rot, 0)
        if k == 0:
            flags[i] = Flag.MISSING
            continue
        values[i] = sums[rot] / k
        if k < LOW_COVERAGE_DAYS:
            flags[i] = Flag.LOW_COVERAGE
    return RotationSeries(start, values, SeriesKind.MEAN, hemisphere, flags=flags)


def smooth_centered(series: RotationSeries, window: int = SMOOTH_WINDOW) -> RotationSeries:
    """Centered moving average with uniform weights.

    The first and last (window-1)/2 positions cannot host a full window
    and are marked edge-invalid; interior windows touching a missing
    value are marked sparse-invalid (no infilling).
    """
    if window % 2 == 0 or window < 3:
        raise ParameterError(f"smoothing window must be odd and >= 3, got {window}")
    if window > len(series):
        raise ParameterError(
            f"smoothing window {window} exceeds series length {len(series)}"
        )
    half = window // 2
    valid = series.valid_mask()
    filled = np.where(valid, series.values, 0.0)
    kernel = np.ones(window)
    sums = np.convolve(filled, kernel, mode="same")
    have = np.convolve(valid.astype(np.float64), kernel, mode="same")

    values = np.full(len(series), np.nan)
    flags = series.flags.copy()
    full = have > window - 0.5
    interior = np.zeros(len(series), dtype=bool)
    interior[half : len(series) - half] = True
    ok = full & interior
    values[ok] = sums[ok] / window
    flags[~interior] |= np.uint8(Flag.EDGE)
    flags[interior & ~full] |= np.uint8(Flag.SPARSE_WINDOW)
    return series.with_values(values, kind=SeriesKind.SMOOTHED, flags=flags)


def fluctuations(mean: RotationSeries, smoothed: RotationSeries) -> RotationSeries:
    """Elementwise difference mean - smoothed over aligned rotations."""
    _require_aligned(mean, smoothed)
    values = mean.values - smoothed.values
    flags = (mean.flags | smoothed.flags).astype(np.uint8)
    bad = ~(mean.valid_mask() & smoothed.valid_mask())
    values = np.where(bad, np.nan, values)
    return mean.with_values(values, kind=SeriesKind.FLUCTUATION, flags=flags)


def split_signs(f: RotationSeries) -> FluctuationSet:
    """Split into positive part (f where f > 0, else 0) and the remainder.

    The parts reconstruct f exactly and never overlap in support; invalid
    positions stay invalid in both parts.
    """
    if f.kind not in (SeriesKind.FLUCTUATION, SeriesKind.STABILIZED):
        raise ParameterError(f"sign split expects a fluctuation-family series, got {f.kind.value}")
    valid = f.valid_mask()
    plus = np.where(valid, np.where(f.values > 0, f.values, 0.0), np.nan)
    minus = np.where(valid, np.where(f.values > 0, 0.0, f.values), np.nan)
    f_plus = f.with_values(plus, label=f.label + "+" if f.label else "")
    f_minus = f.with_values(minus, label=f.label + "-" if f.label else "")
    return FluctuationSet(f=f, f_plus=f_plus, f_minus=f_minus)


def require_nondegenerate(series: RotationSeries, context: str = "series") -> np.ndarray:
    """Return valid values, raising if there is no variance to analyze."""
    vals = series.valid_values()
    if vals.size < 2 or float(np.nanstd(vals)) == 0.0:
        raise DegenerateSeriesError(f"{context} has zero variance over valid positions")
    return vals
