"""Activity segmentation from monthly Wolf numbers.

Monthly Wolf numbers are smoothed with the conventional 13-month window
(half-weight end months), cycle boundaries are placed at the smoothed
minima, and months above/below the long-run mean of the smoothed series
define high/low activity. Rotations inherit the label of the month that
contains their midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (
    AlignmentError,
    CoverageError,
    ParameterError,
    SegmentationError,
)
from .ingest import CarringtonCalendar, MonthlyWolfRecord, month_midpoint
from .timeseries import RotationSeries

#: Minimum month separation between consecutive cycle minima (~8 years).
MIN_CYCLE_SEPARATION_MONTHS = 96

#: Plausible spacing of consecutive cycle boundaries, in rotations.
CYCLE_SPAN_ROTATIONS = (120, 180)


class Activity(Enum):
    LOW = "low"
    HIGH = "high"


@dataclass(frozen=True)
class ActivityMask:
    """Per-rotation high/low labels plus cycle boundaries.

    cycle_boundaries holds the rotation numbers of consecutive cycle
    minima; n+1 boundaries delimit n cycles.
    """

    start_rotation: int
    labels: tuple[Activity, ...]
    threshold: float
    cycle_boundaries: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if not self.labels:
            raise ParameterError("activity mask needs at least one label")
        if self.threshold < 0:
            raise ParameterError("activity threshold cannot be negative")
        b = self.cycle_boundaries
        for prev, cur in zip(b, b[1:]):
            gap = cur - prev
            if gap <= 0:
                raise SegmentationError("cycle boundaries must increase strictly")
            if not (CYCLE_SPAN_ROTATIONS[0] <= gap <= CYCLE_SPAN_ROTATIONS[1]):
                raise SegmentationError(
                    f"cycle boundary spacing {gap} rotations outside "
                    f"{CYCLE_SPAN_ROTATIONS[0]}-{CYCLE_SPAN_ROTATIONS[1]}"
                )

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def end_rotation(self) -> int:
        return self.start_rotation + len(self) - 1

    def label_of(self, rotation: int) -> Activity:
        i = rotation - self.start_rotation
        if not (0 <= i < len(self)):
            raise AlignmentError(
                f"rotation {rotation} outside mask span "
                f"[{self.start_rotation}, {self.end_rotation}]"
            )
        return self.labels[i]

    def cycle_of(self, rotation: int) -> int | None:
        """0-based cycle slot containing the rotation, if any."""
        b = self.cycle_boundaries
        for j in range(len(b) - 1):
            if b[j] <= rotation < b[j + 1]:
                return j
        return None

    def to_csv(self) -> str:
        lines = ["rotation,label,cycle"]
        for i, lab in enumerate(self.labels):
            rot = self.start_rotation + i
            cyc = self.cycle_of(rot)
            lines.append(f"{rot},{lab.value},{'' if cyc is None else cyc}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SegmentSeries:
    """Concatenation of same-label stretches of a rotation series.

    Order follows the original series; seams mark indices where the
    source rotation numbering jumps, so correlation products across a
    seam can be identified.
    """

    values: np.ndarray
    source_rotations: np.ndarray
    label: str
    seams: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        rots = np.asarray(self.source_rotations, dtype=np.int64)
        if vals.shape != rots.shape or vals.ndim != 1:
            raise ParameterError("segment values and source rotations must align")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "source_rotations", rots)
        seams = tuple(int(i) for i in np.flatnonzero(np.diff(rots) != 1) + 1)
        object.__setattr__(self, "seams", seams)

    def __len__(self) -> int:
        return int(self.values.size)

    def compact(self) -> tuple[np.ndarray, tuple[int, ...]]:
        """Finite values with seam indices recomputed after dropping NaNs."""
        keep = np.isfinite(self.values)
        vals = self.values[keep]
        rots = self.source_rotations[keep]
        seams = tuple(int(i) for i in np.flatnonzero(np.diff(rots) != 1) + 1)
        return vals, seams


def smooth_wolf(monthly: Sequence[MonthlyWolfRecord]) -> np.ndarray:
    """13-month centered mean with half-weight first and last months.

    Returns an array aligned with the input; the six months at each end
    have no full window and are NaN.
    """
    n = len(monthly)
    if n < 13:
        raise ParameterError(f"need at least 13 months to smooth, got {n}")
    values = np.array([r.wolf for r in monthly], dtype=np.float64)
    weights = np.ones(13)
    weights[0] = weights[-1] = 0.5
    weights /= 12.0
    out = np.full(n, np.nan)
    smoothed = np.convolve(values, weights[::-1], mode="valid")
    out[6 : n - 6] = smoothed
    return out


def cycle_minima(smoothed: np.ndarray) -> list[int]:
    """Indices of cycle minima in a smoothed monthly series.

    A month is a minimum when it holds the smallest value of the
    centered 97-month window around it (clipped at the ends), taking the
    earliest month of any plateau. Minima closer than the separation
    floor collapse to the deeper one.
    """
    x = np.asarray(smoothed, dtype=np.float64)
    valid = np.flatnonzero(np.isfinite(x))
    if valid.size < 24:
        raise SegmentationError(f"only {valid.size} valid smoothed months (need 24)")
    lo, hi = int(valid[0]), int(valid[-1])
    half = MIN_CYCLE_SEPARATION_MONTHS // 2
    candidates = []
    for i in range(lo, hi + 1):
        a, b = max(lo, i - half), min(hi, i + half)
        window = x[a : b + 1]
        wmin = np.nanmin(window)
        if x[i] == wmin and (a + int(np.nanargmin(window))) == i:
            candidates.append(i)

    kept: list[int] = []
    for i in sorted(candidates, key=lambda j: (x[j], j)):
        if all(abs(i - k) >= MIN_CYCLE_SEPARATION_MONTHS for k in kept):
            kept.append(i)
    kept.sort()
    if len(kept) < 2:
        raise SegmentationError(f"found {len(kept)} cycle minima; need at least 2")
    return kept


def activity_mask(
    smoothed: np.ndarray,
    months: Sequence[tuple[int, int]],
    rotation_span: tuple[int, int],
    cal: CarringtonCalendar,
    minima: Sequence[int] = (),
) -> ActivityMask:
    """Label each rotation in the span by its midpoint month's activity.

    The threshold is the arithmetic mean of the valid smoothed values;
    months strictly above it are High, everything else Low.
    """
    x = np.asarray(smoothed, dtype=np.float64)
    if len(months) != x.size:
        raise ParameterError("months and smoothed series must align")
    finite = np.isfinite(x)
    if not finite.any():
        raise ParameterError("smoothed series has no valid months")
    threshold = float(x[finite].mean())
    month_label = {
        months[i]: (Activity.HIGH if x[i] > threshold else Activity.LOW)
        for i in range(x.size)
        if finite[i]
    }

    first, last = rotation_span
    if last < first:
        raise ParameterError("empty rotation span")
    labels = []
    for rot in range(first, last + 1):
        mid = cal.rotation_midpoint(rot)
        key = (mid.year, mid.month)
        if key not in month_label:
            raise CoverageError(
                f"rotation {rot} midpoint {mid.date().isoformat()} has no "
                "valid smoothed month"
            )
        labels.append(month_label[key])

    boundaries = tuple(
        cal.rotation_of_instant(month_midpoint(*months[i])) for i in minima
    )
    return ActivityMask(
        start_rotation=first,
        labels=tuple(labels),
        threshold=threshold,
        cycle_boundaries=boundaries,
    )


def split_by_mask(
    series: RotationSeries,
    mask: ActivityMask,
) -> tuple[SegmentSeries, SegmentSeries]:
    """Partition a series into (high, low) concatenations, order preserved."""
    if series.start_rotation < mask.start_rotation or series.end_rotation > mask.end_rotation:
        raise AlignmentError(
            f"mask [{mask.start_rotation}, {mask.end_rotation}] does not cover "
            f"series [{series.start_rotation}, {series.end_rotation}]"
        )
    rots = series.rotations()
    high_sel = np.array(
        [mask.label_of(int(r)) is Activity.HIGH for r in rots], dtype=bool
    )
    high = SegmentSeries(series.values[high_sel], rots[high_sel], label="high")
    low = SegmentSeries(series.values[~high_sel], rots[~high_sel], label="low")
    return high, low


def split_by_cycle(
    series: RotationSeries,
    mask: ActivityMask,
    first_cycle: int = 12,
) -> list[RotationSeries]:
    """Slice a series at cycle boundaries into contiguous per-cycle parts."""
    b = mask.cycle_boundaries
    if len(b) < 2:
        raise SegmentationError("mask carries no cycle boundaries")
    if series.start_rotation < b[0] or series.end_rotation >= b[-1]:
        raise AlignmentError(
            f"cycle boundaries [{b[0]}, {b[-1]}) do not cover series "
            f"[{series.start_rotation}, {series.end_rotation}]"
        )
    parts = []
    for j in range(len(b) - 1):
        lo = max(series.start_rotation, b[j])
        hi = min(series.end_rotation, b[j + 1] - 1)
        if hi < lo:
            continue
        part = series.slice_rotations(lo, hi)
        parts.append(replace(part, label=f"cycle{first_cycle + j}"))
    return parts
