"""Wolf smoothing, cycle minima, activity labeling, series partitioning."""

from __future__ import annotations

import numpy as np
import pytest

from sunfluct.errors import (
    AlignmentError,
    CoverageError,
    ParameterError,
    SegmentationError,
)
from sunfluct.ingest import CarringtonCalendar, MonthlyWolfRecord, month_midpoint
from sunfluct.segment import (
    Activity,
    ActivityMask,
    SegmentSeries,
    activity_mask,
    cycle_minima,
    smooth_wolf,
    split_by_cycle,
    split_by_mask,
)

from conftest import mkseries

CAL = CarringtonCalendar()


def _months(values, start=(1900, 1)):
    y, m = start
    recs = []
    for v in values:
        recs.append(MonthlyWolfRecord(y, m, float(v)))
        m += 1
        if m == 13:
            y, m = y + 1, 1
    return recs


def test_smooth_wolf_oracle():
    rng = np.random.default_rng(2)
    vals = rng.uniform(0, 100, size=30)
    recs = _months(vals)
    sm = smooth_wolf(recs)
    assert np.all(np.isnan(sm[:6])) and np.all(np.isnan(sm[-6:]))
    w = np.ones(13)
    w[0] = w[-1] = 0.5
    for i in range(6, 24):
        expected = np.sum(vals[i - 6 : i + 7] * w) / 12.0
        assert sm[i] == pytest.approx(expected, abs=1e-12)


def test_smooth_wolf_constant_passthrough():
    sm = smooth_wolf(_months(np.full(40, 55.0)))
    ok = ~np.isnan(sm)
    np.testing.assert_allclose(sm[ok], 55.0, atol=1e-12)


def test_smooth_wolf_too_short():
    with pytest.raises(ParameterError):
        smooth_wolf(_months(np.arange(12)))


def _two_valley(n=400, m1=60, m2=240):
    i = np.arange(n, dtype=float)
    return 40 + 0.01 * (i - m1) ** 2 * (i < 150) + 0.012 * (i - m2) ** 2 * (i >= 150)


def test_cycle_minima_two_valleys():
    x = _two_valley()
    mins = cycle_minima(x)
    assert len(mins) == 2
    assert abs(mins[0] - 60) <= 1 and abs(mins[1] - 240) <= 1


def test_cycle_minima_plateau_takes_earliest():
    x = np.empty(500)
    x[:100] = np.linspace(120, 41, 100)
    x[100:151] = 40.0  # flat valley floor: earliest month should win
    x[151:260] = np.linspace(41, 120, 109)
    x[260:300] = np.linspace(119, 46, 40)
    x[300:351] = 45.0
    x[351:] = np.linspace(46, 130, 149)
    assert cycle_minima(x) == [100, 300]


def test_cycle_minima_separation_keeps_deeper():
    n = 360
    x = 100 - 50 * np.exp(-((np.arange(n) - 150) ** 2) / 300.0)
    x -= 10 * np.exp(-((np.arange(n) - 200) ** 2) / 300.0)  # shallower dip nearby
    x += 60 * (np.abs(np.arange(n) - 40) < 1)  # noise spike elsewhere
    mins = cycle_minima(np.concatenate([x, x[::-1] + 5]))
    diffs = np.diff(mins)
    assert np.all(diffs >= 96)


def test_cycle_minima_single_valley_errors():
    x = 40 + 0.01 * (np.arange(200, dtype=float) - 100) ** 2
    with pytest.raises(SegmentationError):
        cycle_minima(x)


def _mask_fixture(wolf_values=None, n_months=400):
    if wolf_values is None:
        i = np.arange(n_months, dtype=float)
        wolf_values = 10 + 90 * np.sin(np.pi * (i - 18) / 132.0) ** 2
    recs = _months(wolf_values)
    sm = smooth_wolf(recs)
    months = [(r.year, r.month) for r in recs]
    mins = cycle_minima(sm)
    first = CAL.rotation_of_instant(
        month_midpoint(*months[mins[0]])
    )
    last_idx = mins[-1]
    last = CAL.rotation_of_instant(
        month_midpoint(*months[last_idx])
    ) - 1
    mask = activity_mask(sm, months, (first, last), CAL, minima=mins)
    return mask, sm, months, recs


def test_activity_threshold_is_mean():
    mask, sm, months, _ = _mask_fixture()
    finite = np.isfinite(sm)
    assert mask.threshold == pytest.approx(sm[finite].mean(), abs=1e-12)


def test_activity_tie_goes_low():
    # constant series: every month equals the threshold, nothing is High
    vals = np.full(300, 42.0)
    recs = _months(vals)
    sm = smooth_wolf(recs)
    months = [(r.year, r.month) for r in recs]
    first = CAL.rotation_of_instant(
        month_midpoint(1901, 1)
    )
    mask = activity_mask(sm, months, (first, first + 100), CAL)
    assert all(lab is Activity.LOW for lab in mask.labels)


def test_activity_relabel_stable_under_shift():
    mask1, sm, months, recs = _mask_fixture()
    shifted = [MonthlyWolfRecord(r.year, r.month, r.wolf + 25.0) for r in recs]
    sm2 = smooth_wolf(shifted)
    mins2 = cycle_minima(sm2)
    span = (mask1.start_rotation, mask1.end_rotation)
    mask2 = activity_mask(sm2, months, span, CAL, minima=mins2)
    assert mask2.labels == mask1.labels
    assert mask2.threshold == pytest.approx(mask1.threshold + 25.0, abs=1e-9)


def test_activity_coverage_error():
    vals = np.full(60, 42.0)
    recs = _months(vals)
    sm = smooth_wolf(recs)
    months = [(r.year, r.month) for r in recs]
    far_future = CAL.rotation_of_instant(
        month_midpoint(1950, 6)
    )
    with pytest.raises(CoverageError):
        activity_mask(sm, months, (far_future, far_future + 5), CAL)


def test_mask_boundary_spacing_validated():
    with pytest.raises(SegmentationError):
        ActivityMask(
            start_rotation=100,
            labels=(Activity.LOW,) * 10,
            threshold=1.0,
            cycle_boundaries=(100, 150),  # 50 rotations: too short for a cycle
        )
    with pytest.raises(SegmentationError):
        ActivityMask(
            start_rotation=100,
            labels=(Activity.LOW,) * 10,
            threshold=1.0,
            cycle_boundaries=(100, 300),  # 200 rotations: too long
        )


def test_split_by_mask_partitions():
    mask, _, _, _ = _mask_fixture()
    n = mask.end_rotation - mask.start_rotation + 1
    series = mkseries(np.arange(float(n)), start=mask.start_rotation)
    high, low = split_by_mask(series, mask)
    assert len(high) + len(low) == len(series)
    assert high.label == "high" and low.label == "low"
    merged = np.sort(np.concatenate([high.source_rotations, low.source_rotations]))
    np.testing.assert_array_equal(merged, series.rotations())


def test_split_by_mask_requires_coverage():
    mask, _, _, _ = _mask_fixture()
    series = mkseries(np.arange(10.0), start=mask.start_rotation - 5)
    with pytest.raises(AlignmentError):
        split_by_mask(series, mask)


def test_split_by_cycle_concatenates_to_original():
    mask, _, _, _ = _mask_fixture()
    b = mask.cycle_boundaries
    assert len(b) >= 2
    series = mkseries(
        np.arange(float(b[-1] - b[0])), start=b[0]
    )
    parts = split_by_cycle(series, mask, first_cycle=5)
    assert sum(len(p) for p in parts) == len(series)
    rebuilt = np.concatenate([p.values for p in parts])
    np.testing.assert_array_equal(rebuilt, series.values)
    assert parts[0].label == "cycle5"
    assert parts[1].label == "cycle6"


def test_segment_series_seams_and_compact():
    vals = np.array([1.0, 2.0, np.nan, 4.0])
    rots = np.array([10, 11, 15, 16])
    seg = SegmentSeries(vals, rots, label="demo")
    assert seg.seams == (2,)
    compact_vals, compact_seams = seg.compact()
    np.testing.assert_array_equal(compact_vals, [1.0, 2.0, 4.0])
    assert compact_seams == (2,)
