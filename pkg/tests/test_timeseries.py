"""Rotation binning, centered smoothing, fluctuation extraction, sign splits."""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from sunfluct.errors import AlignmentError, ParameterError
from sunfluct.ingest import CarringtonCalendar, DailyAreaRecord, Hemisphere
from sunfluct.timeseries import (
    Flag,
    RotationSeries,
    SeriesKind,
    fluctuations,
    rotation_means,
    smooth_centered,
    split_signs,
)
from sunfluct.synth import SynthSpec, White, generate

from conftest import mkseries

CAL = CarringtonCalendar()


def _days_of_rotation(rot):
    start = CAL.rotation_start(rot).date() + timedelta(days=1)
    out = []
    d = start
    while CAL.rotation_of(d) == rot:
        out.append(d)
        d += timedelta(days=1)
    return out


def test_rotation_means_exact():
    days = _days_of_rotation(700)
    recs = [DailyAreaRecord(d, Hemisphere.NORTH, float(i)) for i, d in enumerate(days)]
    series = rotation_means(recs, CAL, Hemisphere.NORTH)
    assert series.start_rotation == 700
    assert len(series) == 1
    expected = np.mean([float(i) for i in range(len(days))])
    assert series.values[0] == pytest.approx(expected, abs=1e-12)
    assert series.kind is SeriesKind.MEAN


def test_rotation_means_gap_flagged_missing():
    d1 = _days_of_rotation(700)[0]
    d3 = _days_of_rotation(702)[0]
    recs = [
        DailyAreaRecord(d1, Hemisphere.NORTH, 10.0),
        DailyAreaRecord(d3, Hemisphere.NORTH, 30.0),
    ]
    series = rotation_means(recs, CAL, Hemisphere.NORTH)
    assert len(series) == 3
    assert np.isnan(series.values[1])
    assert series.flags[1] & Flag.MISSING
    # single-day rotations are kept but marked low coverage
    assert series.flags[0] & Flag.LOW_COVERAGE
    assert series.values[0] == 10.0


def test_rotation_means_filters_hemisphere():
    d = _days_of_rotation(700)[0]
    recs = [
        DailyAreaRecord(d, Hemisphere.NORTH, 1.0),
        DailyAreaRecord(d, Hemisphere.SOUTH, 2.0),
    ]
    n = rotation_means(recs, CAL, Hemisphere.NORTH)
    s = rotation_means(recs, CAL, Hemisphere.SOUTH)
    assert n.values[0] == 1.0 and s.values[0] == 2.0


def test_mean_series_rejects_negative():
    with pytest.raises(ParameterError):
        mkseries([-1.0, 2.0], kind=SeriesKind.MEAN)


def test_smooth_oracle_window13():
    rng = np.random.default_rng(7)
    vals = rng.normal(size=50)
    s = smooth_centered(mkseries(vals), window=13)
    for i in range(6, 44):
        assert s.values[i] == pytest.approx(vals[i - 6:i + 7].mean(), abs=1e-12)
    assert np.all(np.isnan(s.values[:6])) and np.all(np.isnan(s.values[-6:]))
    assert np.all(s.flags[:6] & Flag.EDGE) and np.all(s.flags[-6:] & Flag.EDGE)


def test_smooth_linear_ramp_identity():
    vals = np.arange(40.0)
    s = smooth_centered(mkseries(vals), window=13)
    interior = slice(6, 34)
    np.testing.assert_allclose(s.values[interior], vals[interior], atol=1e-12)


def test_smooth_sparse_window_flag():
    vals = np.arange(40.0)
    vals[20] = np.nan
    flags = np.zeros(40, dtype=np.uint8)
    flags[20] = Flag.MISSING
    s = smooth_centered(mkseries(vals, flags=flags), window=13)
    touched = [i for i in range(6, 34) if abs(i - 20) <= 6]
    for i in touched:
        assert s.flags[i] & Flag.SPARSE_WINDOW
    assert not (s.flags[7] & Flag.SPARSE_WINDOW)


def test_smooth_even_window_rejected():
    with pytest.raises(ParameterError):
        smooth_centered(mkseries(np.arange(30.0)), window=12)


@given(
    hnp.arrays(np.float64, st.integers(15, 60),
               elements=st.floats(-1e3, 1e3, allow_nan=False)),
    st.floats(-50, 50, allow_nan=False),
    st.floats(0.1, 10, allow_nan=False),
)
def test_smooth_affine_commutation(vals, b, a):
    base = smooth_centered(mkseries(vals), window=7)
    mapped = smooth_centered(mkseries(a * vals + b), window=7)
    ok = ~np.isnan(base.values)
    np.testing.assert_allclose(mapped.values[ok], a * base.values[ok] + b,
                               atol=1e-9 * max(1.0, abs(a), abs(b)))


def test_fluctuations_definition():
    mean = mkseries(np.arange(30.0) + 5, kind=SeriesKind.MEAN)
    sm = smooth_centered(mean, window=13)
    f = fluctuations(mean, sm)
    ok = f.valid_mask()
    np.testing.assert_allclose(f.values[ok], (mean.values - sm.values)[ok], atol=1e-12)
    assert f.kind is SeriesKind.FLUCTUATION


def test_fluctuations_alignment_required():
    a = mkseries(np.arange(30.0), start=100)
    b = mkseries(np.arange(30.0), start=101)
    with pytest.raises(AlignmentError):
        fluctuations(a, b)
    c = mkseries(np.arange(30.0), hemisphere=Hemisphere.SOUTH)
    with pytest.raises(AlignmentError):
        fluctuations(a, c)


def test_fluctuation_interior_mean_small():
    """Stationary noise: mean of F over the interior is statistically near 0."""
    ser = generate(SynthSpec(length=600, seed=11, kind=White()), start_rotation=50)
    mean = ser.with_values(ser.values + 100.0, kind=SeriesKind.MEAN)
    sm = smooth_centered(mean, window=13)
    f = fluctuations(mean, sm)
    vals = f.valid_values()
    assert abs(vals.mean()) <= 2 * vals.std(ddof=1) / np.sqrt(vals.size)


@given(
    hnp.arrays(np.float64, st.integers(2, 80),
               elements=st.floats(-1e6, 1e6, allow_nan=False)),
)
def test_split_identities(vals):
    parts = split_signs(mkseries(vals))
    np.testing.assert_array_equal(parts.f_plus.values + parts.f_minus.values, vals)
    assert np.all(parts.f_plus.values * parts.f_minus.values == 0.0)


def test_split_tie_goes_to_minus():
    parts = split_signs(mkseries([0.0, 1.0, -2.0]))
    assert parts.f_plus.values[0] == 0.0
    assert parts.f_minus.values[0] == 0.0
    assert parts.f_plus.values[1] == 1.0
    assert parts.f_minus.values[2] == -2.0


def test_split_preserves_invalid():
    flags = np.array([0, Flag.MISSING, 0], dtype=np.uint8)
    parts = split_signs(mkseries([1.0, np.nan, -1.0], flags=flags))
    assert np.isnan(parts.f_plus.values[1]) and np.isnan(parts.f_minus.values[1])


def test_split_rejects_mean_kind():
    with pytest.raises(ParameterError):
        split_signs(mkseries([1.0, 2.0], kind=SeriesKind.MEAN))


def test_csv_roundtrip():
    flags = np.array([0, Flag.MISSING, Flag.LOW_COVERAGE], dtype=np.uint8)
    s = mkseries([1.5, np.nan, 3.25], start=205, flags=flags, label="demo")
    text = s.to_csv()
    back = RotationSeries.from_csv(text, kind=s.kind, hemisphere=s.hemisphere, label="demo")
    assert back.start_rotation == 205
    np.testing.assert_array_equal(back.flags, s.flags)
    np.testing.assert_array_equal(np.isnan(back.values), np.isnan(s.values))
    np.testing.assert_allclose(back.values[[0, 2]], s.values[[0, 2]])


def test_slice_and_index():
    s = mkseries(np.arange(10.0), start=100)
    sub = s.slice_rotations(103, 105)
    assert sub.start_rotation == 103
    np.testing.assert_array_equal(sub.values, [3.0, 4.0, 5.0])
    assert s.index_of(107) == 7
    with pytest.raises(AlignmentError):
        s.index_of(99)
