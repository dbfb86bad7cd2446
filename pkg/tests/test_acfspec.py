"""Autocorrelation estimation, significance bounds, peak detection."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from sunfluct.acfspec import (
    AcfResult,
    SignificanceClass,
    acf,
    acf_bounds,
    acf_seam_aware,
    compare_acfs,
    decrease_statistic,
    find_peaks,
    global_max_lag,
)
from sunfluct.errors import (
    DegenerateSeriesError,
    ParameterError,
    ShortSeriesWarning,
)
from sunfluct.segment import SegmentSeries
from sunfluct.synth import SynthSpec, White, generate

from conftest import mkseries


def direct_acf(x, max_lag):
    """O(N^2) reference: biased estimator, global mean, full denominator."""
    x = np.asarray(x, dtype=float)
    xc = x - x.mean()
    denom = np.sum(xc * xc)
    out = np.empty(max_lag + 1)
    for tau in range(max_lag + 1):
        out[tau] = np.sum(xc[: x.size - tau] * xc[tau:]) / denom
    out[0] = 1.0
    return out


def test_lag0_is_one():
    rng = np.random.default_rng(0)
    r = acf(rng.normal(size=500))
    assert r.c[0] == 1.0


def test_sine_global_max_at_period():
    x = np.sin(2 * np.pi * np.arange(400) / 10.0)
    r = acf(x)
    peak = global_max_lag(r, band=(2, 40))
    assert peak.lag == 10
    assert peak.value > 0.9


def test_fft_matches_direct_oracle():
    rng = np.random.default_rng(42)
    for _ in range(40):
        n = int(rng.integers(16, 1025))
        x = rng.normal(size=n)
        max_lag = min(40, n - 1)
        with pytest.warns(ShortSeriesWarning) if n < 4 * max_lag else _nullcontext():
            r = acf(x, max_lag=max_lag)
        np.testing.assert_allclose(r.c, direct_acf(x, max_lag), atol=1e-10)


class _nullcontext:
    def __enter__(self):
        return None

    def __exit__(self, *exc):
        return False


@given(
    hnp.arrays(np.float64, st.integers(170, 400),
               elements=st.floats(-100, 100, allow_nan=False)),
    st.floats(0.5, 20.0),
    st.floats(-50.0, 50.0),
)
def test_affine_invariance(x, a, b):
    # the identity only holds when the spread survives rounding of a*x + b
    assume(np.ptp(a * x) > 1e-6 * (1.0 + abs(b)))
    r1 = acf(x, max_lag=40)
    r2 = acf(a * x + b, max_lag=40)
    np.testing.assert_allclose(r1.c, r2.c, atol=1e-10)


def test_bounds_values():
    assert acf_bounds(4) == (0.5, 1.0)
    one, two = acf_bounds(100)
    assert one == pytest.approx(0.1) and two == pytest.approx(0.2)
    # the anchoring segment length: 2/sqrt(865) sits in the published band
    assert 0.063 <= acf_bounds(865)[1] <= 0.073
    with pytest.raises(ParameterError):
        acf_bounds(1)


def test_acf_errors():
    with pytest.raises(ParameterError):
        acf(np.arange(10.0), max_lag=40)
    with pytest.raises(DegenerateSeriesError):
        acf(np.full(300, 5.0))
    with pytest.warns(ShortSeriesWarning):
        acf(np.random.default_rng(1).normal(size=100), max_lag=40)


def test_white_noise_exceedance_rate():
    """|c_tau| crosses 2/sqrt(M) for roughly 5% of seeds at a fixed lag."""
    m, lag = 400, 7
    hits = 0
    seeds = 400
    for seed in range(seeds):
        ser = generate(SynthSpec(length=m, seed=seed, kind=White()))
        r = acf(ser, max_lag=10)
        if abs(r.c[lag]) > 2.0 / np.sqrt(m):
            hits += 1
    assert hits / seeds == pytest.approx(0.05, abs=0.03)


def _result(c, m=400, seam=False):
    c = np.asarray(c, dtype=float)
    return AcfResult(
        lags=np.arange(c.size),
        c=c,
        n_effective=m,
        sigma_bound=1.0 / np.sqrt(m),
        series_id="fixture",
        seam_aware=seam,
    )


def test_find_peaks_strict_interior():
    c = np.zeros(21)
    c[0] = 1.0
    c[9] = 0.30
    c[10] = 0.40
    c[11] = 0.30
    r = _result(c)
    peaks = find_peaks(r, band=(7, 13))
    assert [p.lag for p in peaks] == [10]
    assert peaks[0].significance_class is SignificanceClass.ABOVE_2SIGMA
    assert peaks[0].width_at_1sigma == 3  # lags 9..11 all above 1/sqrt(400)


def test_find_peaks_flat_band_no_interior_peak():
    c = np.zeros(21)
    c[0] = 1.0
    c[7:14] = 0.2  # plateau: no strict local maximum, no endpoint above neighbors
    r = _result(c)
    assert find_peaks(r, band=(7, 13)) == []


def test_find_peaks_endpoint_rule():
    c = np.zeros(21)
    c[0] = 1.0
    c[7] = 0.5  # band start is the maximum and exceeds the inward neighbor
    r = _result(c)
    peaks = find_peaks(r, band=(7, 13))
    assert [p.lag for p in peaks] == [7]


def test_find_peaks_band_validation():
    r = _result(np.zeros(21))
    with pytest.raises(ParameterError):
        find_peaks(r, band=(0, 13))
    with pytest.raises(ParameterError):
        find_peaks(r, band=(7, 30))


def test_classification_boundaries():
    c = np.zeros(21)
    c[0] = 1.0
    c[10] = 1.5 / np.sqrt(400)  # between 1 and 2 sigma
    peaks = find_peaks(_result(c), band=(7, 13))
    assert peaks[0].significance_class is SignificanceClass.BETWEEN_1_AND_2_SIGMA
    c[10] = 0.5 / np.sqrt(400)
    peaks = find_peaks(_result(c), band=(7, 13))
    assert peaks[0].significance_class is SignificanceClass.BELOW_1SIGMA
    assert peaks[0].width_at_1sigma == 0


def test_compare_acfs_thresholding():
    base = np.zeros(41)
    base[0] = 1.0
    other = base.copy()
    other[15] = 0.5  # way past 2*max(bounds) for m=400
    other[20] = 0.05  # below threshold 0.1
    diffs = compare_acfs(_result(base), _result(other))
    assert diffs == [15]
    with pytest.raises(ParameterError):
        compare_acfs(_result(base), _result(np.zeros(31)))


def test_compare_acfs_skips_lag0():
    a = _result(np.concatenate([[1.0], np.zeros(40)]))
    b_c = np.concatenate([[1.0], np.zeros(40)])
    b = _result(b_c, m=4)  # huge bounds; lag 0 identical anyway
    assert compare_acfs(a, b) == []


def test_decrease_statistic_values():
    f_c = np.zeros(41)
    f_c[0] = 1.0
    f_c[10] = 0.4
    x_c = f_c.copy()
    x_c[10] = 0.2
    sigma = 1.0 / np.sqrt(400)
    got = decrease_statistic(_result(f_c), _result(x_c), band=(7, 13))
    assert got == pytest.approx((0.4 - 0.2) / sigma)
    assert decrease_statistic(_result(f_c), _result(f_c)) == 0.0


def test_acf_on_rotation_series_uses_interior():
    vals = np.concatenate([[np.nan] * 3, np.sin(2 * np.pi * np.arange(300) / 10.0), [np.nan] * 2])
    r = acf(mkseries(vals), max_lag=40)
    assert r.n_effective == 300
    assert global_max_lag(r).lag == 10


def test_seam_aware_equals_plain_without_seams():
    rng = np.random.default_rng(5)
    vals = rng.normal(size=300)
    seg = SegmentSeries(vals, np.arange(300) + 50, label="contig")
    plain = acf(seg, max_lag=30)
    seamed = acf_seam_aware(seg, max_lag=30)
    np.testing.assert_allclose(plain.c, seamed.c, atol=1e-12)
    assert seamed.seam_aware


def test_seam_aware_drops_cross_products():
    rng = np.random.default_rng(6)
    a = rng.normal(size=150)
    b = rng.normal(size=150)
    rots = np.concatenate([np.arange(150), np.arange(500, 650)])
    seg = SegmentSeries(np.concatenate([a, b]), rots, label="two")
    r = acf_seam_aware(seg, max_lag=20)

    # direct oracle: per-block lagged sums over the global denominator
    x = np.concatenate([a, b])
    xc = x - x.mean()
    denom = np.sum(xc * xc)
    expected = np.zeros(21)
    for block in (xc[:150], xc[150:]):
        for tau in range(21):
            expected[tau] += np.sum(block[: block.size - tau] * block[tau:])
    expected /= denom
    expected[0] = 1.0
    np.testing.assert_allclose(r.c, expected, atol=1e-12)


def test_acf_csv_export():
    r = acf(np.random.default_rng(2).normal(size=300), max_lag=5)
    lines = r.to_csv().strip().splitlines()
    assert lines[0].startswith("lag,")
    assert len(lines) == 7
