"""Mid-term periodicity analysis of hemispheric sunspot areas.

The library bins daily hemispheric sunspot areas into Carrington
rotations, extracts fluctuations about a 13-rotation running mean,
stabilizes their cycle-dependent variance with a fitted power law of the
smoothed activity level, segments time by solar-cycle phase and by
high/low activity, and searches for mid-term quasi-periodicities (most
prominently near 10 rotations) with autocorrelation functions and Morlet
wavelet spectra under red-noise significance testing.
"""

__version__ = "0.1.0"

from .errors import (
    AlignmentError,
    ConfigError,
    CoverageError,
    DegenerateSeriesError,
    FormatMismatchError,
    InputError,
    InsufficientDataError,
    ParameterError,
    SegmentationError,
    ShortSeriesWarning,
    SunfluctError,
)
from .ingest import (
    CarringtonCalendar,
    DailyAreaRecord,
    FixedWidthFormat,
    Hemisphere,
    MonthlyWolfRecord,
    ParseResult,
    parse_daily_areas,
    parse_monthly_wolf,
)
from .timeseries import (
    Flag,
    FluctuationSet,
    RotationSeries,
    SeriesKind,
    fluctuations,
    rotation_means,
    smooth_centered,
    split_signs,
)
from .stabilize import (
    StabilizationFit,
    StationarityReport,
    fit_amplitude_model,
    local_std,
    select_u,
    stabilize,
    stationarity_report,
)
from .segment import (
    Activity,
    ActivityMask,
    SegmentSeries,
    activity_mask,
    cycle_minima,
    smooth_wolf,
    split_by_cycle,
    split_by_mask,
)
from .acfspec import (
    AcfPeak,
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
from .waveletspec import (
    GlobalSpectrum,
    WaveletSpectrum,
    acf_wavelet_agreement,
    global_spectrum,
    morlet_cwt,
    red_noise_significance,
    significant_extents,
)
from .synth import (
    AR1,
    Composite,
    PulseTrain,
    Sine,
    SynthSpec,
    White,
    generate,
    heteroscedastic,
    make_synthetic_dataset,
)
from .pipeline import AnalysisConfig, AnalysisResult, build_config, emit_plots, run

__all__ = [name for name in dir() if not name.startswith("_")]
