"""End-to-end analysis orchestration.

run() takes parsed configuration, ingests the daily-area and monthly-Wolf
inputs, builds per-rotation series, fits and applies the variance
stabilization, segments by activity and by cycle, and computes the ACF
and wavelet diagnostics for every cycle and series family. Results land
in a deterministic JSON report plus CSV sidecars; emit_plots() renders
the SVG figures afterwards.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .acfspec import (
    AcfResult,
    acf,
    acf_bounds,
    acf_seam_aware,
    compare_acfs,
    decrease_statistic,
    find_peaks,
    global_max_lag,
)
from .errors import ConfigError, InsufficientDataError, SunfluctError
from .ingest import (
    CarringtonCalendar,
    FixedWidthFormat,
    Hemisphere,
    month_midpoint,
    parse_daily_areas,
    parse_monthly_wolf,
)
from .segment import (
    ActivityMask,
    activity_mask,
    cycle_minima,
    smooth_wolf,
    split_by_cycle,
    split_by_mask,
)
from .stabilize import (
    DEFAULT_WINDOW_CANDIDATES,
    select_u,
    stabilize,
    stationarity_report,
)
from .timeseries import (
    RotationSeries,
    fluctuations,
    rotation_means,
    smooth_centered,
    split_signs,
)
from .waveletspec import (
    N_SCALES,
    SCALE_MIN,
    SCALE_STEP,
    WaveletSpectrum,
    acf_wavelet_agreement,
    global_spectrum,
    morlet_cwt,
    red_noise_significance,
    significant_extents,
)

#: Series families analyzed per hemisphere, in report order.
FAMILIES = ("fluct", "fluct_pos", "fluct_neg", "stab", "stab_pos", "stab_neg")

#: Family pairs for the original-vs-stabilized ACF decrease statistic.
DECREASE_PAIRS = (("fluct", "stab"), ("fluct_pos", "stab_pos"), ("fluct_neg", "stab_neg"))


@dataclass(frozen=True)
class AnalysisConfig:
    daily_areas: Path
    monthly_wolf: Path
    out_dir: Path
    fixed_width: Path | None = None
    wolf_value_column: int | None = None
    hemispheres: tuple[Hemisphere, ...] = (Hemisphere.NORTH, Hemisphere.SOUTH)
    u_candidates: tuple[int, ...] = DEFAULT_WINDOW_CANDIDATES
    max_lag: int = 40
    peak_band: tuple[int, int] = (7, 13)
    scale_min: float = SCALE_MIN
    scale_step: float = SCALE_STEP
    n_scales: int = N_SCALES
    level: float = 0.95
    first_cycle: int = 12
    smooth_window: int = 13
    make_plots: bool = True

    def validate(self) -> None:
        if not (0.5 < self.level < 1.0):
            raise ConfigError(f"significance level {self.level} outside (0.5, 1)")
        if self.max_lag < 2:
            raise ConfigError(f"max_lag must be at least 2, got {self.max_lag}")
        if not self.hemispheres:
            raise ConfigError("no hemisphere selected")
        if self.peak_band[0] < 1 or self.peak_band[0] > self.peak_band[1]:
            raise ConfigError(f"bad peak band {self.peak_band}")
        for p, name in ((self.daily_areas, "daily areas"), (self.monthly_wolf, "monthly wolf")):
            if not Path(p).is_file():
                raise ConfigError(f"{name} input not found: {p}")
        try:
            Path(self.out_dir).mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {self.out_dir}: {exc}") from exc

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Path):
                v = str(v)
            elif isinstance(v, tuple):
                v = [x.value if isinstance(x, Hemisphere) else x for x in v]
            out[f.name] = v
        return out


_CONFIG_KEYS = {f.name for f in fields(AnalysisConfig)}


def config_from_file(path: str | Path, overrides: dict | None = None) -> AnalysisConfig:
    """Read key = value lines; explicit overrides win over file values."""
    raw: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key] = value
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(raw)


def build_config(raw: dict) -> AnalysisConfig:
    """Coerce a loose string/value mapping into a validated config."""
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for required in ("daily_areas", "monthly_wolf", "out_dir"):
        if required not in raw or raw[required] in (None, ""):
            raise ConfigError(f"missing required config key {required}")

    def _ints(v) -> tuple[int, ...]:
        if isinstance(v, (list, tuple)):
            return tuple(int(x) for x in v)
        return tuple(int(x) for x in str(v).split(",") if x.strip())

    kwargs: dict = {
        "daily_areas": Path(raw["daily_areas"]),
        "monthly_wolf": Path(raw["monthly_wolf"]),
        "out_dir": Path(raw["out_dir"]),
    }
    try:
        if raw.get("fixed_width"):
            kwargs["fixed_width"] = Path(raw["fixed_width"])
        if raw.get("wolf_value_column") is not None:
            kwargs["wolf_value_column"] = int(raw["wolf_value_column"])
        if raw.get("hemispheres"):
            v = raw["hemispheres"]
            names = v.split(",") if isinstance(v, str) else v
            kwargs["hemispheres"] = tuple(
                h if isinstance(h, Hemisphere) else Hemisphere.parse(str(h)) for h in names
            )
        if raw.get("u_candidates"):
            kwargs["u_candidates"] = _ints(raw["u_candidates"])
        for key, cast in (
            ("max_lag", int), ("scale_min", float), ("scale_step", float),
            ("n_scales", int), ("level", float), ("first_cycle", int),
            ("smooth_window", int),
        ):
            if raw.get(key) is not None:
                kwargs[key] = cast(raw[key])
        if raw.get("peak_band"):
            band = _ints(raw["peak_band"])
            if len(band) != 2:
                raise ConfigError(f"peak_band needs two integers, got {raw['peak_band']!r}")
            kwargs["peak_band"] = (band[0], band[1])
        if raw.get("make_plots") is not None:
            v = raw["make_plots"]
            kwargs["make_plots"] = v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes")
    except (ValueError, SunfluctError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    config = AnalysisConfig(**kwargs)
    config.validate()
    return config


@dataclass
class HemisphereArtifacts:
    """Computed objects for one hemisphere, kept for plotting and tests."""

    mean: RotationSeries
    smoothed: RotationSeries
    series: dict[str, RotationSeries]
    mask: ActivityMask
    acfs: dict[str, AcfResult] = field(default_factory=dict)
    segment_acfs: dict[str, AcfResult] = field(default_factory=dict)
    spectra: dict[str, WaveletSpectrum] = field(default_factory=dict)
    global_spectra: dict = field(default_factory=dict)


@dataclass
class AnalysisResult:
    report: dict
    artifacts: dict[str, HemisphereArtifacts]
    config: AnalysisConfig


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _stage(name: str):
    """Re-raise analysis errors with the failing stage prepended."""
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and isinstance(exc, SunfluctError):
                raise exc.__class__(f"[{name}] {exc}") from exc
            return False

    return _Ctx()


def _clip_span_to_mask_coverage(
    span: tuple[int, int],
    smoothed_wolf: np.ndarray,
    months: list[tuple[int, int]],
    cal: CarringtonCalendar,
) -> tuple[int, int]:
    """Shrink a rotation span until every midpoint month has a valid value."""
    valid_months = {
        months[i] for i in range(len(months)) if np.isfinite(smoothed_wolf[i])
    }

    def covered(rot: int) -> bool:
        mid = cal.rotation_midpoint(rot)
        return (mid.year, mid.month) in valid_months

    lo, hi = span
    while lo <= hi and not covered(lo):
        lo += 1
    while hi >= lo and not covered(hi):
        hi -= 1
    if hi < lo:
        raise InsufficientDataError("no rotation midpoint falls in a valid smoothed month")
    return lo, hi


def _analyze_hemisphere(
    records,
    cal: CarringtonCalendar,
    hemi: Hemisphere,
    smoothed_wolf: np.ndarray,
    months: list[tuple[int, int]],
    minima: list[int],
    config: AnalysisConfig,
    out: Path,
) -> tuple[dict, HemisphereArtifacts]:
    tag = hemi.name.lower()
    hemi_dir = out / tag

    with _stage(f"timeseries:{tag}"):
        mean_full = rotation_means(records, cal, hemi)
        boundaries = [cal.rotation_of_instant(month_midpoint(*months[i])) for i in minima]
        span = (max(mean_full.start_rotation, boundaries[0]),
                min(mean_full.end_rotation, boundaries[-1] - 1))
        if span[1] - span[0] < 10 * config.smooth_window:
            raise InsufficientDataError(
                f"analysis span {span} too short after clipping to cycle boundaries"
            )
        span = _clip_span_to_mask_coverage(span, smoothed_wolf, months, cal)
        mean = mean_full.slice_rotations(*span)
        smoothed = smooth_centered(mean, config.smooth_window)
        f = fluctuations(mean, smoothed)
        fset = split_signs(f)

    with _stage(f"stabilize:{tag}"):
        u_best, fit = select_u(f, smoothed, config.u_candidates)
        x = stabilize(f, smoothed, fit)
        xset = split_signs(x)
        stationarity = stationarity_report(x, u_best)

    with _stage(f"segment:{tag}"):
        mask = activity_mask(smoothed_wolf, months, span, cal, minima)
        high_seg, low_seg = split_by_mask(x, mask)

    series = {
        "fluct": f.with_values(f.values, label="fluct"),
        "fluct_pos": fset.f_plus.with_values(fset.f_plus.values, label="fluct_pos"),
        "fluct_neg": fset.f_minus.with_values(fset.f_minus.values, label="fluct_neg"),
        "stab": x.with_values(x.values, label="stab"),
        "stab_pos": xset.f_plus.with_values(xset.f_plus.values, label="stab_pos"),
        "stab_neg": xset.f_minus.with_values(xset.f_minus.values, label="stab_neg"),
    }
    art = HemisphereArtifacts(mean=mean, smoothed=smoothed, series=series, mask=mask)

    _write(hemi_dir / "mean.csv", mean.to_csv())
    _write(hemi_dir / "smoothed.csv", smoothed.to_csv())
    for name, s in series.items():
        _write(hemi_dir / f"{name}.csv", s.to_csv())
    _write(hemi_dir / "fit.json", fit.to_json())
    _write(hemi_dir / "stationarity.json", stationarity.to_json())
    _write(hemi_dir / "mask.csv", mask.to_csv())

    with _stage(f"acf-activity:{tag}"):
        m_high, m_low = len(high_seg.compact()[0]), len(low_seg.compact()[0])
        m_short = min(m_high, m_low)
        one_sigma, two_sigma = acf_bounds(m_short)
        activity_acfs: dict[str, AcfResult] = {}
        for label, seg in (("high", high_seg), ("low", low_seg)):
            plain = acf(seg, config.max_lag, series_id=f"{tag}_stab_{label}")
            seam = acf_seam_aware(seg, config.max_lag, series_id=f"{tag}_stab_{label}_seam")
            activity_acfs[label] = plain
            activity_acfs[f"{label}_seam"] = seam
            _write(hemi_dir / "acf" / f"activity_{label}.csv", plain.to_csv())
            _write(hemi_dir / "acf" / f"activity_{label}_seam.csv", seam.to_csv())
        exceedance = compare_acfs(activity_acfs["high"], activity_acfs["low"])
        exceedance_seam = compare_acfs(activity_acfs["high_seam"], activity_acfs["low_seam"])
        art.segment_acfs = activity_acfs

    cases = []
    with _stage(f"per-cycle:{tag}"):
        per_family_parts = {
            fam: {p.label: p for p in split_by_cycle(s, mask, config.first_cycle)}
            for fam, s in series.items()
        }
        cycle_labels = sorted(
            per_family_parts["fluct"], key=lambda lab: int(lab.removeprefix("cycle"))
        )
        for cyc in cycle_labels:
            row: dict = {"hemisphere": tag, "cycle": int(cyc.removeprefix("cycle"))}
            family_block: dict = {}
            for fam in FAMILIES:
                part = per_family_parts[fam].get(cyc)
                entry: dict = {}
                if part is None:
                    entry["error"] = "cycle slice empty"
                    family_block[fam] = entry
                    continue
                key = f"{cyc}_{fam}"
                try:
                    n_valid = int(part.valid_mask().sum())
                    lag_cap = min(config.max_lag, n_valid - 2)
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        result = acf(part, lag_cap, series_id=f"{tag}_{key}")
                    art.acfs[key] = result
                    band_hi = min(config.peak_band[1], lag_cap)
                    peaks = find_peaks(result, (config.peak_band[0], band_hi))
                    gmax = global_max_lag(result, (2, lag_cap))
                    spectrum = red_noise_significance(
                        morlet_cwt(part, config.scale_min, config.scale_step, config.n_scales),
                        config.level,
                    )
                    gspec = global_spectrum(spectrum, config.level)
                    art.spectra[key] = spectrum
                    art.global_spectra[key] = gspec
                    agreement = acf_wavelet_agreement(result, gspec, (config.peak_band[0], band_hi))
                    entry = {
                        "n_valid": n_valid,
                        "max_lag": lag_cap,
                        "band_peaks": [p.to_dict() for p in peaks],
                        "global_max": gmax.to_dict(),
                        "global_spectrum_peak_period": gspec.argmax_period(),
                        "acf_wavelet_agreement": agreement,
                    }
                    _write(hemi_dir / "acf" / f"{key}.csv", result.to_csv())
                    _write(hemi_dir / "spectra" / f"{key}_global.csv", gspec.to_csv())
                except SunfluctError as exc:
                    entry = {"error": f"{exc.__class__.__name__}: {exc}"}
                family_block[fam] = entry
            for f_fam, x_fam in DECREASE_PAIRS:
                f_res = art.acfs.get(f"{cyc}_{f_fam}")
                x_res = art.acfs.get(f"{cyc}_{x_fam}")
                if f_res is None or x_res is None:
                    continue
                cap = min(f_res.max_lag, x_res.max_lag, config.peak_band[1])
                family_block[x_fam]["decrease_vs_original"] = decrease_statistic(
                    f_res, x_res, (config.peak_band[0], cap)
                )
            row["families"] = family_block
            cases.append(row)

    extents_block = {}
    with _stage(f"wavelet-fullspan:{tag}"):
        for fam, s in series.items():
            try:
                spectrum = red_noise_significance(
                    morlet_cwt(s, config.scale_min, config.scale_step, config.n_scales),
                    config.level,
                )
                gspec = global_spectrum(spectrum, config.level)
                key = f"fullspan_{fam}"
                art.spectra[key] = spectrum
                art.global_spectra[key] = gspec
                exts = significant_extents(
                    spectrum, (float(config.peak_band[0]), float(config.peak_band[1])), mask
                )
                extents_block[fam] = [
                    {
                        "start_rotation": e.start_time,
                        "end_rotation": e.end_time,
                        "activity_labels": list(e.activity_labels),
                    }
                    for e in exts
                ]
                _write(hemi_dir / "spectra" / f"{key}.csv", spectrum.to_csv())
                _write(hemi_dir / "spectra" / f"{key}_global.csv", gspec.to_csv())
            except SunfluctError as exc:
                extents_block[fam] = [{"error": f"{exc.__class__.__name__}: {exc}"}]

    hemi_report = {
        "rotation_span": [span[0], span[1]],
        "n_rotations_span": span[1] - span[0] + 1,
        "n_rotations_valid_mean": int(mean.valid_mask().sum()),
        "n_interior_fluct": int(f.valid_mask().sum()),
        "stabilization_fit": {
            "u_best": u_best,
            "exponent": fit.exponent,
            "exponent_stderr": fit.exponent_stderr,
            "log_amplitude": fit.log_amplitude,
            "f_statistic": fit.f_statistic,
            "p_value": fit.p_value,
            "n_points": fit.n_points,
            "n_excluded_nonpositive": fit.n_excluded_nonpositive,
        },
        "stationarity": {
            "window": stationarity.window,
            "n_windows": len(stationarity.centers),
            "frac_means_in_1sigma": stationarity.frac_means_in_1sigma,
            "frac_stds_in_2sigma": stationarity.frac_stds_in_2sigma,
        },
        "activity_split": {
            "threshold": mask.threshold,
            "n_high": m_high,
            "n_low": m_low,
            "shortest_m": m_short,
            "one_sigma_bound": one_sigma,
            "two_sigma_bound": two_sigma,
            "exceedance_lags_high_vs_low": exceedance,
            "exceedance_lags_high_vs_low_seam_aware": exceedance_seam,
        },
        "cycle_boundaries": list(mask.cycle_boundaries),
        "significant_extents_band": extents_block,
    }
    return {"summary": hemi_report, "cases": cases}, art


def _aggregate_cases(all_cases: list[dict]) -> dict:
    """24-case style aggregates over every (hemisphere, cycle) row."""

    def collect(keys: tuple[str, ...], threshold: float, field_name: str) -> dict:
        values = []
        for row in all_cases:
            fams = row["families"]
            vals = [
                fams[k][field_name]
                for k in keys
                if k in fams and field_name in fams[k]
            ]
            if vals:
                values.append(max(vals))
        n_hit = sum(1 for v in values if v >= threshold)
        return {
            "n_cases": len(values),
            "n_hit": n_hit,
            "fraction": (n_hit / len(values)) if values else None,
        }

    aggregates = {
        "decrease_composite_ge_1sigma": collect(("stab", "stab_pos"), 1.0, "decrease_vs_original"),
        "decrease_negative_ge_1sigma": collect(("stab_neg",), 1.0, "decrease_vs_original"),
        "agreement": {},
    }
    for fam in FAMILIES:
        threshold = 0.8 if fam == "stab_neg" else 0.9
        values = [
            row["families"][fam]["acf_wavelet_agreement"]
            for row in all_cases
            if fam in row["families"] and "acf_wavelet_agreement" in row["families"][fam]
        ]
        n_hit = sum(1 for v in values if v >= threshold)
        aggregates["agreement"][fam] = {
            "threshold": threshold,
            "n_cases": len(values),
            "n_hit": n_hit,
            "fraction": (n_hit / len(values)) if values else None,
        }
    return aggregates


def run(config: AnalysisConfig) -> AnalysisResult:
    """Full analysis; deterministic report plus CSV sidecars on disk."""
    config.validate()
    out = Path(config.out_dir)

    with _stage("ingest"):
        fmt = None
        if config.fixed_width is not None:
            fmt = FixedWidthFormat.from_text(Path(config.fixed_width).read_text())
        with open(config.daily_areas, encoding="utf-8") as fh:
            parsed = parse_daily_areas(fh, fmt)
        with open(config.monthly_wolf, encoding="utf-8") as fh:
            wolf = parse_monthly_wolf(fh, value_column=config.wolf_value_column)

    cal = CarringtonCalendar()
    with _stage("segment"):
        smoothed_wolf = smooth_wolf(wolf)
        months = [(r.year, r.month) for r in wolf]
        minima = cycle_minima(smoothed_wolf)

    hemis: dict = {}
    artifacts: dict[str, HemisphereArtifacts] = {}
    all_cases: list[dict] = []
    for hemi in config.hemispheres:
        block, art = _analyze_hemisphere(
            parsed.records, cal, hemi, smoothed_wolf, months, minima, config, out
        )
        hemis[hemi.name.lower()] = block["summary"]
        all_cases.extend(block["cases"])
        artifacts[hemi.name.lower()] = art

    report = {
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "version": __version__,
        "config": config.to_dict(),
        "inputs": {
            "daily_areas_sha256": _sha256(Path(config.daily_areas)),
            "monthly_wolf_sha256": _sha256(Path(config.monthly_wolf)),
            "n_daily_records": len(parsed.records),
            "n_dropped_missing": parsed.dropped_missing,
            "n_malformed_lines": len(parsed.malformed),
            "n_wolf_months": len(wolf),
            "n_cycle_minima": len(minima),
        },
        "hemispheres": hemis,
        "cases": all_cases,
        "aggregates": _aggregate_cases(all_cases),
    }
    report = _jsonable(report)
    _write(out / "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write(out / "report.md", render_markdown(report))

    result = AnalysisResult(report=report, artifacts=artifacts, config=config)
    if config.make_plots:
        emit_plots(result)
    return result


def emit_plots(result: AnalysisResult) -> list[Path]:
    """Render ACF and wavelet SVGs for every computed cycle and family."""
    from .plots import plot_acf, plot_wavelet

    out = Path(result.config.out_dir)
    written: list[Path] = []
    for tag, art in result.artifacts.items():
        plot_dir = out / tag / "plots"
        plot_dir.mkdir(parents=True, exist_ok=True)
        for key, acf_result in art.acfs.items():
            path = plot_dir / f"acf_{key}.svg"
            try:
                plot_acf(acf_result, path, band=(2, acf_result.max_lag), title=f"{tag} {key}")
                written.append(path)
            except Exception:  # plot failures are logged, never fatal
                continue
        for label in ("high", "low"):
            if label in art.segment_acfs:
                path = plot_dir / f"acf_activity_{label}.svg"
                plot_acf(art.segment_acfs[label], path, title=f"{tag} activity {label}")
                written.append(path)
        for key, spectrum in art.spectra.items():
            gspec = art.global_spectra.get(key)
            if gspec is None:
                continue
            path = plot_dir / f"wavelet_{key}.svg"
            try:
                plot_wavelet(spectrum, gspec, path, title=f"{tag} {key}")
                written.append(path)
            except Exception:
                continue
    return written


def render_markdown(report: dict) -> str:
    """Readable summary of the headline numbers in a report."""
    lines = [
        "# Hemispheric sunspot-area fluctuation analysis",
        "",
        f"Version {report['version']}, generated {report['generated_at']}.",
        "",
        "## Inputs",
        "",
        f"- daily records: {report['inputs']['n_daily_records']} "
        f"(missing dropped: {report['inputs']['n_dropped_missing']}, "
        f"malformed: {report['inputs']['n_malformed_lines']})",
        f"- Wolf months: {report['inputs']['n_wolf_months']}; "
        f"cycle minima found: {report['inputs']['n_cycle_minima']}",
        "",
    ]
    for tag, block in sorted(report["hemispheres"].items()):
        fit = block["stabilization_fit"]
        stat = block["stationarity"]
        act = block["activity_split"]
        lines += [
            f"## Hemisphere: {tag}",
            "",
            f"- rotations: span {block['n_rotations_span']}, "
            f"valid means {block['n_rotations_valid_mean']}, "
            f"fluctuation interior {block['n_interior_fluct']}",
            f"- stabilization: window {fit['u_best']}, exponent "
            f"{fit['exponent']:.3f} +- {fit['exponent_stderr']:.3f} "
            f"(p = {fit['p_value']:.3g})",
            f"- stationarity: {stat['frac_means_in_1sigma']:.2f} of windowed means "
            f"in the 1-sigma band, {stat['frac_stds_in_2sigma']:.2f} of stds in the 2-sigma band",
            f"- activity split: {act['n_high']} high / {act['n_low']} low rotations; "
            f"shortest-segment two-sigma bound {act['two_sigma_bound']:.4f}",
            f"- high-vs-low ACF exceedance lags: {act['exceedance_lags_high_vs_low']}",
            "",
        ]
    agg = report["aggregates"]
    lines += [
        "## Aggregates over all (hemisphere, cycle) cases",
        "",
        f"- original-vs-stabilized ACF decrease >= 1 sigma (composite): "
        f"{agg['decrease_composite_ge_1sigma']['n_hit']} of "
        f"{agg['decrease_composite_ge_1sigma']['n_cases']} cases",
        f"- negative-fluctuation decrease >= 1 sigma: "
        f"{agg['decrease_negative_ge_1sigma']['n_hit']} of "
        f"{agg['decrease_negative_ge_1sigma']['n_cases']} cases",
        "- ACF/wavelet band agreement fractions:",
    ]
    for fam, entry in sorted(agg["agreement"].items()):
        frac = entry["fraction"]
        shown = "n/a" if frac is None else f"{frac:.2f}"
        lines.append(
            f"  - {fam}: {shown} at r >= {entry['threshold']} "
            f"({entry['n_hit']}/{entry['n_cases']})"
        )
    lines.append("")
    return "\n".join(lines)
