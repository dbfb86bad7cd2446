"""Command-line interface.

Subcommands: ingest (validate and normalize inputs), fit (stabilization
fit only), analyze (full pipeline with reports and plots), synth
(deterministic synthetic data), report (re-render markdown from a JSON
report). Exit codes: 0 success, 2 input error, 3 analysis error,
4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, InputError, SunfluctError


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as configuration errors."""

    def error(self, message):  # noqa: A003 - argparse API
        raise ConfigError(message)


def _hemisphere_args(args) -> tuple:
    from .ingest import Hemisphere

    selected = []
    if getattr(args, "north", False):
        selected.append(Hemisphere.NORTH)
    if getattr(args, "south", False):
        selected.append(Hemisphere.SOUTH)
    return tuple(selected) or (Hemisphere.NORTH, Hemisphere.SOUTH)


def _add_input_flags(p: _Parser, with_wolf: bool = True, required: bool = True) -> None:
    p.add_argument("--daily", required=required,
                   help="daily hemispheric areas (CSV or fixed-width)")
    if with_wolf:
        p.add_argument("--wolf", required=required,
                       help="monthly Wolf numbers (CSV or columns)")
    p.add_argument("--fixed-width", help="fixed-width layout descriptor for --daily")
    p.add_argument("--wolf-value-column", type=int, help="0-based value column in the Wolf file")
    p.add_argument("--north", action="store_true", help="analyze the northern hemisphere")
    p.add_argument("--south", action="store_true", help="analyze the southern hemisphere")


def _parse_inputs(args, need_wolf: bool = True):
    from .ingest import FixedWidthFormat, parse_daily_areas, parse_monthly_wolf

    fmt = None
    if args.fixed_width:
        fmt = FixedWidthFormat.from_text(Path(args.fixed_width).read_text())
    try:
        with open(args.daily, encoding="utf-8") as fh:
            parsed = parse_daily_areas(fh, fmt)
    except OSError as exc:
        raise InputError(f"cannot read daily areas: {exc}") from exc
    wolf = None
    if need_wolf and getattr(args, "wolf", None):
        try:
            with open(args.wolf, encoding="utf-8") as fh:
                wolf = parse_monthly_wolf(fh, value_column=args.wolf_value_column)
        except OSError as exc:
            raise InputError(f"cannot read Wolf numbers: {exc}") from exc
    return parsed, wolf


def _cmd_ingest(args) -> int:
    from .ingest import CarringtonCalendar, serialize_daily_areas
    from .timeseries import rotation_means

    parsed, wolf = _parse_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "daily_areas.csv").write_text(serialize_daily_areas(parsed.records))
    cal = CarringtonCalendar()
    for hemi in _hemisphere_args(args):
        series = rotation_means(parsed.records, cal, hemi)
        (out / f"rotation_means_{hemi.name.lower()}.csv").write_text(series.to_csv())
        print(
            f"{hemi.name.lower()}: rotations {series.start_rotation}-{series.end_rotation}, "
            f"{int(series.valid_mask().sum())} valid of {len(series)}"
        )
    print(
        f"daily records: {len(parsed.records)} kept, {parsed.dropped_missing} missing dropped, "
        f"{len(parsed.malformed)} malformed"
    )
    if wolf:
        print(f"wolf months: {len(wolf)} ({wolf[0].year}-{wolf[0].month:02d} .. "
              f"{wolf[-1].year}-{wolf[-1].month:02d})")
    return 0


def _cmd_fit(args) -> int:
    from .ingest import CarringtonCalendar
    from .stabilize import fit_amplitude_model, select_u
    from .timeseries import fluctuations, rotation_means, smooth_centered

    parsed, _ = _parse_inputs(args, need_wolf=False)
    cal = CarringtonCalendar()
    results = {}
    for hemi in _hemisphere_args(args):
        mean = rotation_means(parsed.records, cal, hemi)
        smoothed = smooth_centered(mean, args.smooth_window)
        f = fluctuations(mean, smoothed)
        if args.u is not None:
            fit = fit_amplitude_model(f, smoothed, args.u)
            u_best = args.u
        else:
            candidates = tuple(int(x) for x in args.u_candidates.split(","))
            u_best, fit = select_u(f, smoothed, candidates)
        results[hemi.name.lower()] = {"u_best": u_best, **json.loads(fit.to_json())}
    text = json.dumps(results, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_analyze(args) -> int:
    from .pipeline import build_config, config_from_file, run

    overrides = {
        "daily_areas": args.daily,
        "monthly_wolf": args.wolf,
        "out_dir": args.out,
        "fixed_width": args.fixed_width,
        "wolf_value_column": args.wolf_value_column,
        "hemispheres": ",".join(h.value for h in _hemisphere_args(args))
        if (args.north or args.south)
        else None,
        "u_candidates": args.u_candidates,
        "max_lag": args.max_lag,
        "level": args.level,
        "scale_min": args.scale_min,
        "scale_step": args.scale_step,
        "n_scales": args.n_scales,
        "first_cycle": args.first_cycle,
        "smooth_window": args.smooth_window,
        "make_plots": (False if args.no_plots else None),
    }
    if args.config:
        config = config_from_file(args.config, overrides)
    else:
        missing = [k for k in ("daily_areas", "monthly_wolf", "out_dir") if not overrides.get(k)]
        if missing:
            raise ConfigError(f"missing required flags: {', '.join(missing)}")
        config = build_config({k: v for k, v in overrides.items() if v is not None})
    result = run(config)
    report = result.report
    print(f"report written to {Path(config.out_dir) / 'report.json'}")
    for tag, block in sorted(report["hemispheres"].items()):
        fit = block["stabilization_fit"]
        print(
            f"{tag}: u_best={fit['u_best']} exponent={fit['exponent']:.3f} "
            f"(p={fit['p_value']:.3g}); "
            f"2-sigma bound {block['activity_split']['two_sigma_bound']:.4f}"
        )
    return 0


def _cmd_synth(args) -> int:
    from .synth import SynthSpec, generate, make_synthetic_dataset

    if args.dataset:
        daily, wolf = make_synthetic_dataset(
            args.out, seed=args.seed, n_cycles=args.cycles
        )
        print(f"daily areas: {daily}")
        print(f"monthly wolf: {wolf}")
        return 0
    if not args.spec:
        raise ConfigError("synth needs either --dataset or --spec FILE")
    spec = SynthSpec.from_json(Path(args.spec).read_text())
    series = generate(spec)
    out = Path(args.out)
    if out.suffix != ".csv":
        out.mkdir(parents=True, exist_ok=True)
        out = out / "synth_series.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(series.to_csv())
    print(f"series written to {out}")
    return 0


def _cmd_report(args) -> int:
    from .pipeline import render_markdown

    try:
        report = json.loads(Path(args.report).read_text())
    except OSError as exc:
        raise InputError(f"cannot read report: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"report is not valid JSON: {exc}") from exc
    text = render_markdown(report)
    if args.out:
        Path(args.out).write_text(text)
        print(f"markdown written to {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="sunfluct",
        description="Mid-term periodicity analysis of hemispheric sunspot areas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse inputs and write normalized CSVs")
    _add_input_flags(p_ingest)
    p_ingest.add_argument("--out", required=True, help="output directory")
    p_ingest.set_defaults(func=_cmd_ingest)

    p_fit = sub.add_parser("fit", help="fit the variance-stabilization power law")
    _add_input_flags(p_fit, with_wolf=False)
    p_fit.add_argument("--u", type=int, help="fixed local window (odd)")
    p_fit.add_argument("--u-candidates", default="7,9,11,13,15,17",
                       help="comma-separated odd windows to select from")
    p_fit.add_argument("--smooth-window", type=int, default=13)
    p_fit.add_argument("--out", help="write the fit JSON here as well as stdout")
    p_fit.set_defaults(func=_cmd_fit)

    p_an = sub.add_parser("analyze", help="run the full analysis pipeline")
    _add_input_flags(p_an, required=False)
    p_an.add_argument("--config", help="key = value config file; flags override it")
    p_an.add_argument("--out", help="output directory")
    p_an.add_argument("--u-candidates", help="comma-separated odd windows")
    p_an.add_argument("--max-lag", type=int)
    p_an.add_argument("--level", type=float)
    p_an.add_argument("--scale-min", type=float)
    p_an.add_argument("--scale-step", type=float)
    p_an.add_argument("--n-scales", type=int)
    p_an.add_argument("--first-cycle", type=int)
    p_an.add_argument("--smooth-window", type=int)
    p_an.add_argument("--no-plots", action="store_true", help="skip SVG emission")
    p_an.set_defaults(func=_cmd_analyze)

    p_sy = sub.add_parser("synth", help="generate deterministic synthetic data")
    p_sy.add_argument("--dataset", action="store_true",
                      help="write a paired daily/Wolf dataset with known pulses")
    p_sy.add_argument("--spec", help="signal spec JSON for a single series")
    p_sy.add_argument("--seed", type=int, default=2024)
    p_sy.add_argument("--cycles", type=int, default=3)
    p_sy.add_argument("--out", required=True)
    p_sy.set_defaults(func=_cmd_synth)

    p_re = sub.add_parser("report", help="render markdown from a JSON report")
    p_re.add_argument("--report", required=True, help="path to report.json")
    p_re.add_argument("--out", help="markdown output path (default stdout)")
    p_re.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return exc.exit_code
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SunfluctError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
