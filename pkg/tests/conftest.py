"""Shared fixtures: synthetic dataset, pipeline result, series builders."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sunfluct.ingest import Hemisphere
from sunfluct.pipeline import AnalysisConfig, run
from sunfluct.synth import make_synthetic_dataset
from sunfluct.timeseries import RotationSeries, SeriesKind

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def mkseries(values, start=100, kind=SeriesKind.FLUCTUATION,
             hemisphere=Hemisphere.NORTH, flags=None, label=""):
    return RotationSeries(
        start_rotation=start,
        values=np.asarray(values, dtype=float),
        kind=kind,
        hemisphere=hemisphere,
        flags=flags,
        label=label,
    )


@pytest.fixture(scope="session")
def synth_dataset(tmp_path_factory):
    d = tmp_path_factory.mktemp("dataset")
    make_synthetic_dataset(d, seed=2024)
    return d


@pytest.fixture(scope="session")
def pipeline_result(synth_dataset, tmp_path_factory):
    out = tmp_path_factory.mktemp("pipeline_out")
    cfg = AnalysisConfig(
        daily_areas=synth_dataset / "daily_areas.csv",
        monthly_wolf=synth_dataset / "monthly_wolf.csv",
        out_dir=out,
        first_cycle=1,
        make_plots=False,
    )
    return run(cfg)
