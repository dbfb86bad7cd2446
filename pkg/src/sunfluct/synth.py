"""Deterministic synthetic signals used as ground-truth oracles.

Randomness comes from an explicitly specified counter-based generator
(SplitMix64) so fixtures are bit-identical across platforms and runs:

    state_i = (seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z = state_i;  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB;  z ^= z >> 31

Uniform doubles take the top 53 bits; normal deviates come from the
Box-Muller transform of consecutive uniform pairs. Composite signals sum
components, each drawn from a sub-seed derived by hashing the component's
canonical JSON, so the sum does not depend on listing order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.signal import lfilter

from .errors import AlignmentError, ParameterError
from .ingest import Hemisphere
from .timeseries import RotationSeries, SeriesKind

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = (1 << 64) - 1


def _splitmix64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """The SplitMix64 output stream as uint64, vectorized."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (np.uint64(seed & _MASK) + idx * np.uint64(_GAMMA)).astype(np.uint64)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_MIX1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_MIX2)
        z ^= z >> np.uint64(31)
    return z


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Uniform doubles in [0, 1) from the top 53 bits of the stream."""
    return (_splitmix64(seed, count, offset) >> np.uint64(11)) * 2.0**-53


def normals(seed: int, count: int) -> np.ndarray:
    """Standard normal deviates via Box-Muller on uniform pairs."""
    pairs = (count + 1) // 2
    u = _splitmix64(seed, 2 * pairs)
    u1 = ((u[0::2] >> np.uint64(11)) + np.uint64(1)) * 2.0**-53  # (0, 1]
    u2 = (u[1::2] >> np.uint64(11)) * 2.0**-53  # [0, 1)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * math.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(theta)
    out[1::2] = r * np.sin(theta)
    return out[:count]


@dataclass(frozen=True)
class White:
    def params(self) -> dict:
        return {"kind": "white"}


@dataclass(frozen=True)
class AR1:
    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha < 1.0):
            raise ParameterError(f"AR(1) coefficient {self.alpha} outside [0, 1)")

    def params(self) -> dict:
        return {"kind": "ar1", "alpha": self.alpha}


@dataclass(frozen=True)
class Sine:
    period: float
    amplitude: float = 1.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ParameterError(f"sine period must be positive, got {self.period}")

    def params(self) -> dict:
        return {
            "kind": "sine",
            "period": self.period,
            "amplitude": self.amplitude,
            "phase": self.phase,
        }


@dataclass(frozen=True)
class PulseTrain:
    """Raised-cosine pulses recurring about once per period.

    Inter-pulse intervals are period plus Gaussian noise, so pulse phase
    diffuses: the lag-one-period correlation stays strong while higher
    multiples wash out, which is what quasi-periodic (rather than
    strictly harmonic) behavior looks like. Each pulse spans
    +-pulse_width samples with a smooth cosine profile; an optional
    envelope (one value per output sample) scales each pulse by the
    envelope value at its center.
    """

    period: float
    jitter_std: float = 0.0
    pulse_width: float = 3.0
    amplitude_envelope: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.period <= 0:
            raise ParameterError(f"pulse period must be positive, got {self.period}")
        if self.jitter_std < 0:
            raise ParameterError("pulse jitter cannot be negative")
        if self.pulse_width <= 0:
            raise ParameterError("pulse width must be positive")

    def params(self) -> dict:
        return {
            "kind": "pulse_train",
            "period": self.period,
            "jitter_std": self.jitter_std,
            "pulse_width": self.pulse_width,
            "amplitude_envelope": (
                None if self.amplitude_envelope is None else list(self.amplitude_envelope)
            ),
        }


@dataclass(frozen=True)
class Composite:
    components: tuple["SignalKind", ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ParameterError("composite signal needs at least one component")

    def params(self) -> dict:
        return {"kind": "composite", "components": [c.params() for c in self.components]}


SignalKind = Union[White, AR1, Sine, PulseTrain, Composite]

_KIND_NAMES = {
    "white": White,
    "ar1": AR1,
    "sine": Sine,
    "pulse_train": PulseTrain,
    "composite": Composite,
}


def _kind_from_params(params: dict) -> SignalKind:
    name = params.get("kind")
    if name not in _KIND_NAMES:
        raise ParameterError(f"unknown signal kind {name!r}")
    body = {k: v for k, v in params.items() if k != "kind"}
    if name == "composite":
        return Composite(tuple(_kind_from_params(p) for p in body["components"]))
    if name == "pulse_train" and body.get("amplitude_envelope") is not None:
        body["amplitude_envelope"] = tuple(body["amplitude_envelope"])
    return _KIND_NAMES[name](**body)


@dataclass(frozen=True)
class SynthSpec:
    length: int
    seed: int
    kind: SignalKind

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ParameterError(f"length must be positive, got {self.length}")
        if not (0 <= self.seed < 1 << 64):
            raise ParameterError("seed must fit in 64 bits")

    def to_json(self) -> str:
        return json.dumps(
            {"length": self.length, "seed": self.seed, "kind": self.kind.params()},
            indent=2,
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        data = json.loads(text)
        return cls(length=data["length"], seed=data["seed"], kind=_kind_from_params(data["kind"]))


def _subseed(master: int, component: SignalKind) -> int:
    digest = hashlib.sha256(
        json.dumps(component.params(), sort_keys=True).encode()
    ).digest()
    return (master ^ int.from_bytes(digest[:8], "big")) & _MASK


def _render(kind: SignalKind, length: int, seed: int) -> np.ndarray:
    if isinstance(kind, White):
        return normals(seed, length)
    if isinstance(kind, AR1):
        noise = normals(seed, length)
        noise[0] /= math.sqrt(1.0 - kind.alpha**2)  # stationary start
        return lfilter([1.0], [1.0, -kind.alpha], noise)
    if isinstance(kind, Sine):
        i = np.arange(length)
        return kind.amplitude * np.sin(2.0 * math.pi * i / kind.period + kind.phase)
    if isinstance(kind, PulseTrain):
        base = int(length / kind.period) + 2
        # slack for cumulative timing drift (4 sigma of the random walk)
        slack = int(math.ceil(4.0 * kind.jitter_std * math.sqrt(base) / kind.period)) + 1
        n_pulses = base + slack
        jitter = (
            kind.jitter_std * normals(seed, n_pulses)
            if kind.jitter_std > 0
            else np.zeros(n_pulses)
        )
        centers = 0.5 * kind.period + np.cumsum(np.full(n_pulses, kind.period) + jitter) - kind.period
        out = np.zeros(length)
        t = np.arange(length, dtype=np.float64)
        env = (
            np.asarray(kind.amplitude_envelope, dtype=np.float64)
            if kind.amplitude_envelope is not None
            else None
        )
        if env is not None and env.size != length:
            raise AlignmentError(
                f"amplitude envelope length {env.size} does not match signal length {length}"
            )
        for c in centers:
            near = np.abs(t - c) <= kind.pulse_width
            if not near.any():
                continue
            amp = 1.0
            if env is not None:
                amp = float(env[min(max(int(round(c)), 0), length - 1)])
            out[near] += amp * 0.5 * (
                1.0 + np.cos(math.pi * (t[near] - c) / kind.pulse_width)
            )
        return out
    if isinstance(kind, Composite):
        total = np.zeros(length)
        for comp in sorted(kind.components, key=lambda c: json.dumps(c.params(), sort_keys=True)):
            total += _render(comp, length, _subseed(seed, comp))
        return total
    raise ParameterError(f"unknown signal kind {type(kind).__name__}")


def generate(
    spec: SynthSpec,
    start_rotation: int = 0,
    hemisphere: Hemisphere = Hemisphere.NORTH,
    series_kind: SeriesKind = SeriesKind.FLUCTUATION,
) -> RotationSeries:
    """Render a spec to a rotation series; same spec, same bits, always."""
    values = _render(spec.kind, spec.length, spec.seed)
    return RotationSeries(
        start_rotation=start_rotation,
        values=values,
        kind=series_kind,
        hemisphere=hemisphere,
        label="synth",
    )


def make_synthetic_dataset(
    out_dir,
    seed: int = 2024,
    n_cycles: int = 3,
    months_per_cycle: int = 132,
    start_year: int = 1900,
    pulse_period: float = 10.0,
    pulse_exponent: float = 0.7,
) -> tuple[str, str]:
    """Write a paired daily-area/monthly-Wolf dataset with known structure.

    Activity follows a squared sine with minima every months_per_cycle
    months; on top of it, rotation-scale raised-cosine pulses recur every
    pulse_period rotations with amplitude growing as activity**exponent.
    Returns (daily_csv_path, wolf_csv_path). Every day is observed, so
    rotation means recover the constructed series exactly.
    """
    from datetime import date as _date
    from datetime import timedelta as _timedelta
    from pathlib import Path as _Path

    from .ingest import CarringtonCalendar

    out = _Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cal = CarringtonCalendar()

    first_min = 18
    n_months = first_min + n_cycles * months_per_cycle + first_min + 1

    def wolf_value(m: float) -> float:
        return 10.0 + 90.0 * math.sin(math.pi * (m - first_min) / months_per_cycle) ** 2

    wolf_lines = ["year,month,wolf"]
    months = []
    y, mo = start_year, 1
    for m in range(n_months):
        months.append((y, mo))
        wolf_lines.append(f"{y},{mo},{wolf_value(m):.4f}")
        mo += 1
        if mo > 12:
            y, mo = y + 1, 1
    wolf_path = out / "monthly_wolf.csv"
    wolf_path.write_text("\n".join(wolf_lines) + "\n")

    # Daily span: keep a 12-month margin inside the Wolf record so every
    # rotation midpoint lands in a month with a valid smoothed value.
    first_day = _date(start_year + 1, 1, 1)
    last_month = months[-13]
    last_day = _date(last_month[0], last_month[1], 28)
    start_ord = _date(start_year, 1, 1).toordinal()

    r0 = cal.rotation_of(first_day)
    r1 = cal.rotation_of(last_day)
    n_rot = r1 - r0 + 2

    def month_coordinate(rot: int) -> float:
        mid = cal.rotation_midpoint(rot)
        return (mid.date().toordinal() - start_ord) / 30.4369

    env = np.array(
        [100.0 + 900.0 * math.sin(math.pi * (month_coordinate(r0 + i) - first_min) / months_per_cycle) ** 2
         for i in range(n_rot)]
    )
    north_pulses = _render(
        PulseTrain(period=pulse_period, jitter_std=1.0, pulse_width=3.0), n_rot, seed
    )
    south_pulses = _render(
        PulseTrain(period=pulse_period, jitter_std=1.0, pulse_width=3.0), n_rot, seed + 1
    )
    fluct = {
        Hemisphere.NORTH: 0.6 * env**pulse_exponent * (north_pulses - north_pulses.mean()),
        Hemisphere.SOUTH: 0.6 * env**pulse_exponent * (south_pulses - south_pulses.mean()),
    }

    daily_lines = ["date,hemisphere,area"]
    day = first_day
    one = _timedelta(days=1)
    while day <= last_day:
        i = cal.rotation_of(day) - r0
        for hemi in (Hemisphere.NORTH, Hemisphere.SOUTH):
            area = max(0.0, env[i] + fluct[hemi][i])
            daily_lines.append(f"{day.isoformat()},{hemi.value},{area:.4f}")
        day += one
    daily_path = out / "daily_areas.csv"
    daily_path.write_text("\n".join(daily_lines) + "\n")
    return str(daily_path), str(wolf_path)


def heteroscedastic(
    f_spec: SynthSpec,
    envelope: RotationSeries,
    k: float,
) -> RotationSeries:
    """Base noise scaled elementwise by envelope**k (the stabilize oracle)."""
    if len(envelope) != f_spec.length:
        raise AlignmentError(
            f"envelope length {len(envelope)} does not match spec length {f_spec.length}"
        )
    env_valid = envelope.valid_mask()
    if np.any(envelope.values[env_valid] <= 0):
        raise ParameterError("envelope must be strictly positive where valid")
    base = _render(f_spec.kind, f_spec.length, f_spec.seed)
    values = np.where(env_valid, base * np.power(np.where(env_valid, envelope.values, 1.0), k), np.nan)
    return RotationSeries(
        start_rotation=envelope.start_rotation,
        values=values,
        kind=SeriesKind.FLUCTUATION,
        hemisphere=envelope.hemisphere,
        flags=envelope.flags.copy(),
        label="synth_hetero",
    )
