"""Input parsing and Carrington-rotation date mapping.

Daily hemispheric sunspot areas arrive either as the canonical CSV
``date,hemisphere,area`` or as a fixed-width layout described by a small
text descriptor. Monthly Wolf numbers arrive as ``year,month,value``
triples (comma or whitespace separated). Civil dates are mapped onto
Carrington rotation numbers with a fixed epoch and mean synodic period.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Iterable

from .errors import FormatMismatchError, InputError

#: Start of Carrington rotation 1 (standard convention, JD 2398167.4).
CARRINGTON_EPOCH = datetime(1853, 11, 9, 21, 36, tzinfo=timezone.utc)

#: Mean synodic Carrington period in days.
SYNODIC_PERIOD_DAYS = 27.2753

#: Default validity range for daily area observations.
DEFAULT_VALID_FROM = date(1874, 1, 1)


class Hemisphere(Enum):
    NORTH = "N"
    SOUTH = "S"

    @classmethod
    def parse(cls, token: str) -> "Hemisphere":
        t = token.strip().upper()
        if t in ("N", "NORTH"):
            return cls.NORTH
        if t in ("S", "SOUTH"):
            return cls.SOUTH
        raise InputError(f"unknown hemisphere {token!r}")


@dataclass(frozen=True)
class DailyAreaRecord:
    """One day's hemispheric sunspot area, in millionths of a solar hemisphere."""

    day: date
    hemisphere: Hemisphere
    area: float


@dataclass(frozen=True)
class MonthlyWolfRecord:
    """Monthly mean Wolf (sunspot) number."""

    year: int
    month: int
    wolf: float


@dataclass(frozen=True)
class CarringtonCalendar:
    """Maps instants and civil dates to Carrington rotation numbers.

    Rotation n spans [epoch + (n-1)*P, epoch + n*P). A civil date belongs
    to the rotation containing its 00:00 UTC instant.
    """

    epoch: datetime = CARRINGTON_EPOCH
    synodic_days: float = SYNODIC_PERIOD_DAYS

    def __post_init__(self) -> None:
        if not (27.0 < self.synodic_days < 28.0):
            raise InputError(
                f"synodic period must lie in (27, 28) days, got {self.synodic_days}"
            )

    def rotation_of_instant(self, instant: datetime) -> int:
        if instant.tzinfo is None:
            instant = instant.replace(tzinfo=timezone.utc)
        elapsed = (instant - self.epoch).total_seconds() / 86400.0
        if elapsed < 0:
            raise InputError(f"instant {instant.isoformat()} precedes the rotation epoch")
        return int(elapsed // self.synodic_days) + 1

    def rotation_of(self, day: date) -> int:
        return self.rotation_of_instant(
            datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
        )

    def rotation_start(self, rotation: int) -> datetime:
        return self.epoch + timedelta(days=(rotation - 1) * self.synodic_days)

    def rotation_midpoint(self, rotation: int) -> datetime:
        return self.epoch + timedelta(days=(rotation - 0.5) * self.synodic_days)


@dataclass(frozen=True)
class FixedWidthFormat:
    """Column layout for fixed-width daily-area files.

    ``fields`` maps a field name to a 1-based inclusive (start, end) span.
    Recognized names: ``date`` (ISO), or ``year``/``month``/``day``;
    ``hemisphere`` plus ``area``, or ``area_north``/``area_south`` (the
    latter pair emits two records per line).
    """

    fields: tuple[tuple[str, int, int], ...]

    _KNOWN = frozenset(
        {"date", "year", "month", "day", "hemisphere", "area", "area_north", "area_south"}
    )

    def __post_init__(self) -> None:
        names = [name for name, _, _ in self.fields]
        for name, start, end in self.fields:
            if name not in self._KNOWN:
                raise FormatMismatchError(f"unknown fixed-width field {name!r}")
            if start < 1 or end < start:
                raise FormatMismatchError(f"bad span for field {name!r}: {start}..{end}")
        if len(set(names)) != len(names):
            raise FormatMismatchError("duplicate field in fixed-width descriptor")
        have = set(names)
        if not ({"date"} <= have or {"year", "month", "day"} <= have):
            raise FormatMismatchError("descriptor must define 'date' or 'year'+'month'+'day'")
        if not ({"hemisphere", "area"} <= have or {"area_north"} <= have or {"area_south"} <= have):
            raise FormatMismatchError(
                "descriptor must define 'hemisphere'+'area' or per-hemisphere area columns"
            )

    @classmethod
    def from_text(cls, text: str) -> "FixedWidthFormat":
        """Parse a descriptor: one ``name start end`` triple per line, # comments."""
        fields = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise FormatMismatchError(
                    f"descriptor line {lineno}: expected 'name start end', got {raw!r}"
                )
            try:
                fields.append((parts[0], int(parts[1]), int(parts[2])))
            except ValueError:
                raise FormatMismatchError(
                    f"descriptor line {lineno}: non-integer column span in {raw!r}"
                ) from None
        return cls(tuple(fields))

    def extract(self, line: str) -> dict[str, str]:
        return {name: line[start - 1 : end].strip() for name, start, end in self.fields}


@dataclass
class ParseResult:
    """Outcome of parsing a daily-area stream."""

    records: list[DailyAreaRecord]
    dropped_missing: int = 0
    malformed: list[tuple[int, str]] = field(default_factory=list)
    total_data_lines: int = 0


def _iter_lines(stream: Iterable[str] | str) -> Iterable[str]:
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


def _parse_iso_date(token: str) -> date:
    return date.fromisoformat(token.strip())


def _is_missing_area(token: str, value: float | None, sentinels: tuple[str, ...]) -> bool:
    if token.strip() == "" or token.strip() in sentinels:
        return True
    return value is not None and value < 0


def parse_daily_areas(
    stream: Iterable[str] | str,
    fmt: FixedWidthFormat | None = None,
    *,
    missing_sentinels: tuple[str, ...] = (),
    valid_from: date = DEFAULT_VALID_FROM,
    valid_to: date | None = None,
) -> ParseResult:
    """Parse a daily hemispheric-area stream into records, in file order.

    fmt=None selects the canonical CSV schema. Missing observations
    (blank or negative area, plus any extra ``missing_sentinels``) are
    dropped and counted, never treated as zero. Malformed lines are
    collected with line numbers; if they exceed half of all data lines a
    FormatMismatchError naming the first offending line is raised.
    """
    if valid_to is None:
        valid_to = date.today()
    result = ParseResult(records=[])

    def bad(lineno: int, reason: str) -> None:
        result.malformed.append((lineno, reason))

    def accept(lineno: int, day_tok: str, hemi: Hemisphere, area_tok: str) -> None:
        try:
            d = _parse_iso_date(day_tok) if "-" in day_tok else None
        except ValueError:
            bad(lineno, f"bad date {day_tok!r}")
            return
        if d is None:
            bad(lineno, f"bad date {day_tok!r}")
            return
        _accept_parsed(lineno, d, hemi, area_tok)

    def _accept_parsed(lineno: int, d: date, hemi: Hemisphere, area_tok: str) -> None:
        value: float | None
        try:
            value = float(area_tok) if area_tok.strip() else None
        except ValueError:
            bad(lineno, f"non-numeric area {area_tok!r}")
            return
        if _is_missing_area(area_tok, value, missing_sentinels):
            result.dropped_missing += 1
            return
        assert value is not None
        if value != value or value in (float("inf"), float("-inf")):
            bad(lineno, f"non-finite area {area_tok!r}")
            return
        if not (valid_from <= d <= valid_to):
            bad(lineno, f"date {d.isoformat()} outside validity range")
            return
        result.records.append(DailyAreaRecord(d, hemi, value))

    try:
        for lineno, raw in enumerate(_iter_lines(stream), start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if fmt is None:
                parts = [p.strip() for p in line.split(",")]
                if lineno == 1 and [p.lower() for p in parts[:3]] == ["date", "hemisphere", "area"]:
                    continue
                result.total_data_lines += 1
                if len(parts) != 3:
                    bad(lineno, f"expected 3 CSV fields, got {len(parts)}")
                    continue
                try:
                    hemi = Hemisphere.parse(parts[1])
                except InputError:
                    bad(lineno, f"unknown hemisphere {parts[1]!r}")
                    continue
                accept(lineno, parts[0], hemi, parts[2])
            else:
                result.total_data_lines += 1
                cols = fmt.extract(line)
                try:
                    if "date" in cols:
                        d = _parse_iso_date(cols["date"])
                    else:
                        d = date(int(cols["year"]), int(cols["month"]), int(cols["day"]))
                except ValueError:
                    bad(lineno, "bad date fields")
                    continue
                if "hemisphere" in cols:
                    try:
                        hemi = Hemisphere.parse(cols["hemisphere"])
                    except InputError:
                        bad(lineno, f"unknown hemisphere {cols['hemisphere']!r}")
                        continue
                    _accept_parsed(lineno, d, hemi, cols["area"])
                else:
                    if "area_north" in cols:
                        _accept_parsed(lineno, d, Hemisphere.NORTH, cols["area_north"])
                    if "area_south" in cols:
                        _accept_parsed(lineno, d, Hemisphere.SOUTH, cols["area_south"])
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"unreadable daily-area stream: {exc}") from exc

    if result.total_data_lines and len(result.malformed) * 2 > result.total_data_lines:
        first = result.malformed[0]
        raise FormatMismatchError(
            f"{len(result.malformed)} of {result.total_data_lines} lines malformed; "
            f"first offending line {first[0]}: {first[1]}"
        )
    return result


def serialize_daily_areas(records: Iterable[DailyAreaRecord]) -> str:
    """Canonical CSV form of daily records (parse round-trip identity)."""
    lines = ["date,hemisphere,area"]
    for rec in records:
        lines.append(f"{rec.day.isoformat()},{rec.hemisphere.value},{rec.area!r}")
    return "\n".join(lines) + "\n"


def parse_monthly_wolf(
    stream: Iterable[str] | str,
    *,
    value_column: int | None = None,
) -> list[MonthlyWolfRecord]:
    """Parse monthly Wolf numbers into an ascending, gap-free sequence.

    Accepts ``year,month,value`` CSV or whitespace-delimited columns; the
    value is taken from the third column unless ``value_column`` (0-based)
    says otherwise. Duplicated months, non-numeric values, and calendar
    gaps are errors.
    """
    records: list[MonthlyWolfRecord] = []
    seen: dict[tuple[int, int], int] = {}
    try:
        for lineno, raw in enumerate(_iter_lines(stream), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in (line.split(",") if "," in line else line.split())]
            if lineno == 1 and parts and not parts[0].lstrip("-").isdigit():
                continue  # header
            col = 2 if value_column is None else value_column
            if len(parts) < max(3, col + 1):
                raise InputError(f"wolf line {lineno}: expected at least 3 columns, got {len(parts)}")
            try:
                year, month = int(parts[0]), int(parts[1])
                value = float(parts[col])
            except ValueError:
                raise InputError(f"wolf line {lineno}: non-numeric field in {raw.strip()!r}") from None
            if not (1 <= month <= 12):
                raise InputError(f"wolf line {lineno}: month {month} out of range")
            if value != value or value < 0:
                raise InputError(f"wolf line {lineno}: invalid monthly value {value}")
            if (year, month) in seen:
                raise InputError(
                    f"wolf line {lineno}: duplicate month {year}-{month:02d} "
                    f"(first seen on line {seen[(year, month)]})"
                )
            seen[(year, month)] = lineno
            records.append(MonthlyWolfRecord(year, month, value))
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"unreadable wolf stream: {exc}") from exc

    records.sort(key=lambda r: (r.year, r.month))
    gaps = []
    for prev, cur in zip(records, records[1:]):
        y, m = prev.year, prev.month + 1
        if m > 12:
            y, m = y + 1, 1
        while (y, m) < (cur.year, cur.month):
            gaps.append(f"{y}-{m:02d}")
            m += 1
            if m > 12:
                y, m = y + 1, 1
    if gaps:
        shown = ", ".join(gaps[:12]) + (", ..." if len(gaps) > 12 else "")
        raise InputError(f"monthly wolf series has {len(gaps)} missing month(s): {shown}")
    return records


def month_midpoint(year: int, month: int) -> datetime:
    """Deterministic mid-month instant (day 15, 00:00 UTC)."""
    return datetime(year, month, 15, tzinfo=timezone.utc)
