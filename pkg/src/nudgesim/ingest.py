"""Daily open/close/dividend records and their CSV representation."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Optional, Sequence

REQUIRED_COLUMNS = ("date", "open", "close")
OPTIONAL_COLUMNS = ("dividend", "volume")


class IngestError(ValueError):
    """Raised when a price file or series violates the Bar/PriceSeries contract."""


@dataclass(frozen=True)
class Bar:
    date: date
    open: float
    close: float
    dividend: float = 0.0  # cash per share, paid over the night ending at this open
    volume: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("open", "close"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise IngestError(f"{name} must be a positive finite price, got {value!r}")
        if not math.isfinite(self.dividend) or self.dividend < 0:
            raise IngestError(f"dividend must be >= 0, got {self.dividend!r}")
        if self.volume is not None and (not math.isfinite(self.volume) or self.volume < 0):
            raise IngestError(f"volume must be >= 0, got {self.volume!r}")


@dataclass(frozen=True)
class PriceSeries:
    symbol: str
    bars: tuple[Bar, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bars", tuple(self.bars))
        if not self.bars:
            raise IngestError(f"{self.symbol}: a price series needs at least one bar")
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date == prev.date:
                raise IngestError(f"{self.symbol}: duplicate date {cur.date.isoformat()}")
            if cur.date < prev.date:
                raise IngestError(f"{self.symbol}: dates not increasing at {cur.date.isoformat()}")

    def __len__(self) -> int:
        return len(self.bars)

    @property
    def dates(self) -> list[date]:
        return [b.date for b in self.bars]

    @property
    def opens(self) -> list[float]:
        return [b.open for b in self.bars]

    @property
    def closes(self) -> list[float]:
        return [b.close for b in self.bars]

    @property
    def dividends(self) -> list[float]:
        return [b.dividend for b in self.bars]


def _number(raw: str, row: int, field: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise IngestError(f"row {row}: cannot parse {field} value {raw!r}") from None
    if not math.isfinite(value):
        raise IngestError(f"row {row}: {field} is not finite ({raw!r})")
    return value


def parse_ohlc_csv(text: str | Iterable[str], symbol: str) -> PriceSeries:
    """Parse a header-plus-rows CSV into a date-sorted PriceSeries.

    Columns are matched by header name, case-insensitively, in any order.
    ``date``, ``open`` and ``close`` are required; ``dividend`` and ``volume``
    are optional and anything else is ignored. Row numbers in error messages
    count data rows from 1 (the header is row 0).
    """
    lines = io.StringIO(text) if isinstance(text, str) else text
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise IngestError("empty input: no header line") from None
    names = [h.strip().lower() for h in header]
    if names and names[0].startswith("\ufeff"):
        names[0] = names[0][1:]
    missing = [c for c in REQUIRED_COLUMNS if c not in names]
    if missing:
        raise IngestError(f"missing required column(s): {', '.join(missing)}")
    col = {name: names.index(name) for name in REQUIRED_COLUMNS + OPTIONAL_COLUMNS if name in names}

    bars: list[Bar] = []
    seen: dict[date, int] = {}
    for row_no, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(names):
            raise IngestError(f"row {row_no}: expected {len(names)} columns, found {len(row)}")
        raw_date = row[col["date"]].strip()
        try:
            day = date.fromisoformat(raw_date)
        except ValueError:
            raise IngestError(f"row {row_no}: cannot parse date {raw_date!r}") from None
        if day in seen:
            raise IngestError(f"row {row_no}: duplicate date {day.isoformat()} (first seen in row {seen[day]})")
        seen[day] = row_no

        fields: dict[str, float | None] = {}
        for name in ("open", "close"):
            value = _number(row[col[name]].strip(), row_no, name)
            if value <= 0:
                raise IngestError(f"row {row_no}: {name} must be positive, got {value!r}")
            fields[name] = value
        dividend = 0.0
        if "dividend" in col and row[col["dividend"]].strip():
            dividend = _number(row[col["dividend"]].strip(), row_no, "dividend")
            if dividend < 0:
                raise IngestError(f"row {row_no}: dividend must be >= 0, got {dividend!r}")
        volume = None
        if "volume" in col and row[col["volume"]].strip():
            volume = _number(row[col["volume"]].strip(), row_no, "volume")
            if volume < 0:
                raise IngestError(f"row {row_no}: volume must be >= 0, got {volume!r}")
        bars.append(Bar(day, fields["open"], fields["close"], dividend, volume))

    if not bars:
        raise IngestError("no data rows")
    bars.sort(key=lambda b: b.date)
    return PriceSeries(symbol, tuple(bars))


def read_price_csv(path: str | Path, symbol: str | None = None) -> PriceSeries:
    path = Path(path)
    with path.open(encoding="utf-8-sig", newline="") as fh:
        return parse_ohlc_csv(fh, symbol or path.stem)


def format_price_csv(series: PriceSeries) -> str:
    """Serialize to the same CSV layout parse_ohlc_csv reads.

    Floats are written with ``repr`` so parsing the output reproduces the
    series exactly. The volume column is written only when some bar has one.
    """
    with_volume = any(b.volume is not None for b in series.bars)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header: Sequence[str] = ("date", "open", "close", "dividend") + (("volume",) if with_volume else ())
    writer.writerow(header)
    for b in series.bars:
        row = [b.date.isoformat(), repr(b.open), repr(b.close), repr(b.dividend)]
        if with_volume:
            row.append("" if b.volume is None else repr(b.volume))
        writer.writerow(row)
    return out.getvalue()


def write_price_csv(series: PriceSeries, path: str | Path) -> None:
    Path(path).write_text(format_price_csv(series), encoding="utf-8")
