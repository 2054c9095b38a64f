"""Overnight/intraday split of daily returns and their cumulative curves."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .ingest import PriceSeries


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class DecompositionResult:
    dates: list[date]  # date of the open/close pair closing each step
    cumulative_overnight: np.ndarray
    cumulative_intraday: np.ndarray

    @property
    def final_overnight_pct(self) -> float:
        return (float(self.cumulative_overnight[-1]) - 1.0) * 100.0

    @property
    def final_intraday_pct(self) -> float:
        return (float(self.cumulative_intraday[-1]) - 1.0) * 100.0

    def summary(self) -> str:
        return f"overnight {self.final_overnight_pct:+.2f}%, intraday {self.final_intraday_pct:+.2f}%"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("date", "cum_overnight", "cum_intraday"))
        for d, on, intra in zip(self.dates, self.cumulative_overnight, self.cumulative_intraday):
            writer.writerow((d.isoformat(), repr(float(on)), repr(float(intra))))
        return out.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


@dataclass(frozen=True)
class VarianceShares:
    intraday_share: float
    overnight_share: float


def _require(series: PriceSeries, n: int) -> None:
    if len(series) < n:
        raise DecompositionError(f"{series.symbol}: need at least {n} bars, got {len(series)}")


def overnight_returns(series: PriceSeries, include_dividends: bool = False) -> np.ndarray:
    """Close-to-next-open simple returns; dividends paid at the open count overnight."""
    _require(series, 2)
    opens = np.asarray(series.opens[1:], dtype=float)
    if include_dividends:
        opens = opens + np.asarray(series.dividends[1:], dtype=float)
    return opens / np.asarray(series.closes[:-1], dtype=float) - 1.0


def intraday_returns(series: PriceSeries) -> np.ndarray:
    # day 0 is dropped so each intraday step pairs with the overnight step before it
    _require(series, 2)
    return np.asarray(series.closes[1:], dtype=float) / np.asarray(series.opens[1:], dtype=float) - 1.0


def cumulate(returns) -> np.ndarray:
    r = np.asarray(returns, dtype=float)
    if r.size and not np.all(r > -1.0):
        bad = int(np.argmax(~(r > -1.0)))
        raise DecompositionError(f"return at index {bad} is {r[bad]!r}; returns must exceed -100%")
    return np.cumprod(1.0 + r)


def decompose(series: PriceSeries, include_dividends: bool = False) -> DecompositionResult:
    return DecompositionResult(
        dates=series.dates[1:],
        cumulative_overnight=cumulate(overnight_returns(series, include_dividends)),
        cumulative_intraday=cumulate(intraday_returns(series)),
    )


def variance_shares(series: PriceSeries) -> VarianceShares:
    """Share of log-return variance realized intraday vs overnight (sample variance)."""
    _require(series, 3)
    v_intra = float(np.var(np.log1p(intraday_returns(series)), ddof=1))
    v_night = float(np.var(np.log1p(overnight_returns(series)), ddof=1))
    total = v_intra + v_night
    if not total > 0:
        raise DecompositionError(f"{series.symbol}: zero total variance, shares undefined")
    intraday = v_intra / total
    return VarianceShares(intraday, 1.0 - intraday)
