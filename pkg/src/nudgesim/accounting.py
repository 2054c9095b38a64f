"""Mark-to-market accounting, itemized trading costs and break-even sizing.

Fills execute at a midprice-based price (impact included) and the crossing
cost is charged separately as ``half_spread * |qty|``. Mark-to-market gain
therefore carries every impact effect; the itemized costs carry the spread
and fees.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .impact import LiquidityProfile, half_spread_at

LEDGER_COLUMNS = (
    "day",
    "mtm_gain",
    "spread_cost",
    "commission_cost",
    "exchange_cost",
    "regulator_cost",
    "financing_cost",
    "net_pnl",
)


class AccountingError(ValueError):
    pass


@dataclass(frozen=True)
class FeeSchedule:
    commission: float = 0.0  # per share
    exchange_fee: float = 0.0  # per share
    regulator_fee: float = 0.0  # fraction of sale proceeds

    def __post_init__(self) -> None:
        for name in ("commission", "exchange_fee", "regulator_fee"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise AccountingError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class Fill:
    """One executed aggressive order.

    ``price`` excludes the spread; ``half_spread`` is the per-share crossing
    cost at the time of execution.
    """

    asset: str
    qty: float  # signed shares, + buy / - sell
    price: float
    u: float
    half_spread: float


@dataclass(frozen=True)
class Portfolio:
    positions: Mapping[str, float] = field(default_factory=dict)
    cash: float = 0.0
    financing_rate: float = 0.0  # per day, on gross exposure

    def __post_init__(self) -> None:
        if not (math.isfinite(self.financing_rate) and self.financing_rate >= 0):
            raise AccountingError(f"financing_rate must be >= 0, got {self.financing_rate!r}")

    def gross_exposure(self, prices: Mapping[str, float]) -> float:
        return sum(abs(q * _price(prices, a)) for a, q in self.positions.items() if q)

    def after(self, fills: Iterable[Fill], cash_cost: float = 0.0) -> "Portfolio":
        """Positions and cash after the fills settle and ``cash_cost`` is paid."""
        positions = dict(self.positions)
        cash = self.cash - cash_cost
        for f in fills:
            positions[f.asset] = positions.get(f.asset, 0.0) + f.qty
            cash -= f.qty * f.price
        return Portfolio(positions, cash, self.financing_rate)


def _price(prices: Mapping[str, float], asset: str) -> float:
    try:
        return prices[asset]
    except KeyError:
        raise AccountingError(f"no price for held asset {asset!r}") from None


def mark_to_market(portfolio: Portfolio, prices: Mapping[str, float]) -> float:
    return portfolio.cash + sum(q * _price(prices, a) for a, q in portfolio.positions.items() if q)


def round_trip_cost(
    qty: float,
    profile: LiquidityProfile,
    u_buy: float,
    u_sell: float,
    fees: FeeSchedule,
    price: float,
) -> float:
    """Spread plus fees for buying and later selling ``qty`` shares.

    Takes no portfolio: the cost of the daily round trip does not depend on
    what else is held.
    """
    if qty < 0:
        raise AccountingError(f"qty must be >= 0, got {qty!r}")
    spread = (half_spread_at(profile, u_buy) + half_spread_at(profile, u_sell)) * qty
    return (
        spread
        + 2 * fees.commission * qty
        + 2 * fees.exchange_fee * qty
        + fees.regulator_fee * qty * price
    )


def expected_daily_gain(portfolio_value: float, daily_nudge: float) -> float:
    if daily_nudge < 0:
        raise AccountingError(f"daily_nudge must be >= 0, got {daily_nudge!r}")
    return portfolio_value * daily_nudge


def breakeven_size(daily_nudge: float, daily_cost: float) -> float:
    """Portfolio value at which the expected daily mark-up pays for the round trip."""
    if not daily_nudge > 0:
        raise AccountingError(f"daily_nudge must be > 0 for a finite threshold, got {daily_nudge!r}")
    return daily_cost / daily_nudge


@dataclass(frozen=True)
class LedgerEntry:
    day: int
    mtm_gain: float
    spread_cost: float
    commission_cost: float
    exchange_cost: float
    regulator_cost: float
    financing_cost: float
    # attribution of mtm_gain: revaluation of start-of-day holdings vs. the day's fills
    holding_gain: float = 0.0
    trading_gain: float = 0.0

    @property
    def trading_costs(self) -> float:
        return self.spread_cost + self.commission_cost + self.exchange_cost + self.regulator_cost

    @property
    def total_costs(self) -> float:
        return self.trading_costs + self.financing_cost

    @property
    def net_pnl(self) -> float:
        return self.mtm_gain - self.total_costs


@dataclass
class Ledger:
    entries: list[LedgerEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def net_pnl(self) -> list[float]:
        return [e.net_pnl for e in self.entries]

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(LEDGER_COLUMNS)
        for e in self.entries:
            writer.writerow(
                [e.day]
                + [
                    repr(v)
                    for v in (
                        e.mtm_gain,
                        e.spread_cost,
                        e.commission_cost,
                        e.exchange_cost,
                        e.regulator_cost,
                        e.financing_cost,
                        e.net_pnl,
                    )
                ]
            )
        return out.getvalue()

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def parse_ledger_csv(text: str) -> list[dict[str, float]]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != LEDGER_COLUMNS:
        raise AccountingError(f"unexpected ledger header {reader.fieldnames!r}")
    return [{k: (int(v) if k == "day" else float(v)) for k, v in row.items()} for row in reader]


def accrue_day(
    ledger: Ledger,
    fills: Sequence[Fill],
    portfolio: Portfolio,
    start_marks: Mapping[str, float],
    end_marks: Mapping[str, float],
    fees: FeeSchedule,
    day: int | None = None,
) -> Ledger:
    """Append one day's record for ``portfolio`` (its start-of-day state).

    ``start_marks`` are the previous close mids, ``end_marks`` today's close
    mids. Financing is charged on gross exposure after the fills, at close.
    """
    holding = 0.0
    for asset, q in portfolio.positions.items():
        if q:
            holding += q * (_price(end_marks, asset) - _price(start_marks, asset))

    trading = spread = commission = exchange = regulator = 0.0
    for f in fills:
        if not (math.isfinite(f.qty) and math.isfinite(f.price) and f.price > 0 and f.half_spread >= 0):
            raise AccountingError(f"inconsistent fill {f!r}")
        if f.asset not in end_marks:
            raise AccountingError(f"fill references unknown asset {f.asset!r}")
        size = abs(f.qty)
        trading += f.qty * (end_marks[f.asset] - f.price)
        spread += f.half_spread * size
        commission += fees.commission * size
        exchange += fees.exchange_fee * size
        if f.qty < 0:
            regulator += fees.regulator_fee * size * f.price

    closing = portfolio.after(fills)
    financing = portfolio.financing_rate * closing.gross_exposure(end_marks)
    ledger.entries.append(
        LedgerEntry(
            day=len(ledger.entries) if day is None else day,
            mtm_gain=holding + trading,
            spread_cost=spread,
            commission_cost=commission,
            exchange_cost=exchange,
            regulator_cost=regulator,
            financing_cost=financing,
            holding_gain=holding,
            trading_gain=trading,
        )
    )
    return ledger


def breakeven_inputs(ledger: Ledger, portfolio_value: float) -> tuple[float, float]:
    """Measured (daily_nudge, daily_cost) for a simulated Strategy ledger.

    The nudge is the mean daily revaluation of the held book per unit of
    ``portfolio_value``, net of financing (which scales with the book). The
    cost is everything that does not scale with the book: spread, fees and
    the round trip's own mark-to-market result.
    """
    if not ledger.entries:
        raise AccountingError("empty ledger")
    if not portfolio_value > 0:
        raise AccountingError(f"portfolio_value must be > 0, got {portfolio_value!r}")
    n = len(ledger.entries)
    nudge = sum(e.holding_gain - e.financing_cost for e in ledger.entries) / n / portfolio_value
    cost = sum(e.trading_costs - e.trading_gain for e in ledger.entries) / n
    return nudge, cost
