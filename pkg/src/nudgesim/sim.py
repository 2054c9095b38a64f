"""Event-driven multi-day market simulation.

Each asset's observed mid is its exogenous fundamental price plus the
impact displacement accumulated from aggressive orders. Three agent types
submit orders: background noise traders, the Strategy (expand the
market-neutral book in the morning, contract it in the afternoon) and an
arbitrageur that leans against persistent open-to-close drift.

Within a day orders are applied in intraday-time order; ties go to the
fixed agent priority noise < strategy < arbitrageur, then submission order.
The open is recorded at u=0 before any trade, the close at u=1 after every
trade and the final decay. Overnight the fundamental takes one geometric
step and the transient impact is multiplied by ``overnight_retention``.

All randomness comes from one integer seed through numpy's PCG64 bit
generator; ``SeedSequence.spawn`` gives every consumer its own stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date
from typing import Mapping, Optional, Sequence

import numpy as np

from .accounting import FeeSchedule, Fill, Ledger, Portfolio, accrue_day
from .impact import (
    DEFAULT_DECAY_RATE,
    DEFAULT_PERMANENT_FRACTION,
    DomainError,
    ImpactState,
    LiquidityProfile,
    apply_trade,
    decay,
    half_spread_at,
    mid_displacement,
)
from .ingest import Bar, PriceSeries

MAX_ROUND_TRIP_FRACTION = 0.05
AGENT_PRIORITY = {"noise": 0, "strategy": 1, "arbitrageur": 2}
DEFAULT_PROFILE = LiquidityProfile(
    half_spread_open=0.10, half_spread_close=0.02, depth_open=5e5, depth_close=7.5e5
)


class ConfigError(ValueError):
    """Invalid simulation configuration; the message names the failing field."""


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class AssetSpec:
    symbol: str
    price: float = 100.0
    typical_daily_volume: float = 1e6

    def validate(self) -> None:
        if not self.symbol or not isinstance(self.symbol, str):
            raise ConfigError("assets.symbol must be a non-empty string")
        if not (math.isfinite(self.price) and self.price > 0):
            raise ConfigError(f"assets[{self.symbol}].price must be > 0, got {self.price!r}")
        if not (math.isfinite(self.typical_daily_volume) and self.typical_daily_volume > 0):
            raise ConfigError(
                f"assets[{self.symbol}].typical_daily_volume must be > 0, got {self.typical_daily_volume!r}"
            )


@dataclass(frozen=True)
class StrategyAgentConfig:
    portfolio_target: Mapping[str, float]  # currency value per leg, signed
    round_trip_fraction: float = 0.01
    morning_time: float = 0.05
    afternoon_time: float = 0.95
    jitter: float = 0.0
    rotation_period: Optional[int] = None

    def validate(self) -> None:
        if not self.portfolio_target:
            raise ConfigError("strategy.portfolio_target must name at least one leg")
        for sym, value in self.portfolio_target.items():
            if not (math.isfinite(value) and value != 0):
                raise ConfigError(f"strategy.portfolio_target[{sym}] must be a non-zero value, got {value!r}")
        if not 0 < self.round_trip_fraction <= MAX_ROUND_TRIP_FRACTION:
            raise ConfigError(
                f"strategy.round_trip_fraction must lie in (0, {MAX_ROUND_TRIP_FRACTION}], "
                f"got {self.round_trip_fraction!r}"
            )
        if not 0 <= self.morning_time < 0.5:
            raise ConfigError(f"strategy.morning_time must lie in [0, 0.5), got {self.morning_time!r}")
        if not 0.5 < self.afternoon_time <= 1:
            raise ConfigError(f"strategy.afternoon_time must lie in (0.5, 1], got {self.afternoon_time!r}")
        if not (math.isfinite(self.jitter) and self.jitter >= 0):
            raise ConfigError(f"strategy.jitter must be >= 0, got {self.jitter!r}")
        if self.rotation_period is not None and not (
            isinstance(self.rotation_period, int) and self.rotation_period > 0
        ):
            raise ConfigError(f"strategy.rotation_period must be a positive integer, got {self.rotation_period!r}")


@dataclass(frozen=True)
class ArbitrageurConfig:
    threshold: float = 0.0  # price units on top of the round-trip spread
    lookback: int = 20
    size_fraction: float = 0.01  # of typical daily volume

    def validate(self) -> None:
        if not (math.isfinite(self.threshold) and self.threshold >= 0):
            raise ConfigError(f"arbitrageur.threshold must be >= 0, got {self.threshold!r}")
        if not (isinstance(self.lookback, int) and self.lookback >= 1):
            raise ConfigError(f"arbitrageur.lookback must be a positive integer, got {self.lookback!r}")
        if not 0 < self.size_fraction <= 1:
            raise ConfigError(f"arbitrageur.size_fraction must lie in (0, 1], got {self.size_fraction!r}")


@dataclass(frozen=True)
class NoiseConfig:
    intensity: float = 0.0  # expected orders per asset per day
    size_scale: float = 1000.0  # shares, standard deviation of signed order size

    def validate(self) -> None:
        if not (math.isfinite(self.intensity) and self.intensity >= 0):
            raise ConfigError(f"noise.intensity must be >= 0, got {self.intensity!r}")
        if not (math.isfinite(self.size_scale) and self.size_scale >= 0):
            raise ConfigError(f"noise.size_scale must be >= 0, got {self.size_scale!r}")


@dataclass(frozen=True)
class SimConfig:
    days: int = 250
    assets: tuple[AssetSpec, ...] = (AssetSpec("AAA"), AssetSpec("BBB"))
    profile: LiquidityProfile = DEFAULT_PROFILE
    permanent_fraction: float = DEFAULT_PERMANENT_FRACTION
    decay_rate: float = DEFAULT_DECAY_RATE
    overnight_retention: float = 0.0  # share of transient impact surviving the night
    fundamental_volatility: float = 0.0  # per night, log scale
    tick: float = 0.01
    strategy: Optional[StrategyAgentConfig] = None
    arbitrageur: Optional[ArbitrageurConfig] = None
    noise: Optional[NoiseConfig] = None
    fees: FeeSchedule = FeeSchedule()
    financing_rate: float = 0.0
    start_date: date = date(2000, 1, 3)

    def validate(self) -> None:
        if not (isinstance(self.days, int) and self.days >= 1):
            raise ConfigError(f"days must be a positive integer, got {self.days!r}")
        if not self.assets:
            raise ConfigError("assets must list at least one asset")
        symbols = [a.symbol for a in self.assets]
        for a in self.assets:
            a.validate()
        if len(set(symbols)) != len(symbols):
            raise ConfigError("assets.symbol values must be unique")
        if not 0 <= self.permanent_fraction <= 1:
            raise ConfigError(f"impact.permanent_fraction must lie in [0, 1], got {self.permanent_fraction!r}")
        if not (math.isfinite(self.decay_rate) and self.decay_rate >= 0):
            raise ConfigError(f"impact.decay_rate must be >= 0, got {self.decay_rate!r}")
        if not 0 <= self.overnight_retention <= 1:
            raise ConfigError(f"impact.overnight_retention must lie in [0, 1], got {self.overnight_retention!r}")
        if not (math.isfinite(self.fundamental_volatility) and self.fundamental_volatility >= 0):
            raise ConfigError(f"fundamental.volatility must be >= 0, got {self.fundamental_volatility!r}")
        if not (math.isfinite(self.tick) and self.tick > 0):
            raise ConfigError(f"fundamental.tick must be > 0, got {self.tick!r}")
        if not (math.isfinite(self.financing_rate) and self.financing_rate >= 0):
            raise ConfigError(f"financing_rate must be >= 0, got {self.financing_rate!r}")
        if self.strategy is not None:
            self.strategy.validate()
            if len(self.assets) < 2:
                raise ConfigError("assets: the Strategy needs at least two assets for a market-neutral book")
            for sym in self.strategy.portfolio_target:
                if sym not in symbols:
                    raise ConfigError(f"strategy.portfolio_target names unknown asset {sym!r}")
        if self.arbitrageur is not None:
            self.arbitrageur.validate()
        if self.noise is not None:
            self.noise.validate()


# ---------------------------------------------------------------- market state


@dataclass(frozen=True, slots=True)
class AssetState:
    fundamental: float
    impact: ImpactState
    profile: LiquidityProfile
    typical_daily_volume: float


@dataclass(frozen=True)
class MarketState:
    assets: Mapping[str, AssetState]
    day: int = 0
    tick: float = 0.01
    overnight_retention: float = 0.0
    fundamental_volatility: float = 0.0

    @property
    def symbols(self) -> list[str]:
        return list(self.assets)

    def mid(self, symbol: str) -> float:
        a = self.assets[symbol]
        return max(a.fundamental + mid_displacement(a.impact), self.tick)


@dataclass(frozen=True)
class Order:
    asset: str
    u: float
    qty: float  # signed shares
    agent: str


@dataclass
class DayRecord:
    day: int
    opens: dict[str, float]
    closes: dict[str, float]
    fills: dict[str, list[Fill]] = field(default_factory=dict)  # by agent
    permanent_shift: dict[str, dict[str, float]] = field(default_factory=dict)  # agent -> asset -> price units

    def net_qty(self, agent: str, asset: str) -> float:
        return sum(f.qty for f in self.fills.get(agent, ()) if f.asset == asset)

    def cash_flow(self, agent: str, asset: str) -> float:
        """Cash paid (negative) or received, including the spread, excluding fees."""
        return -sum(f.qty * f.price + abs(f.qty) * f.half_spread for f in self.fills.get(agent, ()) if f.asset == asset)

    def volume(self, asset: str) -> float:
        return sum(abs(f.qty) for fills in self.fills.values() for f in fills if f.asset == asset)


def initial_market(config: SimConfig) -> MarketState:
    return MarketState(
        assets={
            a.symbol: AssetState(
                fundamental=a.price,
                impact=ImpactState(0.0, 0.0, config.decay_rate, config.permanent_fraction),
                profile=config.profile,
                typical_daily_volume=a.typical_daily_volume,
            )
            for a in config.assets
        },
        day=0,
        tick=config.tick,
        overnight_retention=config.overnight_retention,
        fundamental_volatility=config.fundamental_volatility,
    )


# ---------------------------------------------------------------- agents


def default_legs(cfg: StrategyAgentConfig) -> list[tuple[str, float]]:
    return [(sym, math.copysign(1.0, v)) for sym, v in cfg.portfolio_target.items()]


def _jittered(rng: np.random.Generator, value: float, jitter: float) -> float:
    if jitter == 0:
        return value
    return value * max(0.0, 1.0 + jitter * rng.standard_normal())


def strategy_plan(
    cfg: StrategyAgentConfig,
    market: MarketState,
    rng: np.random.Generator,
    legs: Sequence[tuple[str, float]] | None = None,
    rotation: tuple[int, str] | None = None,
) -> tuple[list[Order], list[Order]]:
    """Morning expansion and afternoon contraction orders for one day.

    Each leg ``(asset, sign)`` is expanded in its held direction by
    ``round_trip_fraction * typical_daily_volume`` shares in the morning and
    the same amount is unwound in the afternoon. With ``jitter > 0`` the
    morning size, each trade time and the afternoon unwind (relative to the
    morning size) are scaled by ``1 + jitter * N(0, 1)``; sizes are clipped to
    the 5% volume cap.

    ``rotation=(leg_index, replacement)`` marks a rotation day: that leg's
    morning expansion goes to ``replacement`` while its afternoon contraction
    still hits the outgoing asset, moving one round-trip quantity of the book
    from the old name to the new one.
    """
    cfg.validate()
    if len(market.assets) < 2:
        raise ConfigError("assets: the Strategy needs at least two assets for a market-neutral book")
    legs = default_legs(cfg) if legs is None else legs
    morning: list[Order] = []
    afternoon: list[Order] = []
    for i, (sym, sign) in enumerate(legs):
        buy_sym = sym
        if rotation is not None and rotation[0] == i:
            buy_sym = rotation[1]
        if buy_sym not in market.assets:
            raise ConfigError(f"strategy leg names unknown asset {buy_sym!r}")
        vol = market.assets[buy_sym].typical_daily_volume
        cap = MAX_ROUND_TRIP_FRACTION * vol
        q_m = min(_jittered(rng, cfg.round_trip_fraction * vol, cfg.jitter), cap)
        u_m = min(max(_jittered(rng, cfg.morning_time, cfg.jitter), 0.0), math.nextafter(0.5, 0.0))
        sell_vol = market.assets[sym].typical_daily_volume
        q_a = min(_jittered(rng, q_m, cfg.jitter), MAX_ROUND_TRIP_FRACTION * sell_vol)
        u_a = min(max(_jittered(rng, cfg.afternoon_time, cfg.jitter), math.nextafter(0.5, 1.0)), 1.0)
        morning.append(Order(buy_sym, u_m, sign * q_m, "strategy"))
        afternoon.append(Order(sym, u_a, -sign * q_a, "strategy"))
    return morning, afternoon


def arbitrageur_plan(
    market: MarketState,
    history: Sequence[DayRecord],
    threshold: float,
    lookback: int = 20,
    size_fraction: float = 0.01,
) -> list[Order]:
    """Lean against persistent open-to-close drift when it beats the open spread.

    The drift estimate is the mean of ``open - close`` over the last
    ``lookback`` days. If it exceeds ``2 * half_spread_at(profile, 0) +
    threshold`` the arbitrageur sells at the open and buys back at the close;
    the mirrored case buys at the open. Ties do not trade.
    """
    if len(history) < lookback:
        return []
    recent = history[-lookback:]
    orders: list[Order] = []
    for sym, asset in market.assets.items():
        if any(sym not in rec.opens for rec in recent):
            continue
        drift = sum(rec.opens[sym] - rec.closes[sym] for rec in recent) / lookback
        hurdle = 2.0 * half_spread_at(asset.profile, 0.0) + threshold
        size = size_fraction * asset.typical_daily_volume
        if drift > hurdle:
            orders += [Order(sym, 0.0, -size, "arbitrageur"), Order(sym, 1.0, size, "arbitrageur")]
        elif -drift > hurdle:
            orders += [Order(sym, 0.0, size, "arbitrageur"), Order(sym, 1.0, -size, "arbitrageur")]
    return orders


def noise_plan(intensity: float, size_scale: float, rng: np.random.Generator, asset: str = "") -> list[Order]:
    """Poisson(intensity) zero-mean normal-sized orders at uniform times."""
    if intensity < 0:
        raise ConfigError(f"noise.intensity must be >= 0, got {intensity!r}")
    n = int(rng.poisson(intensity)) if intensity > 0 else 0
    if n == 0:
        return []
    times = rng.random(n)
    sizes = rng.standard_normal(n) * size_scale
    return [Order(asset, float(u), float(q), "noise") for u, q in zip(times, sizes)]


class NoiseAgent:
    name = "noise"

    def __init__(self, cfg: NoiseConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng

    def orders(self, market: MarketState, history: Sequence[DayRecord]) -> list[Order]:
        out: list[Order] = []
        for sym in market.assets:
            out += noise_plan(self.cfg.intensity, self.cfg.size_scale, self.rng, sym)
        return out


class StrategyAgent:
    """Stateful wrapper around strategy_plan that owns leg rotation.

    Rotation happens on every ``rotation_period``-th day (day indices
    ``period - 1, 2 * period - 1, ...``). Legs rotate round-robin and the
    replacement is the next asset, in market order, that no leg holds.
    """

    name = "strategy"

    def __init__(self, cfg: StrategyAgentConfig, rng: np.random.Generator):
        cfg.validate()
        self.cfg = cfg
        self.rng = rng
        self.legs: list[tuple[str, float]] = default_legs(cfg)
        self._next_leg = 0
        self._next_asset = 0

    def _rotation(self, market: MarketState) -> tuple[int, str] | None:
        period = self.cfg.rotation_period
        if period is None or (market.day + 1) % period != 0:
            return None
        held = {sym for sym, _ in self.legs}
        universe = market.symbols
        for k in range(len(universe)):
            candidate = universe[(self._next_asset + k) % len(universe)]
            if candidate not in held:
                self._next_asset = (self._next_asset + k + 1) % len(universe)
                leg = self._next_leg
                self._next_leg = (self._next_leg + 1) % len(self.legs)
                return leg, candidate
        return None

    def orders(self, market: MarketState, history: Sequence[DayRecord]) -> list[Order]:
        rotation = self._rotation(market)
        morning, afternoon = strategy_plan(self.cfg, market, self.rng, self.legs, rotation)
        if rotation is not None:
            i, replacement = rotation
            self.legs[i] = (replacement, self.legs[i][1])
        return morning + afternoon


class ArbitrageurAgent:
    name = "arbitrageur"

    def __init__(self, cfg: ArbitrageurConfig):
        cfg.validate()
        self.cfg = cfg

    def orders(self, market: MarketState, history: Sequence[DayRecord]) -> list[Order]:
        return arbitrageur_plan(market, history, self.cfg.threshold, self.cfg.lookback, self.cfg.size_fraction)


# ---------------------------------------------------------------- day loop


def run_day(
    market: MarketState,
    agents: Sequence,
    rng: np.random.Generator,
    history: Sequence[DayRecord] = (),
) -> tuple[MarketState, DayRecord]:
    """Trade one day and step the market to the next open."""
    opens = {sym: market.mid(sym) for sym in market.assets}

    orders: list[Order] = []
    for agent in agents:
        orders += agent.orders(market, history)
    for o in orders:
        if o.asset not in market.assets:
            raise DomainError(f"order for unknown asset {o.asset!r}")
        if not 0.0 <= o.u <= 1.0:
            raise DomainError(f"order time u must lie in [0, 1], got {o.u!r}")
    keyed = sorted(enumerate(orders), key=lambda io: (io[1].u, AGENT_PRIORITY.get(io[1].agent, 99), io[0]))

    states = {sym: a.impact for sym, a in market.assets.items()}
    last_u = dict.fromkeys(market.assets, 0.0)
    fills: dict[str, list[Fill]] = {}
    shifts: dict[str, dict[str, float]] = {}
    tick = market.tick
    for _, o in keyed:
        asset = market.assets[o.asset]
        st = decay(states[o.asset], o.u - last_u[o.asset])
        last_u[o.asset] = o.u
        before = max(asset.fundamental + st.permanent + st.transient, tick)
        st, d = apply_trade(st, asset.profile, o.qty, o.u)
        states[o.asset] = st
        if o.qty == 0:
            continue
        after = max(asset.fundamental + st.permanent + st.transient, tick)
        # linear depth: the order walks the book from the pre- to the post-trade mid
        fill = Fill(o.asset, o.qty, 0.5 * (before + after), o.u, half_spread_at(asset.profile, o.u))
        fills.setdefault(o.agent, []).append(fill)
        per_asset = shifts.setdefault(o.agent, {})
        per_asset[o.asset] = per_asset.get(o.asset, 0.0) + st.permanent_fraction * d

    closes: dict[str, float] = {}
    next_assets: dict[str, AssetState] = {}
    sigma = market.fundamental_volatility
    for sym, asset in market.assets.items():
        st = decay(states[sym], 1.0 - last_u[sym])
        closes[sym] = max(asset.fundamental + st.permanent + st.transient, tick)
        fundamental = asset.fundamental
        if sigma > 0:
            fundamental *= math.exp(sigma * rng.standard_normal() - 0.5 * sigma * sigma)
        st = ImpactState(st.permanent, st.transient * market.overnight_retention, st.decay_rate, st.permanent_fraction)
        next_assets[sym] = replace(asset, fundamental=fundamental, impact=st)

    record = DayRecord(market.day, opens, closes, fills, shifts)
    return replace(market, assets=next_assets, day=market.day + 1), record


# ---------------------------------------------------------------- full run


@dataclass
class SimResult:
    series: dict[str, PriceSeries]
    ledger: Ledger
    records: list[DayRecord]
    portfolio: Portfolio  # Strategy book after the last day
    initial_portfolio: Portfolio

    @property
    def portfolio_value(self) -> float:
        """Gross value of the Strategy book at the initial marks."""
        return self.initial_portfolio.gross_exposure(self.records[0].opens) if self.records else 0.0


def trading_dates(start: date, n: int) -> list[date]:
    days = np.busday_offset(np.datetime64(start, "D"), np.arange(n), roll="forward")
    return [d.item() for d in days]


def build_agents(config: SimConfig, seed: int) -> tuple[list, np.random.Generator]:
    """Agents in priority order plus the market's own RNG stream."""
    market_ss, noise_ss, strategy_ss = np.random.SeedSequence(seed).spawn(3)
    agents: list = []
    if config.noise is not None and config.noise.intensity > 0:
        agents.append(NoiseAgent(config.noise, make_rng(noise_ss)))
    if config.strategy is not None:
        agents.append(StrategyAgent(config.strategy, make_rng(strategy_ss)))
    if config.arbitrageur is not None:
        agents.append(ArbitrageurAgent(config.arbitrageur))
    return agents, make_rng(market_ss)


def run_sim(config: SimConfig, seed: int) -> SimResult:
    """Run ``config.days`` days; deterministic in ``(config, seed)``."""
    config.validate()
    if not (isinstance(seed, (int, np.integer)) and 0 <= seed < 2**64):
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    agents, rng = build_agents(config, int(seed))
    market = initial_market(config)

    targets = config.strategy.portfolio_target if config.strategy else {}
    marks = {sym: market.mid(sym) for sym in market.assets}
    portfolio = Portfolio(
        {sym: v / marks[sym] for sym, v in targets.items()},
        cash=-sum(targets.values()),
        financing_rate=config.financing_rate,
    )
    initial_portfolio = portfolio
    ledger = Ledger()
    records: list[DayRecord] = []
    for _ in range(config.days):
        market, rec = run_day(market, agents, rng, records)
        records.append(rec)
        fills = rec.fills.get("strategy", [])
        accrue_day(ledger, fills, portfolio, marks, rec.closes, config.fees, day=rec.day)
        portfolio = portfolio.after(fills, ledger.entries[-1].total_costs)
        marks = rec.closes

    dates = trading_dates(config.start_date, config.days)
    series = {
        sym: PriceSeries(
            sym,
            tuple(
                Bar(d, rec.opens[sym], rec.closes[sym], 0.0, rec.volume(sym)) for d, rec in zip(dates, records)
            ),
        )
        for sym in market.assets
    }
    return SimResult(series, ledger, records, portfolio, initial_portfolio)
