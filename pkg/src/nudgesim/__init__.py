"""Agent-based simulation of intraday round-trip price nudging, plus the
overnight/intraday return decomposition used to look for its footprint."""

from .accounting import (
    FeeSchedule,
    Fill,
    Ledger,
    LedgerEntry,
    Portfolio,
    accrue_day,
    breakeven_size,
    expected_daily_gain,
    mark_to_market,
    round_trip_cost,
)
from .decompose import (
    DecompositionResult,
    VarianceShares,
    cumulate,
    decompose,
    intraday_returns,
    overnight_returns,
    variance_shares,
)
from .impact import ImpactState, LiquidityProfile, apply_trade, decay, depth_at, half_spread_at, mid_displacement
from .ingest import Bar, PriceSeries, format_price_csv, parse_ohlc_csv, read_price_csv
from .sim import SimConfig, StrategyAgentConfig, run_day, run_sim

__version__ = "0.1.0"
