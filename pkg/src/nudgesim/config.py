"""JSON run configuration for ``nudgesim simulate``.

Every block and field is optional; omitted values take the defaults below.
Unknown keys are rejected so that typos cannot silently fall back to a
default. Example with every field spelled out::

    {
      "seed": 7,
      "days": 2000,
      "start_date": "2000-01-03",
      "assets": [{"symbol": "AAA", "price": 100.0, "typical_daily_volume": 1e6},
                 {"symbol": "BBB", "price": 100.0, "typical_daily_volume": 1e6}],
      "profile": {"half_spread_open": 0.10, "half_spread_close": 0.02,
                  "depth_open": 5e5, "depth_close": 7.5e5, "shape": 2.0},
      "impact": {"permanent_fraction": 0.5, "decay_rate": 5.0, "overnight_retention": 0.0},
      "fundamental": {"volatility": 0.0, "tick": 0.01},
      "strategy": {"enabled": true,
                   "portfolio_target": {"AAA": 1e8, "BBB": -1e8},
                   "round_trip_fraction": 0.01, "morning_time": 0.05,
                   "afternoon_time": 0.95, "jitter": 0.0, "rotation_period": null},
      "arbitrageur": {"enabled": false, "threshold": 0.0, "lookback": 20, "size_fraction": 0.01},
      "noise": {"intensity": 0.0, "size_scale": 1000.0},
      "fees": {"commission": 0.0, "exchange_fee": 0.0, "regulator_fee": 0.0},
      "financing_rate": 0.0
    }

Without a ``strategy.portfolio_target`` the Strategy is long the first asset
and short the second, 1e8 of currency each.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Any, Mapping

from .accounting import AccountingError, FeeSchedule
from .impact import DomainError, LiquidityProfile
from .sim import (
    DEFAULT_PROFILE,
    ArbitrageurConfig,
    AssetSpec,
    ConfigError,
    NoiseConfig,
    SimConfig,
    StrategyAgentConfig,
)

DEFAULT_LEG_VALUE = 1e8

_TOP = {"seed", "days", "start_date", "assets", "profile", "impact", "fundamental",
        "strategy", "arbitrageur", "noise", "fees", "financing_rate"}
_BLOCKS = {
    "profile": {"half_spread_open", "half_spread_close", "depth_open", "depth_close", "shape"},
    "impact": {"permanent_fraction", "decay_rate", "overnight_retention"},
    "fundamental": {"volatility", "tick"},
    "strategy": {"enabled", "portfolio_target", "round_trip_fraction", "morning_time",
                 "afternoon_time", "jitter", "rotation_period"},
    "arbitrageur": {"enabled", "threshold", "lookback", "size_fraction"},
    "noise": {"enabled", "intensity", "size_scale"},
    "fees": {"commission", "exchange_fee", "regulator_fee"},
}
_ASSET_KEYS = {"symbol", "price", "typical_daily_volume"}


@dataclass(frozen=True)
class RunConfig:
    sim: SimConfig
    seed: int = 0


def _check_keys(obj: Any, allowed: set[str], where: str) -> Mapping[str, Any]:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {', '.join(unknown)}")
    return obj


def _num(block: Mapping[str, Any], key: str, where: str, default: float) -> float:
    value = block.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {value!r}")
    return float(value)


def _int(block: Mapping[str, Any], key: str, where: str, default: int | None) -> int | None:
    value = block.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{where}.{key}: expected an integer, got {value!r}")
    return value


def _enabled(block: Mapping[str, Any], where: str, default: bool) -> bool:
    value = block.get("enabled", default)
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.enabled: expected true or false, got {value!r}")
    return value


def parse_config(data: Mapping[str, Any]) -> RunConfig:
    """Build and validate a RunConfig; raises ConfigError naming the bad field."""
    data = _check_keys(data, _TOP, "config")

    seed = _int(data, "seed", "config", 0)
    if not 0 <= seed < 2**64:
        raise ConfigError(f"config.seed: must be an unsigned 64-bit integer, got {seed!r}")
    days = _int(data, "days", "config", SimConfig.days)

    start = data.get("start_date", SimConfig.start_date.isoformat())
    try:
        start_date = date.fromisoformat(start)
    except (TypeError, ValueError):
        raise ConfigError(f"config.start_date: expected YYYY-MM-DD, got {start!r}") from None

    raw_assets = data.get("assets", [{"symbol": a.symbol} for a in SimConfig.assets])
    if not isinstance(raw_assets, list):
        raise ConfigError("config.assets: expected a list")
    assets = []
    for i, a in enumerate(raw_assets):
        where = f"assets[{i}]"
        a = _check_keys(a, _ASSET_KEYS, where)
        symbol = a.get("symbol")
        if not isinstance(symbol, str) or not symbol:
            raise ConfigError(f"{where}.symbol: expected a non-empty string")
        assets.append(
            AssetSpec(symbol, _num(a, "price", where, 100.0), _num(a, "typical_daily_volume", where, 1e6))
        )

    p = _check_keys(data.get("profile", {}), _BLOCKS["profile"], "profile")
    try:
        profile = LiquidityProfile(
            _num(p, "half_spread_open", "profile", DEFAULT_PROFILE.half_spread_open),
            _num(p, "half_spread_close", "profile", DEFAULT_PROFILE.half_spread_close),
            _num(p, "depth_open", "profile", DEFAULT_PROFILE.depth_open),
            _num(p, "depth_close", "profile", DEFAULT_PROFILE.depth_close),
            _num(p, "shape", "profile", DEFAULT_PROFILE.shape),
        )
    except DomainError as exc:
        raise ConfigError(f"profile: {exc}") from None

    imp = _check_keys(data.get("impact", {}), _BLOCKS["impact"], "impact")
    fund = _check_keys(data.get("fundamental", {}), _BLOCKS["fundamental"], "fundamental")

    s = _check_keys(data.get("strategy", {}), _BLOCKS["strategy"], "strategy")
    strategy = None
    if _enabled(s, "strategy", True):
        target = s.get("portfolio_target")
        if target is None:
            if len(assets) < 2:
                raise ConfigError("strategy.portfolio_target: default book needs at least two assets")
            target = {assets[0].symbol: DEFAULT_LEG_VALUE, assets[1].symbol: -DEFAULT_LEG_VALUE}
        if not isinstance(target, dict):
            raise ConfigError("strategy.portfolio_target: expected an object of symbol -> value")
        target = {k: _num(target, k, "strategy.portfolio_target", 0.0) for k in target}
        strategy = StrategyAgentConfig(
            portfolio_target=target,
            round_trip_fraction=_num(s, "round_trip_fraction", "strategy", StrategyAgentConfig.round_trip_fraction),
            morning_time=_num(s, "morning_time", "strategy", StrategyAgentConfig.morning_time),
            afternoon_time=_num(s, "afternoon_time", "strategy", StrategyAgentConfig.afternoon_time),
            jitter=_num(s, "jitter", "strategy", StrategyAgentConfig.jitter),
            rotation_period=_int(s, "rotation_period", "strategy", None),
        )

    ab = _check_keys(data.get("arbitrageur", {}), _BLOCKS["arbitrageur"], "arbitrageur")
    arbitrageur = None
    if _enabled(ab, "arbitrageur", False):
        arbitrageur = ArbitrageurConfig(
            threshold=_num(ab, "threshold", "arbitrageur", ArbitrageurConfig.threshold),
            lookback=_int(ab, "lookback", "arbitrageur", ArbitrageurConfig.lookback),
            size_fraction=_num(ab, "size_fraction", "arbitrageur", ArbitrageurConfig.size_fraction),
        )

    nz = _check_keys(data.get("noise", {}), _BLOCKS["noise"], "noise")
    noise = None
    if _enabled(nz, "noise", True):
        noise = NoiseConfig(
            intensity=_num(nz, "intensity", "noise", NoiseConfig.intensity),
            size_scale=_num(nz, "size_scale", "noise", NoiseConfig.size_scale),
        )

    fz = _check_keys(data.get("fees", {}), _BLOCKS["fees"], "fees")
    try:
        fees = FeeSchedule(
            _num(fz, "commission", "fees", 0.0),
            _num(fz, "exchange_fee", "fees", 0.0),
            _num(fz, "regulator_fee", "fees", 0.0),
        )
    except AccountingError as exc:
        raise ConfigError(f"fees: {exc}") from None

    sim = SimConfig(
        days=days,
        assets=tuple(assets),
        profile=profile,
        permanent_fraction=_num(imp, "permanent_fraction", "impact", SimConfig.permanent_fraction),
        decay_rate=_num(imp, "decay_rate", "impact", SimConfig.decay_rate),
        overnight_retention=_num(imp, "overnight_retention", "impact", SimConfig.overnight_retention),
        fundamental_volatility=_num(fund, "volatility", "fundamental", SimConfig.fundamental_volatility),
        tick=_num(fund, "tick", "fundamental", SimConfig.tick),
        strategy=strategy,
        arbitrageur=arbitrageur,
        noise=noise,
        fees=fees,
        financing_rate=_num(data, "financing_rate", "config", SimConfig.financing_rate),
        start_date=start_date,
    )
    sim.validate()
    return RunConfig(sim, seed)


def load_config(path: str | Path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    return parse_config(data)
