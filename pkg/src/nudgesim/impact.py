"""Intraday liquidity profile and midprice impact of aggressive orders.

Intraday time ``u`` runs from 0 (open) to 1 (close). Half-spread falls and
depth rises between the open and close endpoints along ``u**shape``. A trade
of ``q`` shares moves the mid by ``q / depth(u)``, clipped to the
contemporaneous half-spread; a fraction ``permanent_fraction`` of that move
is permanent and the rest decays exponentially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_PERMANENT_FRACTION = 0.5
DEFAULT_DECAY_RATE = 5.0  # per unit of intraday time
DEFAULT_SHAPE = 2.0


class DomainError(ValueError):
    """Argument outside the domain of an impact/liquidity function."""


def _check_u(u: float) -> None:
    if not 0.0 <= u <= 1.0:  # also rejects NaN
        raise DomainError(f"intraday time u must lie in [0, 1], got {u!r}")


@dataclass(frozen=True)
class LiquidityProfile:
    half_spread_open: float
    half_spread_close: float
    depth_open: float
    depth_close: float
    shape: float = DEFAULT_SHAPE

    def __post_init__(self) -> None:
        for name in ("half_spread_open", "half_spread_close", "depth_open", "depth_close", "shape"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        if self.half_spread_close > self.half_spread_open:
            raise DomainError("half_spread_close must not exceed half_spread_open")
        if self.depth_close < self.depth_open:
            raise DomainError("depth_close must be at least depth_open")


def half_spread_at(profile: LiquidityProfile, u: float) -> float:
    _check_u(u)
    return profile.half_spread_open + (profile.half_spread_close - profile.half_spread_open) * u**profile.shape


def depth_at(profile: LiquidityProfile, u: float) -> float:
    _check_u(u)
    return profile.depth_open + (profile.depth_close - profile.depth_open) * u**profile.shape


@dataclass(frozen=True, slots=True)
class ImpactState:
    """Midprice displacement of one asset, split into permanent and transient parts."""

    permanent: float = 0.0
    transient: float = 0.0
    decay_rate: float = DEFAULT_DECAY_RATE
    permanent_fraction: float = DEFAULT_PERMANENT_FRACTION

    def __post_init__(self) -> None:
        if not (math.isfinite(self.decay_rate) and self.decay_rate >= 0):
            raise DomainError(f"decay_rate must be >= 0, got {self.decay_rate!r}")
        if not 0.0 <= self.permanent_fraction <= 1.0:
            raise DomainError(f"permanent_fraction must lie in [0, 1], got {self.permanent_fraction!r}")


def apply_trade(
    state: ImpactState, profile: LiquidityProfile, signed_qty: float, u: float
) -> tuple[ImpactState, float]:
    """Apply one aggressive order of ``signed_qty`` shares at time ``u``.

    Returns the new state and the realized (capped) mid displacement.
    """
    if not math.isfinite(signed_qty):
        raise DomainError(f"signed_qty must be finite, got {signed_qty!r}")
    if signed_qty == 0:
        _check_u(u)
        return state, 0.0
    cap = half_spread_at(profile, u)
    d = signed_qty / depth_at(profile, u)
    if d > cap:
        d = cap
    elif d < -cap:
        d = -cap
    phi = state.permanent_fraction
    new = ImpactState(
        state.permanent + phi * d,
        state.transient + (1.0 - phi) * d,
        state.decay_rate,
        phi,
    )
    return new, d


def decay(state: ImpactState, dt: float) -> ImpactState:
    if not dt >= 0:
        raise DomainError(f"dt must be >= 0, got {dt!r}")
    if dt == 0 or state.decay_rate == 0 or state.transient == 0:
        return state
    return ImpactState(
        state.permanent,
        state.transient * math.exp(-state.decay_rate * dt),
        state.decay_rate,
        state.permanent_fraction,
    )


def mid_displacement(state: ImpactState) -> float:
    return state.permanent + state.transient
