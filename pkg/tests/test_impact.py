import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nudgesim.impact import (
    DomainError,
    ImpactState,
    LiquidityProfile,
    apply_trade,
    decay,
    depth_at,
    half_spread_at,
    mid_displacement,
)

LINEAR = LiquidityProfile(0.10, 0.02, 1e4, 5e4, shape=1.0)


@pytest.mark.parametrize("u, expected", [(0.0, 0.10), (1.0, 0.02), (0.5, 0.06)])
def test_half_spread_linear(u, expected):
    assert half_spread_at(LINEAR, u) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("u, expected", [(0.0, 1e4), (1.0, 5e4), (0.5, 3e4)])
def test_depth_linear(u, expected):
    assert depth_at(LINEAR, u) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("u", [-0.01, 1.01, math.nan])
def test_u_outside_day_is_rejected(u):
    with pytest.raises(DomainError):
        half_spread_at(LINEAR, u)
    with pytest.raises(DomainError):
        depth_at(LINEAR, u)
    with pytest.raises(DomainError):
        apply_trade(ImpactState(), LINEAR, 100.0, u)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(half_spread_open=0.02, half_spread_close=0.10, depth_open=1e4, depth_close=5e4),
        dict(half_spread_open=0.10, half_spread_close=0.02, depth_open=5e4, depth_close=1e4),
        dict(half_spread_open=0.10, half_spread_close=0.0, depth_open=1e4, depth_close=5e4),
        dict(half_spread_open=0.10, half_spread_close=0.02, depth_open=1e4, depth_close=5e4, shape=0.0),
    ],
)
def test_profile_invariants(kwargs):
    with pytest.raises(DomainError):
        LiquidityProfile(**kwargs)


def test_state_invariants():
    with pytest.raises(DomainError):
        ImpactState(decay_rate=-1.0)
    with pytest.raises(DomainError):
        ImpactState(permanent_fraction=1.5)


def test_zero_trade_leaves_state():
    s = ImpactState(0.01, 0.02)
    new, d = apply_trade(s, LINEAR, 0.0, 0.3)
    assert d == 0.0 and new == s


def test_trade_below_cap_is_qty_over_depth():
    s, d = apply_trade(ImpactState(permanent_fraction=1.0), LINEAR, 100.0, 0.0)
    assert d == pytest.approx(0.01)
    assert s.permanent == pytest.approx(0.01) and s.transient == 0.0


def test_morning_moves_more_than_afternoon():
    qty = 100.0
    # oracle: qty / depth evaluated directly at the endpoints
    expected_open, expected_close = qty / 1e4, qty / 5e4
    _, d0 = apply_trade(ImpactState(), LINEAR, qty, 0.0)
    _, d1 = apply_trade(ImpactState(), LINEAR, qty, 1.0)
    assert d0 == pytest.approx(expected_open) and d1 == pytest.approx(expected_close)
    assert abs(d0) > abs(d1)


def test_cap_binds_at_half_spread():
    _, d = apply_trade(ImpactState(), LINEAR, -1e6, 0.0)
    assert d == -0.10
    _, d = apply_trade(ImpactState(), LINEAR, 1e6, 1.0)
    assert d == pytest.approx(0.02)


def test_non_finite_qty_rejected():
    with pytest.raises(DomainError):
        apply_trade(ImpactState(), LINEAR, math.inf, 0.5)


def test_decay_cases():
    s = ImpactState(0.01, 0.08, decay_rate=2.0)
    assert decay(s, 0.0) == s
    assert decay(ImpactState(0.0, 0.08, decay_rate=0.0), 0.7).transient == 0.08
    # oracle: 0.08 * exp(-ln 2) = 0.04
    halved = decay(s, math.log(2) / 2.0)
    assert halved.transient == pytest.approx(0.04, rel=1e-12)
    assert halved.permanent == 0.01
    with pytest.raises(DomainError):
        decay(s, -0.1)


def test_mid_displacement():
    assert mid_displacement(ImpactState()) == 0.0
    assert mid_displacement(ImpactState(0.01, 0.02)) == pytest.approx(0.03)
    s, d = apply_trade(ImpactState(permanent_fraction=0.5), LINEAR, 200.0, 0.0)
    assert d == pytest.approx(0.02)
    assert mid_displacement(s) == pytest.approx(0.02)
    assert s.permanent == pytest.approx(0.01) and s.transient == pytest.approx(0.01)


@st.composite
def profiles(draw):
    hs_close = draw(st.floats(1e-4, 1.0))
    hs_open = hs_close * draw(st.floats(1.0, 20.0))
    d_open = draw(st.floats(1.0, 1e7))
    d_close = d_open * draw(st.floats(1.0, 20.0))
    return LiquidityProfile(hs_open, hs_close, d_open, d_close, draw(st.floats(0.1, 5.0)))


unit = st.floats(0.0, 1.0)


@given(profiles(), unit, unit)
def test_liquidity_is_monotone(p, u1, u2):
    lo, hi = sorted((u1, u2))
    assert half_spread_at(p, lo) >= half_spread_at(p, hi)
    assert depth_at(p, lo) <= depth_at(p, hi)


@given(profiles(), st.floats(-1e9, 1e9), unit, st.floats(0.0, 1.0))
def test_displacement_never_exceeds_half_spread(p, qty, u, phi):
    _, d = apply_trade(ImpactState(permanent_fraction=phi), p, qty, u)
    assert abs(d) <= half_spread_at(p, u)


@given(profiles(), st.floats(0.0, 0.99), unit, st.floats(-3.0, 3.0))
def test_linear_below_cap(p, frac, u, k):
    qty = frac * half_spread_at(p, u) * depth_at(p, u)
    _, d = apply_trade(ImpactState(), p, qty, u)
    _, dk = apply_trade(ImpactState(), p, k * qty / 3.0, u)
    assert dk == pytest.approx(k / 3.0 * d, rel=1e-9, abs=1e-15)


@given(
    st.floats(-1.0, 1.0),
    st.floats(0.0, 50.0),
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.0),
)
def test_decay_composes(transient, rate, a, b):
    s = ImpactState(0.3, transient, decay_rate=rate)
    two_step = decay(decay(s, a), b)
    one_step = decay(s, a + b)
    assert two_step.permanent == s.permanent
    assert two_step.transient == pytest.approx(one_step.transient, rel=1e-12, abs=1e-300)
    assert abs(one_step.transient) <= abs(transient)
