import pytest
from hypothesis import given
from hypothesis import strategies as st

from nudgesim.accounting import (
    LEDGER_COLUMNS,
    AccountingError,
    FeeSchedule,
    Fill,
    Ledger,
    Portfolio,
    accrue_day,
    breakeven_inputs,
    breakeven_size,
    expected_daily_gain,
    mark_to_market,
    parse_ledger_csv,
    round_trip_cost,
)
from nudgesim.impact import LiquidityProfile

PROFILE = LiquidityProfile(0.10, 0.02, 1e4, 5e4, shape=1.0)
NO_FEES = FeeSchedule()
FEES = FeeSchedule(commission=0.005, exchange_fee=0.003, regulator_fee=2.2e-5)


def test_mark_to_market_examples():
    assert mark_to_market(Portfolio({}, cash=100.0), {}) == 100.0
    assert mark_to_market(Portfolio({"A": 10.0}), {"A": 5.0}) == 50.0
    assert mark_to_market(Portfolio({"A": 10.0, "B": -10.0}), {"A": 5.0, "B": 5.0}) == 0.0


def test_mark_to_market_missing_price_names_asset():
    with pytest.raises(AccountingError, match="'B'"):
        mark_to_market(Portfolio({"A": 1.0, "B": 2.0}), {"A": 1.0})


def test_round_trip_cost_examples():
    assert round_trip_cost(0.0, PROFILE, 0.0, 1.0, FEES, 100.0) == 0.0
    assert round_trip_cost(100.0, PROFILE, 0.0, 1.0, NO_FEES, 100.0) == pytest.approx(12.0)
    one = round_trip_cost(100.0, PROFILE, 0.1, 0.9, FEES, 50.0)
    assert round_trip_cost(200.0, PROFILE, 0.1, 0.9, FEES, 50.0) == pytest.approx(2 * one)


def test_round_trip_cost_fee_terms():
    # 100 shares, half-spreads 0.10 + 0.02, 2 x (0.005 + 0.003) per share, 2.2e-5 of 100 * 50 proceeds
    expected = 12.0 + 2 * 0.005 * 100 + 2 * 0.003 * 100 + 2.2e-5 * 100 * 50.0
    assert round_trip_cost(100.0, PROFILE, 0.0, 1.0, FEES, 50.0) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(AccountingError):
        round_trip_cost(-1.0, PROFILE, 0.0, 1.0, FEES, 50.0)


def test_fee_schedule_rejects_negative():
    with pytest.raises(AccountingError):
        FeeSchedule(commission=-0.01)


def test_expected_gain_and_breakeven_examples():
    assert expected_daily_gain(0.0, 0.0004) == 0.0
    assert expected_daily_gain(1e9, 0.0004) == pytest.approx(4e5)
    # oracle: V * 0.0004 = 4e5  =>  V = 4e5 / 0.0004 = 1e9
    assert breakeven_size(0.0004, 4e5) == pytest.approx(1e9, rel=1e-12)
    assert breakeven_size(0.0004, 0.0) == 0.0
    assert breakeven_size(0.0002, 4e5) == pytest.approx(2 * breakeven_size(0.0004, 4e5))
    for bad in (0.0, -1e-4):
        with pytest.raises(AccountingError):
            breakeven_size(bad, 1.0)


@given(st.floats(0, 1e12), st.floats(0, 1e3), st.floats(0, 0.01))
def test_gain_is_proportional_to_size(v, k, n):
    assert expected_daily_gain(k * v, n) == pytest.approx(k * expected_daily_gain(v, n), rel=1e-12, abs=1e-300)


@given(st.floats(1e-6, 1e-2), st.floats(0.0, 1e8), st.floats(1.001, 100.0))
def test_threshold_crossing(n, c, k):
    v = breakeven_size(n, c)
    if c > 0:
        assert expected_daily_gain(v * k, n) > c
        assert expected_daily_gain(v / k, n) < c


def test_accrue_day_flat():
    ledger = accrue_day(Ledger(), [], Portfolio({"A": 10.0}), {"A": 5.0}, {"A": 5.0}, FEES)
    e = ledger[0]
    assert (e.mtm_gain, e.total_costs, e.net_pnl) == (0.0, 0.0, 0.0)


def test_accrue_day_round_trip_at_static_marks():
    mark = {"A": 100.0}
    buy = Fill("A", 100.0, 100.005, 0.1, 0.092)
    sell = Fill("A", -100.0, 100.002, 0.9, 0.028)
    pf = Portfolio({"A": 1000.0}, cash=-100_000.0)
    ledger = accrue_day(Ledger(), [buy, sell], pf, mark, mark, FEES)
    e = ledger[0]

    # oracle: value after the day minus value before, cash flows at fill prices
    before = -100_000.0 + 1000.0 * 100.0
    after = -100_000.0 - 100.0 * 100.005 + 100.0 * 100.002 + 1000.0 * 100.0
    assert e.mtm_gain == pytest.approx(after - before, rel=1e-9)
    assert e.holding_gain == 0.0
    costs = round_trip_cost(100.0, PROFILE, 0.1, 0.9, FEES, 100.002)
    assert e.trading_costs == pytest.approx(costs, rel=1e-12)
    assert e.spread_cost == pytest.approx(100 * (0.092 + 0.028))
    assert e.regulator_cost == pytest.approx(2.2e-5 * 100 * 100.002)
    assert e.net_pnl == e.mtm_gain - (
        e.spread_cost + e.commission_cost + e.exchange_cost + e.regulator_cost + e.financing_cost
    )


def test_financing_on_gross_exposure():
    pf = Portfolio({"A": 5000.0, "B": -5000.0}, financing_rate=1e-4)
    ledger = accrue_day(Ledger(), [], pf, {"A": 100.0, "B": 100.0}, {"A": 100.0, "B": 100.0}, NO_FEES)
    assert ledger[0].financing_cost == pytest.approx(100.0)


def test_accrue_day_rejects_bad_fills():
    with pytest.raises(AccountingError):
        accrue_day(Ledger(), [Fill("Z", 1.0, 1.0, 0.5, 0.01)], Portfolio(), {"A": 1.0}, {"A": 1.0}, NO_FEES)
    with pytest.raises(AccountingError):
        accrue_day(Ledger(), [Fill("A", 1.0, -1.0, 0.5, 0.01)], Portfolio(), {"A": 1.0}, {"A": 1.0}, NO_FEES)


@given(
    st.lists(
        st.tuples(st.floats(-1e4, 1e4), st.floats(50, 150), st.floats(0, 1), st.floats(0, 0.2)),
        max_size=8,
    ),
    st.floats(-1e5, 1e5),
    st.floats(50, 150),
    st.floats(50, 150),
)
def test_ledger_identity_and_value_change(raw_fills, pos, start, end):
    fills = [Fill("A", q, p, u, h) for q, p, u, h in raw_fills]
    pf = Portfolio({"A": pos}, cash=123.0, financing_rate=1e-4)
    e = accrue_day(Ledger(), fills, pf, {"A": start}, {"A": end}, FEES)[0]
    assert e.net_pnl == pytest.approx(e.mtm_gain - e.total_costs, rel=1e-9, abs=1e-9)
    settled = pf.after(fills, e.total_costs)
    value_change = mark_to_market(settled, {"A": end}) - mark_to_market(pf, {"A": start})
    assert value_change == pytest.approx(e.net_pnl, rel=1e-9, abs=1e-6)


def test_ledger_csv_layout():
    ledger = accrue_day(Ledger(), [Fill("A", 10.0, 10.0, 0.5, 0.01)], Portfolio(), {"A": 10.0}, {"A": 10.5}, FEES)
    text = ledger.to_csv()
    assert text.splitlines()[0] == ",".join(LEDGER_COLUMNS)
    (row,) = parse_ledger_csv(text)
    assert row["day"] == 0
    assert row["net_pnl"] == pytest.approx(row["mtm_gain"] - sum(row[c] for c in LEDGER_COLUMNS[2:7]))


def test_breakeven_inputs_split_is_exact():
    ledger = Ledger()
    pf = Portfolio({"A": 1000.0}, financing_rate=1e-5)
    accrue_day(ledger, [Fill("A", 10.0, 10.0, 0.1, 0.05), Fill("A", -10.0, 10.1, 0.9, 0.01)], pf, {"A": 10.0}, {"A": 10.2}, FEES)
    accrue_day(ledger, [], pf, {"A": 10.2}, {"A": 10.1}, FEES)
    v = 1e4
    nudge, cost = breakeven_inputs(ledger, v)
    mean_net = sum(ledger.net_pnl()) / len(ledger)
    assert mean_net == pytest.approx(expected_daily_gain(v, nudge) - cost, rel=1e-12)
