import math
from dataclasses import dataclass

import pytest

from conftest import SUITE_IDS
from twoway.adversaries import (
    GridSpec,
    adv_daily,
    adv_known_phi,
    adv_known_range,
    adv_one_trade,
    meets_floor,
)
from twoway.analysis import theoretical_bound
from twoway.model import ETA, Action, DailyReturn, KnownPhi, KnownRange, validate_sequence
from twoway.oracle import opt_return_dp
from twoway.strategies import make_strategy


@dataclass(frozen=True)
class BuyBelow:
    """Buys the first time the price is at or below ``level``; never sells voluntarily."""

    level: float
    name: str = "buy-below"

    def initial_state(self):
        return False

    def decide(self, holding, obs):
        if obs.is_final:
            return (Action.SELL if holding else Action.HOLD), False
        if not holding and obs.price <= self.level * (1 + ETA):
            return Action.BUY, True
        return Action.HOLD, holding


def test_grid():
    v = GridSpec(4, 1.0, 8.0).values
    assert v[0] == 1 and v[-1] == 8
    assert all(a < b for a, b in zip(v, v[1:]))
    with pytest.raises(ValueError):
        GridSpec(1)


class TestOneTrade:
    floor = 8 ** (3 / 4)

    def test_do_nothing(self):
        o = adv_one_trade(make_strategy("do-nothing", KnownRange(1, 8)), 8, 4)
        assert o.result.onl_return == 1
        assert o.ratio >= self.floor * (1 - ETA)
        assert o.series.prices[-1] == 1

    def test_buy_and_hold_buys_at_top_grid_point(self):
        o = adv_one_trade(make_strategy("buy-and-hold", KnownRange(1, 8)), 8, 4)
        assert o.series.prices == pytest.approx((8 ** 0.75, 1.0))
        assert o.result.opt_return == 1
        assert o.ratio == pytest.approx(self.floor, rel=1e-9)

    def test_buy_at_v1(self):
        v1, v2 = 8 ** 0.25, 8 ** 0.5
        o = adv_one_trade(BuyBelow(v1), 8, 4)
        assert o.plan.trades == ((len(o.series) - 4, len(o.series) - 3),)
        assert o.ratio == pytest.approx(8 * v1 / v2, rel=1e-9)


class TestKnownRange:
    def test_alg1_hand_trace(self):
        o = adv_known_range(make_strategy("alg1", KnownRange(1, 8, 2)), 8, 2, 3)
        assert o.series.prices == pytest.approx((2, 1, 4, 8, 4, 8, 2, 1))
        assert o.result.onl_log.trades == ((0, 2), (6, 7))
        assert o.ratio == pytest.approx(16, rel=1e-9)
        assert o.opt_floor == pytest.approx(16, rel=1e-9)

    def test_do_nothing_skips_to_last_round(self):
        o = adv_known_range(make_strategy("do-nothing", KnownRange(1, 8, 2)), 8, 2, 3)
        assert o.series.prices[:2] == pytest.approx((2, 8))
        assert o.branch.startswith("no-buy-round-1")
        assert o.ratio >= 8 ** (4 / 3) * (1 - ETA)

    def test_never_sells_branch(self):
        o = adv_known_range(BuyBelow(2), 8, 2, 3)
        assert o.branch == "never-sells-round-1"
        assert o.series.prices == pytest.approx((2, 1, 4, 1, 4, 1))
        assert o.ratio == pytest.approx(8 ** (5 / 3), rel=1e-9)

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    @pytest.mark.parametrize("sid", SUITE_IDS)
    def test_suite_meets_branch_floors(self, sid, k):
        n = 5
        o = adv_known_range(make_strategy(sid, KnownRange(1, 8, k)), 8, k, n)
        assert validate_sequence(o.series, KnownRange(1, 8, k)) is None
        assert meets_floor(o), (o.branch, o.ratio, o.ratio_floor)
        assert o.ratio >= theoretical_bound(KnownRange(1, 8, k), "lower", n) * (1 - ETA)


class TestKnownPhi:
    def test_do_nothing(self):
        o = adv_known_phi(make_strategy("do-nothing", KnownPhi(8, 2)), 8, 2, 3)
        assert o.series.prices[:2] == (1, 8)
        assert o.ratio >= 8 ** (5 / 3) * (1 - ETA)

    def test_buy_and_hold_never_sells(self):
        o = adv_known_phi(make_strategy("buy-and-hold", KnownPhi(8, 2)), 8, 2, 3)
        assert o.branch == "round1-never-sells"
        assert o.series.prices == (1, 1 / 8, 1, 1 / 8, 1)
        assert o.ratio == pytest.approx(64, rel=1e-9)

    def test_alg2_sandwich(self):
        o = adv_known_phi(make_strategy("alg2", KnownPhi(8, 2)), 8, 2, 3)
        assert 8 ** (5 / 3) * (1 - ETA) <= o.ratio <= 8**2 * (1 + ETA)

    def test_needs_two_trades(self):
        with pytest.raises(ValueError):
            adv_known_phi(make_strategy("do-nothing", KnownPhi(8, 1)), 8, 1)

    @pytest.mark.parametrize("k", [2, 3, 4])
    @pytest.mark.parametrize("sid", SUITE_IDS)
    def test_suite_meets_branch_floors(self, sid, k):
        params = KnownRange(1, 8, k) if sid == "alg1" else KnownPhi(8, k)
        o = adv_known_phi(make_strategy(sid, params), 8, k, 4)
        assert validate_sequence(o.series, KnownPhi(8, k)) is None
        assert meets_floor(o), (o.branch, o.ratio, o.ratio_floor)


class TestDaily:
    def test_do_nothing_rises_every_day(self):
        o = adv_daily(make_strategy("do-nothing", DailyReturn(2, 2, 3)), 2, 2, 3, 1)
        assert o.series.prices == (1, 2, 4, 8)
        assert o.ratio == pytest.approx(8, rel=1e-12)

    def test_alg3_zigzag(self):
        o = adv_daily(make_strategy("alg3", DailyReturn(2, 2, 9)), 2, 2, 9, 1)
        assert o.series.prices == (1, 2, 4, 8, 4, 2, 1, 2, 4, 8)
        assert o.result.onl_return == pytest.approx(1 / 8, rel=1e-12)
        assert o.result.opt_return == pytest.approx(8, rel=1e-12)
        assert o.ratio == pytest.approx(64, rel=1e-9)

    def test_buy_and_hold_falls_every_day(self):
        o = adv_daily(make_strategy("buy-and-hold", DailyReturn(2, 2, 3)), 2, 2, 3, 1)
        assert o.series.prices == (1, 0.5, 0.25, 0.125)
        assert o.result.opt_return == 1
        assert o.ratio == pytest.approx(8, rel=1e-12)

    @pytest.mark.parametrize("sid", ["alg3", "alg4", "do-nothing", "buy-and-hold", "random:3"])
    def test_self_consistent(self, sid):
        params = DailyReturn(3, 2, 12, 2)
        o = adv_daily(make_strategy(sid, params), 3, 2, 12, 2)
        assert validate_sequence(o.series, params) is None
        assert o.result.opt_return == opt_return_dp(o.series, 2)
        assert o.opt_floor == pytest.approx(o.result.opt_return, rel=1e-12)
        assert o.ratio >= 1


@pytest.mark.parametrize(
    "run",
    [
        lambda s: adv_one_trade(make_strategy(s, KnownRange(1, 8)), 8, 6),
        lambda s: adv_known_range(make_strategy(s, KnownRange(1, 8, 3)), 8, 3, 6),
        lambda s: adv_known_phi(make_strategy(s, KnownPhi(8, 3)), 8, 3, 6),
    ],
)
@pytest.mark.parametrize("sid", ["alg2", "random:7"])
def test_deterministic(run, sid):
    assert run(sid).series == run(sid).series


def test_lower_bound_approaches_upper_for_alg1():
    ratios = [adv_known_range(make_strategy("alg1", KnownRange(1, 8, 2)), 8, 2, n).ratio for n in (3, 6, 12)]
    upper = theoretical_bound(KnownRange(1, 8, 2))
    assert all(r <= upper * (1 + ETA) for r in ratios)
    assert ratios[-1] >= upper * 8 ** (-1 / 12) * (1 - ETA)
    assert not math.isclose(ratios[0], upper)
