import random

import pytest

from twoway.adversaries import adv_known_phi, adv_known_range
from twoway.analysis import (
    GeneratorSpec,
    UnsupportedBound,
    competitive_ratio,
    fuzz_campaign,
    minimize_counterexample,
    random_series,
    theoretical_bound,
)
from twoway.engine import run_game
from twoway.model import DailyReturn, KnownPhi, KnownRange, PriceSeries, validate_sequence
from twoway.strategies import make_strategy


class TestBounds:
    def test_known_range(self):
        assert theoretical_bound(KnownRange(1, 8, 2)) == pytest.approx(8 ** (5 / 3), rel=1e-12)
        assert theoretical_bound(KnownRange(1, 8, 1)) == pytest.approx(8, rel=1e-12)

    def test_known_range_depends_only_on_phi(self):
        assert theoretical_bound(KnownRange(3, 24, 2)) == pytest.approx(theoretical_bound(KnownRange(1, 8, 2)))

    def test_known_phi(self):
        assert theoretical_bound(KnownPhi(8, 2)) == pytest.approx(64, rel=1e-12)
        with pytest.raises(UnsupportedBound):
            theoretical_bound(KnownPhi(8, 1))
        with pytest.raises(UnsupportedBound):
            theoretical_bound(KnownPhi(8, 1), "lower", 10)

    @pytest.mark.parametrize("alpha, beta, T", [(2, 2, 9), (2, 2, 3), (3, 3, 12)])
    def test_daily_symmetric_one_trade(self, alpha, beta, T):
        assert theoretical_bound(DailyReturn(alpha, beta, T)) == pytest.approx(alpha ** (2 * T / 3), rel=1e-12)

    def test_daily_general(self):
        # alpha = 4, beta = 2, k = 2: exponent T*4*ln2/(3 ln2 + 2 ln4) = 4T/7
        assert theoretical_bound(DailyReturn(4, 2, 14, 2)) == pytest.approx(4.0**8, rel=1e-12)

    @pytest.mark.parametrize("params", [KnownRange(1, 8, 1), KnownRange(1, 5, 3), KnownPhi(8, 2), KnownPhi(3, 4)])
    def test_lower_below_upper_and_monotone_in_n(self, params):
        upper = theoretical_bound(params)
        lowers = [theoretical_bound(params, "lower", n) for n in (2, 5, 10, 100)]
        assert all(lo < upper for lo in lowers)
        assert lowers == sorted(lowers)
        assert lowers[-1] == pytest.approx(upper * params.phi ** (-1 / 100))

    def test_bad_side(self):
        with pytest.raises(ValueError):
            theoretical_bound(KnownRange(1, 8), "middle")


@pytest.mark.parametrize("opt, onl, expected", [(2, 1 / 3, 6), (1, 1, 1), (8, 2, 4)])
def test_competitive_ratio(opt, onl, expected):
    assert competitive_ratio(opt, onl) == pytest.approx(expected)


def test_competitive_ratio_of_result():
    params = KnownRange(1, 8)
    r = run_game(make_strategy("do-nothing", params), [1, 8], params)
    assert competitive_ratio(r) == pytest.approx(8)


@pytest.mark.parametrize(
    "params, kinds",
    [
        (KnownRange(1, 10, 2), GeneratorSpec.RANGE_KINDS),
        (KnownPhi(6, 2), GeneratorSpec.RANGE_KINDS),
        (DailyReturn(3, 2, 20, 2), GeneratorSpec.DAILY_KINDS),
    ],
)
def test_generated_series_are_valid(params, kinds):
    for kind in kinds:
        spec = GeneratorSpec(kind, 0, 30)
        for seed in range(100):
            series = random_series(random.Random(seed), params, spec)
            assert validate_sequence(series, params) is None


@pytest.mark.parametrize(
    "spec, params",
    [
        (GeneratorSpec("zigzag"), KnownRange(1, 8)),
        (GeneratorSpec("grid"), DailyReturn(2, 2, 9)),
    ],
)
def test_generator_mismatch(spec, params):
    with pytest.raises(ValueError):
        fuzz_campaign("do-nothing", params, spec, 10)


@pytest.mark.parametrize("make", [lambda: GeneratorSpec("nope"), lambda: GeneratorSpec(min_T=5, max_T=2)])
def test_invalid_generator(make):
    with pytest.raises(ValueError):
        make()


class TestFuzz:
    def test_alg1_k1(self):
        rep = fuzz_campaign("alg1", KnownRange(1, 8, 1), trials=300, seed=42)
        assert rep.passed and rep.max_ratio <= 8 * (1 + 1e-9)
        assert rep.dominance_violations == 0

    def test_do_nothing_stays_under_phi(self):
        rep = fuzz_campaign("do-nothing", KnownRange(1, 8, 1), trials=300, seed=1)
        assert rep.passed
        assert rep.max_ratio == pytest.approx(8, rel=1e-9)  # the grid generator reaches 1 -> 8

    def test_alg3_daily(self):
        rep = fuzz_campaign("alg3", DailyReturn(2, 2, 9), trials=300, seed=3)
        assert rep.passed and rep.max_ratio <= 64 * (1 + 1e-9)

    def test_alg4_within_allowance(self):
        rep = fuzz_campaign("alg4", DailyReturn(2, 2, 15, 2), trials=300, seed=3)
        assert rep.allowance == 16
        assert rep.passed

    def test_deterministic(self):
        a = fuzz_campaign("random:4", KnownPhi(5, 3), trials=200, seed=9)
        b = fuzz_campaign("random:4", KnownPhi(5, 3), trials=200, seed=9)
        assert a == b

    def test_finds_and_minimizes_violation(self):
        # limit 32/4 = 8: any series where two trades beat one range crossing exceeds it
        params = KnownRange(1, 8, 2)
        rep = fuzz_campaign("do-nothing", params, trials=300, seed=0, allowance=1 / 4)
        assert not rep.passed and rep.exceedances > 0
        ce = rep.counterexample
        assert ce is not None and len(ce) <= len(rep.worst_series)
        r = run_game(make_strategy("do-nothing", params), ce, params)
        assert r.ratio > rep.limit
        # every single-day deletion breaks it
        for day in range(len(ce)):
            rest = ce.prices[:day] + ce.prices[day + 1 :]
            if rest:
                assert run_game(make_strategy("do-nothing", params), rest, params).ratio <= rep.limit

    def test_minimize_daily_flattens_moves(self):
        params = DailyReturn(2, 2, 6)
        series = PriceSeries((1.0, 2.0, 4.0, 2.0, 4.0, 8.0, 16.0))
        out = minimize_counterexample("do-nothing", params, series, 15)
        assert len(out) == 7
        # the one down move got flattened away; nothing else can go
        assert all(b >= a for a, b in zip(out.prices, out.prices[1:]))
        assert run_game(make_strategy("do-nothing", params), out, params).ratio > 15

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            fuzz_campaign("alg1", KnownRange(1, 8), trials=0)


@pytest.mark.parametrize("n", [3, 5, 8])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_alg1_adversary_inside_sandwich(n, k):
    params = KnownRange(1, 8, k)
    o = adv_known_range(make_strategy("alg1", params), 8, k, n)
    assert theoretical_bound(params, "lower", n) * (1 - 1e-9) <= o.ratio <= theoretical_bound(params) * (1 + 1e-9)


@pytest.mark.parametrize("n", [3, 5, 8])
@pytest.mark.parametrize("k", [2, 3])
def test_alg2_adversary_inside_sandwich(n, k):
    params = KnownPhi(8, k)
    o = adv_known_phi(make_strategy("alg2", params), 8, k, n)
    assert theoretical_bound(params, "lower", n) * (1 - 1e-9) <= o.ratio <= theoretical_bound(params) * (1 + 1e-9)
