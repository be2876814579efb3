"""Adaptive adversaries realizing the lower-bound constructions.

Each adversary is a price feed (see ``engine``) that watches the strategy's
actions and picks the next price. While it runs it also records the trades an
offline player would make under the construction (the *plan*) and which
branch of the construction was taken; the plan's return is a floor that the
true offline optimum must meet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .engine import PriceFeed, Strategy, run_game
from .model import (
    ETA,
    Action,
    DailyReturn,
    GameResult,
    KnownPhi,
    KnownRange,
    ModelParams,
    PriceSeries,
    TradeLog,
    trade_return,
    validate_sequence,
)
from .oracle import opt_trades

DEFAULT_N = 10


@dataclass(frozen=True)
class GridSpec:
    """Geometric grid ``m * phi^(i/n)`` for ``i = 0..n``; resolution n plays the role of 1/eps."""

    n: int = DEFAULT_N
    m: float = 1.0
    phi: float = 8.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"grid resolution must be >= 2, got {self.n}")

    @property
    def values(self) -> tuple[float, ...]:
        log_phi = math.log(self.phi)
        values = [self.m * math.exp(i / self.n * log_phi) for i in range(self.n + 1)]
        values[0], values[-1] = self.m, self.m * self.phi
        return tuple(values)


@dataclass(frozen=True)
class AdversaryOutcome:
    construction: str
    params: ModelParams
    n: Optional[int]
    branch: str
    series: PriceSeries
    plan: TradeLog
    opt_floor: float  # return of the planned offline trades on the realized series
    ratio_floor: float  # competitive ratio the construction guarantees on this branch
    result: GameResult

    @property
    def ratio(self) -> float:
        return self.result.ratio


class _Board:
    """Bookkeeping shared by the constructions: day counter, ONL holding state, plan."""

    def __init__(self):
        self.day = -1
        self.holding = False
        self.plan: list[tuple[int, int]] = []
        self.branch = ""

    def mark(self, label: str) -> None:
        # labels must be recorded before a final tick: the feed is never resumed after it
        self.branch = f"{self.branch}/{label}" if self.branch else label

    def tick(self, price: float, final: bool = False):
        self.day += 1
        action = yield price, final
        if action is Action.BUY:
            self.holding = True
        elif action is Action.SELL:
            self.holding = False
        return action


class _RangeRounds:
    """Rounds for a known range ``[m, m*phi]``: intermediate rounds then the one-trade round."""

    def __init__(self, board: _Board, m: float, phi: float, n: int):
        self.board = board
        self.lo = m
        self.a = m * math.exp(math.log(phi) / 3)
        self.b = m * math.exp(2 * math.log(phi) / 3)
        self.hi = m * phi
        self.grid = GridSpec(n, m, phi).values

    def rounds(self, first: int, k: int):
        board = self.board
        for i in range(first, k):
            if not board.holding:
                # rise phase: (a, hi) pairs until ONL buys
                pairs = []
                bought = False
                for _ in range(k - i):
                    if (yield from board.tick(self.a)) is Action.BUY:
                        bought = True
                        break
                    pairs.append((board.day, board.day + 1))
                    if (yield from board.tick(self.hi)) is Action.BUY:
                        bought = True
                        break
                if not bought:
                    board.plan.extend(pairs)
                    board.mark(f"no-buy-round-{i}")
                    break
            # fall phase: (lo, b) pairs until ONL sells
            pairs = []
            sold = False
            for _ in range(k - i + 1):
                if (yield from board.tick(self.lo)) is Action.SELL:
                    board.plan.append((board.day, board.day + 1))
                    sold = True
                    break
                pairs.append((board.day, board.day + 1))
                if (yield from board.tick(self.b)) is Action.SELL:
                    board.plan.append((board.day - 1, board.day + 1))
                    sold = True
                    break
            if not sold:
                board.plan.extend(pairs)
                board.mark(f"never-sells-round-{i}")
                yield from board.tick(self.lo, final=True)
                return
            yield from board.tick(self.hi)
        yield from self.one_trade()

    def one_trade(self):
        board = self.board
        v, n = self.grid, len(self.grid) - 1
        for i in range(n - 1, 0, -1):
            if (yield from board.tick(v[i])) is Action.BUY:
                if i < n - 1:
                    board.plan.append((board.day - 2, board.day - 1))
                board.mark(f"buy-at-v{i}")
                yield from board.tick(self.lo, final=True)
                return
            yield from board.tick(self.hi)
        board.plan.append((board.day - 1, board.day))
        board.mark("no-buy")
        yield from board.tick(v[0], final=True)


def _finish(construction, params, n, board, result, ratio_floor) -> AdversaryOutcome:
    plan = TradeLog(tuple(board.plan))
    if len(plan) > params.k:
        raise AssertionError(f"{construction}: planned {len(plan)} offline trades with k={params.k}")
    violation = validate_sequence(result.series, params)
    if violation is not None:
        raise AssertionError(f"{construction} emitted an invalid series: {violation}")
    return AdversaryOutcome(
        construction=construction,
        params=params,
        n=n,
        branch=board.branch,
        series=result.series,
        plan=plan,
        opt_floor=trade_return(plan, result.series),
        ratio_floor=ratio_floor,
        result=result,
    )


def adv_one_trade(strategy: Strategy, M: float, n: int = DEFAULT_N, k: int = 1) -> AdversaryOutcome:
    """Offer ``v_{n-1}, M, v_{n-2}, M, ..., v_1, M, v_0``; crash to 1 right after a buy."""
    params = KnownRange(1.0, M, k)
    board = _Board()
    feed = _RangeRounds(board, 1.0, M, n).one_trade()
    result = run_game(strategy, feed, params)
    return _finish("one-trade", params, n, board, result, M ** (1 - 1 / n))


def _known_range_floor(M: float, k: int, n: int, branch: str) -> float:
    if "never-sells" in branch:
        return M ** ((2 * k + 1) / 3)
    return M ** (2 * (k - 1) / 3 + 1 - 1 / n)


def adv_known_range(strategy: Strategy, M: float, k: int, n: int = DEFAULT_N) -> AdversaryOutcome:
    """Up to k-1 rounds of ``M^(1/3), M`` / ``1, M^(2/3)`` oscillation, then the one-trade round."""
    params = KnownRange(1.0, M, k)
    board = _Board()
    feed = _RangeRounds(board, 1.0, M, n).rounds(1, k)
    result = run_game(strategy, feed, params)
    return _finish("known-range", params, n, board, result, _known_range_floor(M, k, n, board.branch))


def _known_phi_feed(board: _Board, phi: float, k: int, n: int) -> PriceFeed:
    if (yield from board.tick(1.0)) is not Action.BUY:
        yield from board.tick(phi)
        board.plan.append((0, 1))
        board.mark("round1-rise")
        m = 1.0
    else:
        m = 1.0 / phi
        pairs = []
        for j in range(k):
            if (yield from board.tick(m)) is Action.SELL:
                board.plan.append((board.day, board.day + 1))
                yield from board.tick(1.0)
                break
            pairs.append((board.day, board.day + 1))
            if j == k - 1:
                board.plan.extend(pairs)
                board.mark("round1-never-sells")
                yield from board.tick(1.0, final=True)
                return
            action = yield from board.tick(1.0)
            if action is Action.SELL:
                board.plan.append((board.day - 1, board.day))
                break
        board.mark("round1-fall")
    yield from _RangeRounds(board, m, phi, n).rounds(2, k)


def _known_phi_floor(phi: float, k: int, n: int, branch: str) -> float:
    if branch == "round1-never-sells":
        return phi**k
    if "never-sells" in branch:
        return phi ** ((2 * k + 2) / 3)
    return phi ** ((2 * k + 2) / 3 - 1 / n)


def adv_known_phi(strategy: Strategy, phi: float, k: int, n: int = DEFAULT_N) -> AdversaryOutcome:
    """Round 1 reveals the range while putting ONL a factor phi behind; then as known range."""
    if k < 2:
        raise ValueError("the known-phi construction needs k >= 2")
    params = KnownPhi(phi, k)
    board = _Board()
    result = run_game(strategy, _known_phi_feed(board, phi, k, n), params)
    return _finish("known-phi", params, n, board, result, _known_phi_floor(phi, k, n, board.branch))


def _daily_feed(board: _Board, alpha: float, beta: float, T: int) -> PriceFeed:
    price = 1.0
    for day in range(T + 1):
        yield from board.tick(price, final=day == T)
        price = price / beta if board.holding else price * alpha


def adv_daily(strategy: Strategy, alpha: float, beta: float, T: int, k: int) -> AdversaryOutcome:
    """Zig-zag: up by alpha each day ONL is flat, down by beta each day it holds."""
    params = DailyReturn(alpha, beta, T, k)
    board = _Board()
    result = run_game(strategy, _daily_feed(board, alpha, beta, T), params)
    board.mark("zig-zag")
    # the offline optimum of the realized series is the floor here
    board.plan = list(opt_trades(result.series, k).trades)
    return _finish("daily", params, None, board, result, 1.0)


def meets_floor(outcome: AdversaryOutcome) -> bool:
    return (
        outcome.ratio >= outcome.ratio_floor * (1 - ETA)
        and outcome.result.opt_return >= outcome.opt_floor * (1 - ETA)
    )
