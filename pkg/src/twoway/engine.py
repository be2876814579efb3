"""Game engine: drives a strategy against a fixed series or an adaptive adversary.

A price source is a generator that yields ``(price, is_final)`` once per day
and receives, via ``send``, the action that actually took effect that day.
Fixed series ignore what they are sent; adversaries use it to pick the next
price.
"""

from __future__ import annotations

import math
from typing import Any, Generator, Iterable, Protocol, Tuple, Union

from .model import (
    Action,
    GameResult,
    ModelParams,
    Observation,
    PriceSeries,
    TraceRow,
    TradeLog,
    as_series,
    require_valid,
    trade_log_return,
)
from .oracle import opt_log_return_dp

Tick = Tuple[float, bool]
PriceFeed = Generator[Tick, Action, Any]


class ContractViolation(RuntimeError):
    """A strategy asked for an action that the rules never allow."""


class Strategy(Protocol):
    name: str

    def initial_state(self) -> Any: ...

    def decide(self, state: Any, obs: Observation) -> tuple[Action, Any]: ...


def replay(series: PriceSeries) -> PriceFeed:
    last = series.T
    for day, price in enumerate(series.prices):
        yield price, day == last


def run_game(
    strategy: Strategy,
    source: Union[PriceSeries, Iterable[float], PriceFeed],
    params: ModelParams,
) -> GameResult:
    """Play one game and score it against the offline optimum with the same k."""
    if hasattr(source, "send"):
        feed = source
    else:
        feed = replay(as_series(source))

    k = params.k
    state = strategy.initial_state()
    prices: list[float] = []
    trades: list[tuple[int, int]] = []
    trace: list[TraceRow] = []
    holding = False
    buy_day = -1
    forced = False
    cum = 0.0

    price, final = next(feed)
    day = 0
    while True:
        price = float(price)
        prices.append(price)
        obs = Observation(day, price, final)
        action, state = strategy.decide(state, obs)
        action = Action(action)

        if action is Action.BUY:
            if holding:
                raise ContractViolation(f"{strategy.name} bought on day {day} while already holding")
            if final or len(trades) >= k:
                action = Action.HOLD
            else:
                holding, buy_day = True, day
        elif action is Action.SELL:
            if not holding:
                raise ContractViolation(f"{strategy.name} sold on day {day} while not holding")
        if final and holding and action is not Action.SELL:
            action = Action.SELL
        if final and holding:
            forced = True
        if action is Action.SELL:
            trades.append((buy_day, day))
            holding = False
            # same operation order as model.log_return, so the final value matches exactly
            cum = cum - math.log(prices[buy_day])
            cum = cum + math.log(price)

        trace.append(TraceRow(day, price, action, len(trades) + (1 if holding else 0), cum))
        if final:
            break
        price, final = feed.send(action)
        day += 1

    series = PriceSeries(tuple(prices))
    require_valid(series, params)
    log = TradeLog(tuple(trades), forced)
    return GameResult(
        strategy=strategy.name,
        params=params,
        series=series,
        onl_log=log,
        onl_log_return=trade_log_return(log, series),
        opt_log_return=opt_log_return_dp(series, k),
        trace=tuple(trace),
    )
