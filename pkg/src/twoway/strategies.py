"""Online trading strategies as pure ``(state, observation) -> (action, state)`` maps.

Every strategy sells on the final day if it still holds; the engine enforces
this too. Threshold tests are inclusive and use the relative tolerance ``ETA``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Optional

from .model import (
    ETA,
    Action,
    DailyReturn,
    InvalidParams,
    KnownPhi,
    KnownRange,
    ModelParams,
    Observation,
)

BUY, SELL, HOLD = Action.BUY, Action.SELL, Action.HOLD


class DegenerateHorizon(ValueError):
    """The horizon is too short for the static schedule to contain a trade."""


# -- reservation prices, known range -----------------------------------------


@dataclass(frozen=True)
class Alg1State:
    buy_threshold: float
    sell_threshold: float
    holding: bool = False
    trades_used: int = 0


def alg1_initial(params: KnownRange) -> Alg1State:
    return Alg1State(
        buy_threshold=params.m * params.phi ** (1 / 3),
        sell_threshold=params.m * params.phi ** (2 / 3),
    )


def alg1_decide(state: Alg1State, obs: Observation, params: KnownRange, k: int) -> tuple[Action, Alg1State]:
    """Buy at or below ``m*phi^(1/3)``, sell at or above ``m*phi^(2/3)``."""
    p = obs.price
    if obs.is_final:
        if state.holding:
            return SELL, replace(state, holding=False)
        return HOLD, state
    if not state.holding and state.trades_used < k and p <= state.buy_threshold * (1 + ETA):
        return BUY, replace(state, holding=True, trades_used=state.trades_used + 1)
    if state.holding and p >= state.sell_threshold * (1 - ETA):
        return SELL, replace(state, holding=False)
    return HOLD, state


# -- reservation prices, known phi -------------------------------------------


@dataclass(frozen=True)
class Alg2State:
    running_max: float = 0.0
    holding: bool = False
    buy_price: Optional[float] = None
    trades_used: int = 0


def alg2_decide(state: Alg2State, obs: Observation, phi: float, k: int) -> tuple[Action, Alg2State]:
    """Buy when the price is within the lowest ``phi^(1/3)`` of any range consistent
    with the maximum seen so far; sell after a gain of ``phi^(1/3)``."""
    p = obs.price
    if obs.is_final:
        if state.holding:
            return SELL, replace(state, holding=False, buy_price=None)
        return HOLD, state
    # running max is updated before the buy test
    state = replace(state, running_max=max(state.running_max, p))
    if (
        not state.holding
        and state.trades_used < k
        and p <= state.running_max / phi ** (2 / 3) * (1 + ETA)
    ):
        return BUY, replace(state, holding=True, buy_price=p, trades_used=state.trades_used + 1)
    if state.holding and p >= phi ** (1 / 3) * state.buy_price * (1 - ETA):
        return SELL, replace(state, holding=False, buy_price=None)
    return HOLD, state


# -- bounded daily return ----------------------------------------------------


@dataclass(frozen=True)
class StaticTimes:
    t1: int  # days flat before each purchase
    t2: int  # days held before each sale
    r: float  # alpha ** t1


def _round_half_up(x: float) -> int:
    # absorb float noise so that e.g. 2.4999999999999996 still rounds like 2.5
    return math.floor(x + 0.5 + 1e-9)


def compute_static_times(alpha: float, beta: float, T: int, k: int) -> StaticTimes:
    if not (alpha > 1 and beta > 1):
        raise InvalidParams("alpha and beta must exceed 1")
    if T < 1 or k < 1:
        raise InvalidParams("T and k must be positive")
    la, lb = math.log(alpha), math.log(beta)
    denom = (k + 1) * lb + k * la
    t1 = _round_half_up(lb / denom * T)
    t2 = _round_half_up(la / denom * T)
    if t2 < 1:
        raise DegenerateHorizon(f"T={T} is too short for k={k} trades (holding time rounds to 0)")
    return StaticTimes(t1=t1, t2=t2, r=alpha**t1)


@dataclass(frozen=True)
class TimerState:
    holding: bool = False
    trades_used: int = 0
    last_sale_day: int = 0
    buy_day: int = -1
    high: float = 0.0  # trailing max since purchase; only used by the stop-loss variant


def alg3_decide(state: TimerState, obs: Observation, times: StaticTimes, k: int) -> tuple[Action, TimerState]:
    """Static schedule: buy ``t1`` days after the last sale (or day 0), sell after ``t2`` days."""
    day = obs.day
    if obs.is_final:
        if state.holding:
            return SELL, replace(state, holding=False, last_sale_day=day)
        return HOLD, state
    if not state.holding and state.trades_used < k and day - state.last_sale_day >= times.t1:
        return BUY, replace(state, holding=True, buy_day=day, trades_used=state.trades_used + 1)
    if state.holding and day - state.buy_day >= times.t2:
        return SELL, replace(state, holding=False, last_sale_day=day)
    return HOLD, state


def alg4_decide(state: TimerState, obs: Observation, times: StaticTimes, beta: float, k: int) -> tuple[Action, TimerState]:
    """Timer-based buys as in the static schedule; trailing stop at ``h / beta^t2``.

    Equality with the stop level keeps the position.
    """
    day, p = obs.day, obs.price
    if obs.is_final:
        if state.holding:
            return SELL, replace(state, holding=False, last_sale_day=day)
        return HOLD, state
    if not state.holding:
        if state.trades_used < k and day - state.last_sale_day >= times.t1:
            return BUY, replace(state, holding=True, buy_day=day, high=p, trades_used=state.trades_used + 1)
        return HOLD, state
    high = max(state.high, p)
    if p < high / beta**times.t2 * (1 - ETA):
        return SELL, replace(state, holding=False, high=high, last_sale_day=day)
    return HOLD, replace(state, high=high)


# -- baselines ---------------------------------------------------------------


@dataclass(frozen=True)
class BaselineState:
    holding: bool = False
    trades_used: int = 0


def baseline_decide(kind: str, state: BaselineState, obs: Observation, k: int, seed: int = 0) -> tuple[Action, BaselineState]:
    if kind == "do-nothing":
        return HOLD, state
    if obs.is_final:
        if state.holding:
            return SELL, replace(state, holding=False)
        return HOLD, state
    if kind == "buy-and-hold":
        if obs.day == 0 and state.trades_used < k:
            return BUY, replace(state, holding=True, trades_used=state.trades_used + 1)
        return HOLD, state
    if kind == "random":
        # fresh generator per (seed, day): decisions depend on nothing else
        coin = random.Random(seed * 1_000_003 + obs.day).random()
        if state.holding:
            return (SELL, replace(state, holding=False)) if coin < 0.5 else (HOLD, state)
        if state.trades_used < k and coin < 0.5:
            return BUY, replace(state, holding=True, trades_used=state.trades_used + 1)
        return HOLD, state
    raise ValueError(f"unknown baseline {kind!r}")


# -- strategy objects used by the engine -------------------------------------


@dataclass(frozen=True)
class ReservationRange:
    params: KnownRange
    name: str = "alg1"

    def initial_state(self) -> Alg1State:
        return alg1_initial(self.params)

    def decide(self, state, obs):
        return alg1_decide(state, obs, self.params, self.params.k)


@dataclass(frozen=True)
class ReservationPhi:
    phi: float
    k: int
    name: str = "alg2"

    def initial_state(self) -> Alg2State:
        return Alg2State()

    def decide(self, state, obs):
        return alg2_decide(state, obs, self.phi, self.k)


@dataclass(frozen=True)
class StaticSchedule:
    times: StaticTimes
    k: int
    name: str = "alg3"

    def initial_state(self) -> TimerState:
        return TimerState()

    def decide(self, state, obs):
        return alg3_decide(state, obs, self.times, self.k)


@dataclass(frozen=True)
class TrailingStop:
    times: StaticTimes
    beta: float
    k: int
    name: str = "alg4"

    def initial_state(self) -> TimerState:
        return TimerState()

    def decide(self, state, obs):
        return alg4_decide(state, obs, self.times, self.beta, self.k)


@dataclass(frozen=True)
class Baseline:
    kind: str
    k: int
    seed: int = 0

    @property
    def name(self) -> str:
        return f"random:{self.seed}" if self.kind == "random" else self.kind

    def initial_state(self) -> BaselineState:
        return BaselineState()

    def decide(self, state, obs):
        return baseline_decide(self.kind, state, obs, self.k, self.seed)


STRATEGY_IDS = ("alg1", "alg2", "alg3", "alg4", "do-nothing", "buy-and-hold", "random:<seed>")


def make_strategy(strategy_id: str, params: ModelParams):
    """Build a strategy from its CLI identifier for the given model."""
    k = params.k
    if strategy_id == "alg1":
        if not isinstance(params, KnownRange):
            raise InvalidParams("alg1 needs the known-range model (m and M)")
        return ReservationRange(params)
    if strategy_id == "alg2":
        if isinstance(params, DailyReturn):
            raise InvalidParams("alg2 needs a model with a known fluctuation ratio")
        return ReservationPhi(params.phi, k)
    if strategy_id in ("alg3", "alg4"):
        if not isinstance(params, DailyReturn):
            raise InvalidParams(f"{strategy_id} needs the daily-return model")
        times = compute_static_times(params.alpha, params.beta, params.T, k)
        if strategy_id == "alg3":
            return StaticSchedule(times, k)
        return TrailingStop(times, params.beta, k)
    if strategy_id in ("do-nothing", "buy-and-hold"):
        return Baseline(strategy_id, k)
    if strategy_id.startswith("random:"):
        try:
            seed = int(strategy_id.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"bad random strategy seed in {strategy_id!r}") from None
        return Baseline("random", k, seed)
    raise ValueError(f"unknown strategy {strategy_id!r}; expected one of {', '.join(STRATEGY_IDS)}")


__all__ = [
    "Alg1State",
    "Alg2State",
    "Baseline",
    "BaselineState",
    "DegenerateHorizon",
    "ReservationPhi",
    "ReservationRange",
    "StaticSchedule",
    "StaticTimes",
    "TimerState",
    "TrailingStop",
    "alg1_decide",
    "alg1_initial",
    "alg2_decide",
    "alg3_decide",
    "alg4_decide",
    "baseline_decide",
    "compute_static_times",
    "make_strategy",
]
