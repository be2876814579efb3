"""Domain types for k-trade two-way trading games.

Prices are positive floats indexed by day ``0..T``. A trade is a pair
``(b, s)`` of buy/sell days; its gain is ``p(s) / p(b)`` and the return of a
set of trades is the product of their gains. Returns are carried in the log
domain internally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

# Relative tolerance for every threshold comparison and model bound.
ETA = 1e-9


class InvalidParams(ValueError):
    """Model parameters violate their invariants."""


class SequenceViolation(ValueError):
    """A price series does not satisfy the governing model."""

    def __init__(self, violation: Violation):
        super().__init__(str(violation))
        self.violation = violation


class Action(str, enum.Enum):
    BUY = "buy"
    SELL = "sell"
    HOLD = "hold"


@dataclass(frozen=True)
class PriceSeries:
    prices: tuple[float, ...]

    def __post_init__(self):
        prices = tuple(float(p) for p in self.prices)
        if not prices:
            raise ValueError("price series must contain at least one price")
        for day, p in enumerate(prices):
            if not (math.isfinite(p) and p > 0):
                raise ValueError(f"price on day {day} must be positive and finite, got {p!r}")
        object.__setattr__(self, "prices", prices)

    @property
    def T(self) -> int:
        return len(self.prices) - 1

    @cached_property
    def log_prices(self) -> tuple[float, ...]:
        return tuple(math.log(p) for p in self.prices)

    def scaled(self, c: float) -> PriceSeries:
        return PriceSeries(tuple(p * c for p in self.prices))

    def __len__(self) -> int:
        return len(self.prices)

    def __getitem__(self, day: int) -> float:
        return self.prices[day]


def as_series(prices: PriceSeries | Iterable[float]) -> PriceSeries:
    if isinstance(prices, PriceSeries):
        return prices
    return PriceSeries(tuple(prices))


def _check_k(k: int) -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise InvalidParams(f"trade budget k must be a positive integer, got {k!r}")


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidParams(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class KnownRange:
    """Prices stay inside ``[m, M]`` and both ends are known up front."""

    m: float
    M: float
    k: int = 1

    def __post_init__(self):
        _positive("m", self.m)
        _positive("M", self.M)
        if self.m > self.M:
            raise InvalidParams(f"m must not exceed M (m={self.m}, M={self.M})")
        _check_k(self.k)

    @property
    def phi(self) -> float:
        return self.M / self.m

    name = "known-range"


@dataclass(frozen=True)
class KnownPhi:
    """Only the fluctuation ratio ``phi = M / m`` is known."""

    phi: float
    k: int = 2

    def __post_init__(self):
        _positive("phi", self.phi)
        if self.phi < 1:
            raise InvalidParams(f"phi must be >= 1, got {self.phi}")
        _check_k(self.k)

    name = "known-phi"


@dataclass(frozen=True)
class DailyReturn:
    """Bounded daily return: ``p(i)/beta <= p(i+1) <= alpha*p(i)`` over days ``0..T``."""

    alpha: float
    beta: float
    T: int
    k: int = 1

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 1):
                raise InvalidParams(f"{name} must be > 1, got {value!r}")
        if isinstance(self.T, bool) or not isinstance(self.T, int) or self.T < 1:
            raise InvalidParams(f"T must be a positive integer, got {self.T!r}")
        _check_k(self.k)

    name = "daily"


ModelParams = Union[KnownRange, KnownPhi, DailyReturn]


def param_summary(params: ModelParams) -> str:
    if isinstance(params, KnownRange):
        return f"m={params.m:.12g};M={params.M:.12g}"
    if isinstance(params, KnownPhi):
        return f"phi={params.phi:.12g}"
    return f"alpha={params.alpha:.12g};beta={params.beta:.12g};T={params.T}"


@dataclass(frozen=True)
class Observation:
    day: int
    price: float
    is_final: bool


@dataclass(frozen=True)
class Violation:
    day: int
    bound: str
    detail: str

    def __str__(self) -> str:
        return f"day {self.day}: {self.bound} bound violated ({self.detail})"


def validate_sequence(series: PriceSeries | Sequence[float], params: ModelParams) -> Violation | None:
    """Return the first violation of the model's price constraints, or None."""
    series = as_series(series)
    prices = series.prices
    if isinstance(params, KnownRange):
        lo, hi = params.m * (1 - ETA), params.M * (1 + ETA)
        for day, p in enumerate(prices):
            if p < lo:
                return Violation(day, "lower", f"price {p:.12g} < m={params.m:.12g}")
            if p > hi:
                return Violation(day, "upper", f"price {p:.12g} > M={params.M:.12g}")
        return None
    if isinstance(params, KnownPhi):
        cap = params.phi * (1 + ETA)
        lo = hi = prices[0]
        for day, p in enumerate(prices):
            lo, hi = min(lo, p), max(hi, p)
            if hi / lo > cap:
                return Violation(day, "ratio", f"max/min {hi / lo:.12g} > phi={params.phi:.12g}")
        return None
    if isinstance(params, DailyReturn):
        if len(prices) != params.T + 1:
            return Violation(
                min(len(prices), params.T + 1) - 1,
                "length",
                f"expected {params.T + 1} prices, got {len(prices)}",
            )
        for day in range(1, len(prices)):
            prev, p = prices[day - 1], prices[day]
            if p > params.alpha * prev * (1 + ETA):
                return Violation(day, "upper", f"{p:.12g} > alpha*{prev:.12g}")
            if p < prev / params.beta * (1 - ETA):
                return Violation(day, "lower", f"{p:.12g} < {prev:.12g}/beta")
        return None
    raise TypeError(f"unknown model params {params!r}")


def require_valid(series: PriceSeries | Sequence[float], params: ModelParams) -> None:
    violation = validate_sequence(series, params)
    if violation is not None:
        raise SequenceViolation(violation)


@dataclass(frozen=True)
class TradeLog:
    trades: tuple[tuple[int, int], ...] = ()
    forced_final_sale: bool = False

    def __post_init__(self):
        trades = tuple((int(b), int(s)) for b, s in self.trades)
        prev_sell = -1
        for b, s in trades:
            if not b < s:
                raise ValueError(f"trade ({b}, {s}) must buy strictly before it sells")
            if b <= prev_sell:
                raise ValueError(f"trade ({b}, {s}) buys on or before the previous sale on day {prev_sell}")
            prev_sell = s
        object.__setattr__(self, "trades", trades)

    def __len__(self) -> int:
        return len(self.trades)


def log_return(trades: Iterable[tuple[int, int]], log_prices: Sequence[float]) -> float:
    """Sum of log gains, accumulated left to right (buy then sell, trade by trade).

    The offline DP and the brute-force oracle use this exact operation order,
    which is what makes their results bit-identical.
    """
    acc = 0.0
    for b, s in trades:
        acc = acc - log_prices[b]
        acc = acc + log_prices[s]
    return acc


def trade_log_return(log: TradeLog, series: PriceSeries | Sequence[float]) -> float:
    series = as_series(series)
    for b, s in log.trades:
        if not (0 <= b < len(series) and 0 <= s < len(series)):
            raise IndexError(f"trade ({b}, {s}) outside series of length {len(series)}")
    return log_return(log.trades, series.log_prices)


def trade_return(log: TradeLog, series: PriceSeries | Sequence[float]) -> float:
    """Product of the gains ``p(s)/p(b)`` of every trade; 1 for an empty log."""
    return math.exp(trade_log_return(log, series))


@dataclass(frozen=True)
class TraceRow:
    day: int
    price: float
    action: Action
    trades_used: int
    cum_log_return: float


@dataclass(frozen=True)
class GameResult:
    strategy: str
    params: ModelParams
    series: PriceSeries
    onl_log: TradeLog
    onl_log_return: float
    opt_log_return: float
    trace: tuple[TraceRow, ...] = field(repr=False)

    @property
    def onl_return(self) -> float:
        return math.exp(self.onl_log_return)

    @property
    def opt_return(self) -> float:
        return math.exp(self.opt_log_return)

    @property
    def ratio(self) -> float:
        return math.exp(self.opt_log_return - self.onl_log_return)

    @property
    def k(self) -> int:
        return self.params.k
