"""Offline optimum: the best return achievable with at most k all-in trades.

A sale and the next purchase never share a day. Allowing it would not change
the optimum: such a pair merges into one longer trade with the same return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .model import PriceSeries, TradeLog, as_series, log_return

NEG_INF = float("-inf")
BRUTEFORCE_CAP = 16


@dataclass(frozen=True)
class OptTable:
    """``cash[j][i]``: best log return at the end of day i, flat, with at most j trades.
    ``hold[j][i]``: best (log return - log buy price) at the end of day i while holding trade j."""

    cash: tuple[tuple[float, ...], ...]
    hold: tuple[tuple[float, ...], ...]


def opt_table(series: PriceSeries | Sequence[float], k: int) -> OptTable:
    series = as_series(series)
    lp = series.log_prices
    n = len(lp)
    cash = [[0.0] * n]
    hold = [[NEG_INF] * n]
    for j in range(1, k + 1):
        prev_cash = cash[j - 1]
        c = [0.0] * n
        h = [NEG_INF] * n
        h[0] = 0.0 - lp[0]
        for i in range(1, n):
            sell = h[i - 1] + lp[i]
            c[i] = c[i - 1] if c[i - 1] >= sell else sell
            buy = prev_cash[i - 1] - lp[i]
            h[i] = h[i - 1] if h[i - 1] >= buy else buy
        cash.append(c)
        hold.append(h)
    return OptTable(tuple(map(tuple, cash)), tuple(map(tuple, hold)))


def opt_log_return_dp(series: PriceSeries | Sequence[float], k: int) -> float:
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    series = as_series(series)
    lp = series.log_prices
    n = len(lp)
    # Rolling version of opt_table; same operations in the same order.
    cash_prev = [0.0] * n
    for _ in range(k):
        c = [0.0] * n
        h = 0.0 - lp[0]
        for i in range(1, n):
            sell = h + lp[i]
            c[i] = c[i - 1] if c[i - 1] >= sell else sell
            buy = cash_prev[i - 1] - lp[i]
            if buy > h:
                h = buy
        cash_prev = c
    return cash_prev[-1]


def opt_return_dp(series: PriceSeries | Sequence[float], k: int) -> float:
    """Maximum product of gains over all trade logs with at most k trades (>= 1)."""
    return math.exp(opt_log_return_dp(series, k))


def opt_trades(series: PriceSeries | Sequence[float], k: int, *, rel_tol: float = 1e-12) -> TradeLog:
    """A trade log attaining the offline optimum.

    Ties (within ``rel_tol`` in log space) go to fewer trades, then to the
    earliest buy and sell days.
    """
    series = as_series(series)
    lp = series.log_prices
    n = len(lp)
    best = opt_log_return_dp(series, k)
    tol = rel_tol * max(1.0, abs(best))
    budget = next(j for j in range(k + 1) if opt_log_return_dp(series, j) >= best - tol)

    # Suffix tables: flat[j][i] / held[j][i] = best log return collectable from
    # day i on, flat (resp. holding) with j trades left (the held trade counts).
    flat = [[0.0] * (n + 1) for _ in range(budget + 1)]
    held = [[NEG_INF] * (n + 1) for _ in range(budget + 1)]
    for j in range(1, budget + 1):
        for i in range(n - 1, -1, -1):
            held[j][i] = max(held[j][i + 1], lp[i] + flat[j - 1][i + 1])
            flat[j][i] = max(flat[j][i + 1], -lp[i] + held[j][i + 1])

    trades = []
    j, i, buy_day = budget, 0, None
    while i < n and j > 0:
        if buy_day is None:
            if -lp[i] + held[j][i + 1] >= flat[j][i] - tol and held[j][i + 1] > NEG_INF:
                buy_day = i
        elif lp[i] + flat[j - 1][i + 1] >= held[j][i] - tol:
            trades.append((buy_day, i))
            buy_day = None
            j -= 1
        i += 1
    return TradeLog(tuple(trades))


def opt_return_bruteforce(series: PriceSeries | Sequence[float], k: int, *, cap: int = BRUTEFORCE_CAP) -> float:
    """Enumerate every valid trade set of size <= k and return the best product."""
    return math.exp(opt_log_return_bruteforce(series, k, cap=cap))


def opt_log_return_bruteforce(series: PriceSeries | Sequence[float], k: int, *, cap: int = BRUTEFORCE_CAP) -> float:
    series = as_series(series)
    n = len(series)
    if n > cap:
        raise ValueError(f"brute force limited to {cap} prices, got {n}")
    lp = series.log_prices
    best = 0.0
    for j in range(1, k + 1):
        if 2 * j > n:
            break
        for days in combinations(range(n), 2 * j):
            value = log_return(zip(days[::2], days[1::2]), lp)
            if value > best:
                best = value
    return best
