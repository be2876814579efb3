"""Closed-form competitive ratios and randomized searches for bound violations."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .engine import run_game
from .model import (
    DailyReturn,
    GameResult,
    KnownPhi,
    KnownRange,
    ModelParams,
    PriceSeries,
    validate_sequence,
)
from .strategies import make_strategy

UPPER_TOL = 1 + 1e-9
LOWER_TOL = 1 - 1e-9


class UnsupportedBound(ValueError):
    pass


def daily_exponent(alpha: float, beta: float, T: int, k: int) -> float:
    """Exponent e such that the daily-return bound is alpha**e."""
    la, lb = math.log(alpha), math.log(beta)
    return T * 2 * k * lb / ((k + 1) * lb + k * la)


def theoretical_bound(params: ModelParams, side: str = "upper", n: Optional[int] = None) -> float:
    """Optimal deterministic competitive ratio for the model.

    ``side="lower"`` with resolution ``n`` gives the ratio the matching
    adversary forces at that resolution (the exponent loses ``1/n``).
    """
    if side not in ("upper", "lower"):
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    k = params.k
    if isinstance(params, DailyReturn):
        return params.alpha ** daily_exponent(params.alpha, params.beta, params.T, k)
    if isinstance(params, KnownRange):
        exponent = (2 * k + 1) / 3
    elif isinstance(params, KnownPhi):
        if k < 2:
            raise UnsupportedBound("known-phi bounds are established for k >= 2 only")
        exponent = (2 * k + 2) / 3
    else:
        raise TypeError(f"unknown model params {params!r}")
    if side == "lower":
        if n is None or n < 1:
            raise UnsupportedBound("a lower bound needs a grid resolution n >= 1")
        exponent -= 1 / n
    return params.phi**exponent


def competitive_ratio(result_or_opt, onl: Optional[float] = None) -> float:
    """OPT's return over ONL's; losses (returns below 1) divide in as usual."""
    if isinstance(result_or_opt, GameResult):
        return result_or_opt.ratio
    return result_or_opt / onl


# -- random series -----------------------------------------------------------


@dataclass(frozen=True)
class GeneratorSpec:
    """How fuzz trials draw price series.

    kind: ``mixed`` picks one of the others per trial; ``grid`` walks on
    ``m*phi^(j/6)`` (hits every reservation threshold exactly); ``iid`` draws
    log-uniform prices salted with threshold values; ``walk`` is a clamped
    log-space random walk. Daily models use ``mixed``, ``extreme`` (factors
    alpha, 1/beta or 1 only), ``uniform`` (log-uniform factors) or ``zigzag``
    (runs of extreme moves).
    """

    kind: str = "mixed"
    min_T: int = 1
    max_T: int = 50

    RANGE_KINDS = ("mixed", "grid", "iid", "walk")
    DAILY_KINDS = ("mixed", "extreme", "uniform", "zigzag")

    def __post_init__(self):
        if self.kind not in set(self.RANGE_KINDS) | set(self.DAILY_KINDS):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if not 0 <= self.min_T <= self.max_T:
            raise ValueError(f"need 0 <= min_T <= max_T, got {self.min_T}, {self.max_T}")

    def check(self, params: ModelParams) -> None:
        kinds = self.DAILY_KINDS if isinstance(params, DailyReturn) else self.RANGE_KINDS
        if self.kind not in kinds:
            raise ValueError(f"generator kind {self.kind!r} does not apply to the {params.name} model")


def _range_series(rng: random.Random, lo: float, phi: float, length: int, kind: str) -> list[float]:
    log_phi = math.log(phi)
    if kind == "mixed":
        kind = rng.choice(("grid", "grid", "iid", "walk"))
    if kind == "grid":
        steps = rng.choice((1, 2, 3, 6))
        j = rng.randrange(7)
        out = []
        for _ in range(length):
            out.append(lo * math.exp(j / 6 * log_phi) if 0 < j < 6 else (lo if j == 0 else lo * phi))
            if rng.random() < 0.3:
                j = rng.randrange(7)
            else:
                j = min(6, max(0, j + rng.randint(-steps, steps)))
        return out
    special = (lo, lo * phi ** (1 / 3), lo * phi ** (2 / 3), lo * phi)
    if kind == "iid":
        return [rng.choice(special) if rng.random() < 0.25 else lo * math.exp(rng.random() * log_phi) for _ in range(length)]
    x = rng.random() * log_phi
    sigma = log_phi * rng.choice((0.05, 0.2, 0.5))
    out = []
    for _ in range(length):
        out.append(rng.choice(special) if rng.random() < 0.1 else lo * math.exp(x))
        x = min(log_phi, max(0.0, x + rng.gauss(0.0, sigma)))
    return out


def _daily_series(rng: random.Random, alpha: float, beta: float, T: int, kind: str) -> list[float]:
    if kind == "mixed":
        kind = rng.choice(("extreme", "uniform", "zigzag", "zigzag"))
    la, lb = math.log(alpha), math.log(beta)
    factors: list[float] = []
    if kind == "zigzag":
        up = rng.random() < 0.5
        while len(factors) < T:
            run = rng.randint(1, max(1, T // 2))
            factors.extend([alpha if up else 1 / beta] * run)
            if rng.random() < 0.2:
                factors.append(1.0)
            up = not up
        factors = factors[:T]
    else:
        for _ in range(T):
            if kind == "extreme" or rng.random() < 0.3:
                factors.append(rng.choice((alpha, 1 / beta, 1.0)))
            else:
                factors.append(math.exp(-lb + rng.random() * (la + lb)))
    prices = [1.0]
    for f in factors:
        prices.append(prices[-1] * f)
    return prices


def random_series(rng: random.Random, params: ModelParams, spec: GeneratorSpec) -> PriceSeries:
    """Draw one model-valid series."""
    if isinstance(params, DailyReturn):
        return PriceSeries(tuple(_daily_series(rng, params.alpha, params.beta, params.T, spec.kind)))
    length = rng.randint(spec.min_T, spec.max_T) + 1
    if isinstance(params, KnownRange):
        prices = _range_series(rng, params.m, params.phi, length, spec.kind)
    else:
        # unknown absolute level; sometimes a narrower realized range than phi
        lo = math.exp(rng.uniform(-3.0, 3.0))
        phi = params.phi if rng.random() < 0.7 else params.phi ** rng.random()
        prices = _range_series(rng, lo, max(phi, 1.0), length, spec.kind)
    return PriceSeries(tuple(prices))


# -- campaigns ---------------------------------------------------------------


@dataclass(frozen=True)
class FuzzReport:
    strategy: str
    params: ModelParams
    generator: str
    trials: int
    seed: int
    max_ratio: float
    bound: float
    allowance: float  # multiplicative slack accepted on top of the bound
    worst_series: PriceSeries
    worst_trial: int
    worst_onl_return: float
    worst_opt_return: float
    exceedances: int
    dominance_violations: int
    counterexample: Optional[PriceSeries] = None

    @property
    def limit(self) -> float:
        return self.bound * self.allowance * UPPER_TOL

    @property
    def passed(self) -> bool:
        return self.exceedances == 0 and self.dominance_violations == 0

    @property
    def slack(self) -> float:
        return self.max_ratio / self.bound


def default_allowance(strategy_id: str, params: ModelParams) -> float:
    # the trailing stop can sell up to one beta-step past its level on each trade
    if strategy_id == "alg4" and isinstance(params, DailyReturn):
        return params.beta ** (2 * params.k)
    return 1.0


def minimize_counterexample(strategy_id: str, params: ModelParams, series: PriceSeries, limit: float) -> PriceSeries:
    """Greedily drop days (range models) or flatten daily moves while the ratio stays above ``limit``."""
    strategy = make_strategy(strategy_id, params)

    def exceeds(prices) -> bool:
        candidate = PriceSeries(tuple(prices))
        if validate_sequence(candidate, params) is not None:
            return False
        return run_game(strategy, candidate, params).ratio > limit

    prices = list(series.prices)
    changed = True
    while changed:
        changed = False
        if isinstance(params, DailyReturn):
            for day in range(1, len(prices)):
                if prices[day] == prices[day - 1]:
                    continue
                factor = prices[day - 1] / prices[day]
                candidate = prices[:day] + [p * factor for p in prices[day:]]
                if exceeds(candidate):
                    prices, changed = candidate, True
        else:
            day = 0
            while day < len(prices) and len(prices) > 1:
                candidate = prices[:day] + prices[day + 1 :]
                if exceeds(candidate):
                    prices, changed = candidate, True
                else:
                    day += 1
    return PriceSeries(tuple(prices))


def fuzz_campaign(
    strategy_id: str,
    params: ModelParams,
    generator: GeneratorSpec = GeneratorSpec(),
    trials: int = 1000,
    seed: int = 0,
    *,
    allowance: Optional[float] = None,
    minimize: bool = True,
) -> FuzzReport:
    """Play ``trials`` random games and record the worst ratio against the upper bound.

    Trial ``i`` draws its series from ``random.Random(seed + i)``, so a report
    is a pure function of its arguments.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    generator.check(params)
    strategy = make_strategy(strategy_id, params)
    bound = theoretical_bound(params, "upper")
    if allowance is None:
        allowance = default_allowance(strategy_id, params)
    limit = bound * allowance * UPPER_TOL

    worst: Optional[GameResult] = None
    worst_trial = -1
    exceedances = dominance = 0
    for trial in range(trials):
        rng = random.Random(seed + trial)
        series = random_series(rng, params, generator)
        result = run_game(strategy, series, params)
        if result.opt_log_return < result.onl_log_return or result.ratio < 1.0:
            dominance += 1
        if result.ratio > limit:
            exceedances += 1
        if worst is None or result.ratio > worst.ratio:
            worst, worst_trial = result, trial

    counterexample = None
    if exceedances and minimize:
        counterexample = minimize_counterexample(strategy_id, params, worst.series, limit)
    return FuzzReport(
        strategy=strategy_id,
        params=params,
        generator=generator.kind,
        trials=trials,
        seed=seed,
        max_ratio=worst.ratio,
        bound=bound,
        allowance=allowance,
        worst_series=worst.series,
        worst_trial=worst_trial,
        worst_onl_return=worst.onl_return,
        worst_opt_return=worst.opt_return,
        exceedances=exceedances,
        dominance_violations=dominance,
        counterexample=counterexample,
    )
