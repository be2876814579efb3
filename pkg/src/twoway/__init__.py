"""Online k-trade two-way trading: strategies, adversaries, offline optimum and bounds."""

from .adversaries import AdversaryOutcome, GridSpec, adv_daily, adv_known_phi, adv_known_range, adv_one_trade
from .analysis import FuzzReport, GeneratorSpec, competitive_ratio, fuzz_campaign, theoretical_bound
from .engine import ContractViolation, run_game
from .model import (
    ETA,
    Action,
    DailyReturn,
    GameResult,
    KnownPhi,
    KnownRange,
    Observation,
    PriceSeries,
    TradeLog,
    trade_return,
    validate_sequence,
)
from .oracle import opt_return_bruteforce, opt_return_dp, opt_trades
from .strategies import compute_static_times, make_strategy

__version__ = "0.1.0"
