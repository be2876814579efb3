"""Command line entry point: ``twoway {simulate,adversary,opt,fuzz,bounds}``.

Exit codes: 0 success, 2 invalid input or parameters, 3 a fuzz campaign found
a ratio above the theoretical bound.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import adversaries, io
from .analysis import GeneratorSpec, UnsupportedBound, fuzz_campaign, theoretical_bound
from .engine import ContractViolation, run_game
from .model import DailyReturn, KnownPhi, KnownRange, require_valid
from .oracle import opt_return_dp, opt_trades
from .strategies import make_strategy

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION = 0, 2, 3
MODELS = ("known-range", "known-phi", "daily")
CONSTRUCTIONS = ("one-trade", "known-range", "known-phi", "daily")


class UsageError(ValueError):
    pass


def _add_model_args(p: argparse.ArgumentParser, model_required: bool = True) -> None:
    p.add_argument("--model", choices=MODELS, required=model_required)
    p.add_argument("--m", type=float, default=None, help="minimum price (known-range)")
    p.add_argument("--M", type=float, default=None, help="maximum price (known-range)")
    p.add_argument("--phi", type=float, default=None, help="fluctuation ratio M/m")
    p.add_argument("--alpha", type=float, default=None, help="max daily rise factor")
    p.add_argument("--beta", type=float, default=None, help="max daily fall factor")
    p.add_argument("--T", type=int, default=None, help="horizon (last day index)")
    p.add_argument("--k", type=int, default=1, help="trade budget")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"model {args.model} needs {', '.join(missing)}")


def model_params(args, T_default: Optional[int] = None):
    if args.model == "known-range":
        if args.M is None and args.phi is not None:
            m = 1.0 if args.m is None else args.m
            return KnownRange(m, m * args.phi, args.k)
        _need(args, "M")
        return KnownRange(1.0 if args.m is None else args.m, args.M, args.k)
    if args.model == "known-phi":
        if args.phi is None and args.M is not None:
            return KnownPhi(args.M / (1.0 if args.m is None else args.m), args.k)
        _need(args, "phi")
        return KnownPhi(args.phi, args.k)
    if args.T is None:
        args.T = T_default
    _need(args, "alpha", "beta", "T")
    return DailyReturn(args.alpha, args.beta, args.T, args.k)


def _seed(args) -> int:
    env = os.environ.get("TWOWAY_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"TWOWAY_SEED must be an integer, got {env!r}") from None
    return args.seed


def cmd_simulate(args) -> int:
    series = io.read_series(args.prices)
    params = model_params(args, T_default=series.T)
    require_valid(series, params)
    result = run_game(make_strategy(args.strategy, params), series, params)
    if args.trace:
        io.write_trace(result, args.trace)
    data = io.result_dict(result)
    if args.out:
        io.write_json(data, args.out)
    if args.report:
        io.export_report([result], args.report)
    print(io.dumps(data))
    return EXIT_OK


def cmd_adversary(args) -> int:
    c = args.construction
    if c == "daily":
        args.model = "daily"
        params = model_params(args)
        strategy = make_strategy(args.strategy, params)
        outcome = adversaries.adv_daily(strategy, params.alpha, params.beta, params.T, params.k)
    elif c == "known-phi":
        args.model = "known-phi"
        params = model_params(args)
        strategy = make_strategy(args.strategy, params)
        outcome = adversaries.adv_known_phi(strategy, params.phi, params.k, args.n)
    else:
        args.model = "known-range"
        if args.m not in (None, 1.0):
            raise UsageError("range constructions are normalized to m = 1")
        params = model_params(args)
        strategy = make_strategy(args.strategy, params)
        if c == "one-trade":
            outcome = adversaries.adv_one_trade(strategy, params.M, args.n, params.k)
        else:
            outcome = adversaries.adv_known_range(strategy, params.M, params.k, args.n)
    if args.series_out:
        io.write_series(outcome.series, args.series_out, f"{c} vs {outcome.result.strategy}")
    data = io.outcome_dict(outcome, args.series_out)
    if args.out:
        io.write_json(data, args.out)
    if args.trace:
        io.write_trace(outcome.result, args.trace)
    if args.report:
        io.export_report([outcome], args.report)
    print(io.dumps(data))
    return EXIT_OK


def cmd_opt(args) -> int:
    series = io.read_series(args.prices)
    if args.k < 0:
        raise UsageError("--k must be non-negative")
    value = opt_return_dp(series, args.k)
    log = opt_trades(series, args.k)
    print(io.fmt(value))
    print(" ".join(f"({b},{s})" for b, s in log.trades))
    return EXIT_OK


def cmd_fuzz(args) -> int:
    params = model_params(args)
    spec = GeneratorSpec(args.generator, args.min_T, args.max_T)
    report = fuzz_campaign(args.strategy, params, spec, args.trials, _seed(args))
    worst_path = args.worst_out
    if worst_path:
        series = report.counterexample or report.worst_series
        io.write_series(series, worst_path, f"worst of {report.trials} trials, ratio {io.fmt(report.max_ratio)}")
    data = io.fuzz_dict(report, worst_path)
    if args.out:
        io.write_json(data, args.out)
    if args.report:
        io.export_report([report], args.report)
    print(io.dumps(data))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_bounds(args) -> int:
    ks = [args.k] if args.k_max is None else list(range(args.k, args.k_max + 1))
    print("model,k,side,n,bound")
    for k in ks:
        args.k = k
        params = model_params(args)
        rows = [("upper", None)] + [("lower", n) for n in args.n]
        for side, n in rows:
            try:
                value = io.fmt(theoretical_bound(params, side, n))
            except UnsupportedBound:
                value = "n/a"
            print(f"{params.name},{k},{side},{'' if n is None else n},{value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twoway", description="k-trade two-way trading: games, adversaries, bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a strategy over a price file")
    p.add_argument("--strategy", required=True)
    p.add_argument("--prices", required=True, type=Path)
    _add_model_args(p)
    p.add_argument("--trace", type=Path, help="trace CSV output")
    p.add_argument("--out", type=Path, help="result JSON output")
    p.add_argument("--report", type=Path, help="summary CSV output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("adversary", help="play a strategy against a lower-bound construction")
    p.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    p.add_argument("--strategy", required=True)
    _add_model_args(p, model_required=False)
    p.add_argument("--n", type=int, default=adversaries.DEFAULT_N, help="grid resolution (eps = 1/n)")
    p.add_argument("--series-out", type=Path, help="realized series output")
    p.add_argument("--out", type=Path, help="outcome JSON output")
    p.add_argument("--trace", type=Path, help="trace CSV output")
    p.add_argument("--report", type=Path, help="summary CSV output")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("opt", help="offline optimum of a price file")
    p.add_argument("--prices", required=True, type=Path)
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("fuzz", help="random search for ratios above the upper bound")
    p.add_argument("--strategy", required=True)
    _add_model_args(p)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generator", default="mixed")
    p.add_argument("--min-T", dest="min_T", type=int, default=1)
    p.add_argument("--max-T", dest="max_T", type=int, default=50)
    p.add_argument("--out", type=Path, help="fuzz report JSON output")
    p.add_argument("--worst-out", type=Path, help="worst (or minimized counterexample) series output")
    p.add_argument("--report", type=Path, help="summary CSV output")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bounds", help="table of theoretical competitive ratios")
    _add_model_args(p)
    p.add_argument("--k-max", dest="k_max", type=int, default=None, help="tabulate k..k_max")
    p.add_argument("--n", type=int, nargs="*", default=[adversaries.DEFAULT_N], help="lower-bound grid resolutions")
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ContractViolation, OSError) as exc:
        # ValueError covers InvalidParams, SequenceViolation, DegenerateHorizon and file format errors
        print(f"twoway {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def execute(argv: Sequence[str]) -> int:
    """Run the CLI without exiting the interpreter; argparse usage errors map to 2."""
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
