"""Readers and writers for series files, traces, outcomes and reports."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Union

from .adversaries import AdversaryOutcome
from .analysis import FuzzReport, UnsupportedBound, theoretical_bound
from .model import GameResult, KnownPhi, KnownRange, ModelParams, PriceSeries, param_summary

TRACE_COLUMNS = ("day", "price", "action", "trades_used", "cum_log_return")
REPORT_COLUMNS = (
    "strategy",
    "model",
    "k",
    "param_summary",
    "onl_return",
    "opt_return",
    "ratio",
    "bound",
    "ratio_over_bound",
)


class SeriesFormatError(ValueError):
    pass


def fmt(x: float) -> str:
    return f"{x:.12g}"


def num(x: float) -> float:
    """Round to 12 significant digits for JSON output."""
    if not math.isfinite(x):
        return x
    return float(fmt(x))


def parse_series(text: str, source: str = "<string>") -> PriceSeries:
    prices = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            price = float(line)
        except ValueError:
            raise SeriesFormatError(f"{source}:{lineno}: not a number: {line!r}") from None
        if not (math.isfinite(price) and price > 0):
            raise SeriesFormatError(f"{source}:{lineno}: price must be positive and finite: {line!r}")
        prices.append(price)
    if not prices:
        raise SeriesFormatError(f"{source}: no prices found")
    return PriceSeries(tuple(prices))


def read_series(path: Union[str, Path]) -> PriceSeries:
    path = Path(path)
    return parse_series(path.read_text(encoding="utf-8"), str(path))


def write_series(series: PriceSeries, path: Union[str, Path], comment: str = "") -> None:
    # repr() round-trips floats exactly, so a replay sees the very same prices
    lines = [f"# {comment}"] if comment else []
    lines.extend(repr(p) for p in series.prices)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trace(result: GameResult, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for row in result.trace:
            writer.writerow([row.day, fmt(row.price), row.action.value, row.trades_used, fmt(row.cum_log_return)])


def params_dict(params: ModelParams) -> dict:
    if isinstance(params, KnownRange):
        return {"model": params.name, "m": num(params.m), "M": num(params.M), "k": params.k}
    if isinstance(params, KnownPhi):
        return {"model": params.name, "phi": num(params.phi), "k": params.k}
    return {
        "model": params.name,
        "alpha": num(params.alpha),
        "beta": num(params.beta),
        "T": params.T,
        "k": params.k,
    }


def upper_bound_or_none(params: ModelParams):
    try:
        return theoretical_bound(params, "upper")
    except UnsupportedBound:
        return None


def result_dict(result: GameResult) -> dict:
    bound = upper_bound_or_none(result.params)
    return {
        "strategy": result.strategy,
        "params": params_dict(result.params),
        "onl_return": num(result.onl_return),
        "opt_return": num(result.opt_return),
        "ratio": num(result.ratio),
        "bound": None if bound is None else num(bound),
        "trades": [list(t) for t in result.onl_log.trades],
        "forced_final_sale": result.onl_log.forced_final_sale,
    }


def outcome_dict(outcome: AdversaryOutcome, series_path: Union[str, Path, None] = None) -> dict:
    return {
        "construction": outcome.construction,
        "params": {**params_dict(outcome.params), "n": outcome.n},
        "strategy": outcome.result.strategy,
        "branch": outcome.branch,
        "ratio": num(outcome.ratio),
        "floor": num(outcome.ratio_floor),
        "opt_floor": num(outcome.opt_floor),
        "onl_return": num(outcome.result.onl_return),
        "opt_return": num(outcome.result.opt_return),
        "series_path": None if series_path is None else str(series_path),
    }


def fuzz_dict(report: FuzzReport, worst_path: Union[str, Path, None] = None) -> dict:
    return {
        "strategy": report.strategy,
        "params": params_dict(report.params),
        "generator": report.generator,
        "trials": report.trials,
        "seed": report.seed,
        "max_ratio": num(report.max_ratio),
        "bound": num(report.bound),
        "allowance": num(report.allowance),
        "slack": num(report.slack),
        "passed": report.passed,
        "exceedances": report.exceedances,
        "dominance_violations": report.dominance_violations,
        "worst_trial": report.worst_trial,
        "worst_series": [num(p) for p in report.worst_series.prices],
        "counterexample": None
        if report.counterexample is None
        else [num(p) for p in report.counterexample.prices],
        "worst_series_path": None if worst_path is None else str(worst_path),
    }


def write_json(data: dict, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(data) + "\n", encoding="utf-8")


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=False)


def _report_row(item) -> list[str]:
    if isinstance(item, AdversaryOutcome):
        item = item.result
    if isinstance(item, FuzzReport):
        strategy, params = item.strategy, item.params
        onl, opt, ratio, bound = item.worst_onl_return, item.worst_opt_return, item.max_ratio, item.bound
    elif isinstance(item, GameResult):
        strategy, params = item.strategy, item.params
        onl, opt, ratio = item.onl_return, item.opt_return, item.ratio
        bound = upper_bound_or_none(params)
    else:
        raise TypeError(f"cannot report {type(item).__name__}")
    return [
        strategy,
        params.name,
        str(params.k),
        param_summary(params),
        fmt(onl),
        fmt(opt),
        fmt(ratio),
        "" if bound is None else fmt(bound),
        "" if bound is None else fmt(ratio / bound),
    ]


def export_report(results: Iterable[Union[GameResult, FuzzReport, AdversaryOutcome]], path: Union[str, Path]) -> None:
    """One CSV row per result, in the order given."""
    rows = [_report_row(item) for item in results]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        writer.writerows(rows)

