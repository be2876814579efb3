import itertools
from fractions import Fraction

SUITE_IDS = ["alg1", "alg2", "do-nothing", "buy-and-hold"] + [f"random:{s}" for s in range(1, 21)]


def enumerate_opt(prices, k):
    """Independent oracle: best product of exact rational gains over all trade sets."""
    prices = [Fraction(p) for p in prices]
    best = Fraction(1)
    for j in range(1, k + 1):
        for days in itertools.combinations(range(len(prices)), 2 * j):
            gain = Fraction(1)
            for b, s in zip(days[::2], days[1::2]):
                gain *= prices[s] / prices[b]
            best = max(best, gain)
    return best


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
