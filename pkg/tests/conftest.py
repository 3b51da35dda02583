import itertools

import numpy as np
import pytest

from knapga.core import Instance

_CRITERIA: list[tuple[str, bool, str]] = []


def exhaustive_optimum(pairs, capacity):
    """Reference optimum by itertools enumeration, independent of the package oracles."""
    best = 0
    for mask in itertools.product((0, 1), repeat=len(pairs)):
        w = sum(x * pw[1] for x, pw in zip(mask, pairs))
        if w <= capacity:
            best = max(best, sum(x * pw[0] for x, pw in zip(mask, pairs)))
    return best


def random_instance(rng: np.random.Generator, n_max=18, lo=1, hi=100, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    profits = rng.integers(lo, hi + 1, size=n)
    weights = rng.integers(lo, hi + 1, size=n)
    return Instance.from_pairs(zip(profits.tolist(), weights.tolist()), int(weights.sum()) // 2)


@pytest.fixture
def criterion():
    def record(name: str, passed: bool, detail: str = ""):
        _CRITERIA.append((name, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
