"""Exact oracles: capacity-indexed dynamic programming and exhaustive search."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import ContractError, Instance, evaluate

DEFAULT_MAX_CELLS = 2 * 10**9
BRUTE_FORCE_MAX_N = 25


class DPCapacityError(RuntimeError):
    """The DP table would exceed the configured memory budget."""


@dataclass(frozen=True)
class ExactResult:
    optimum: int
    witness: Optional[np.ndarray]  # None in value-only mode

    def __eq__(self, other):
        if not isinstance(other, ExactResult):
            return NotImplemented
        if self.optimum != other.optimum:
            return False
        if self.witness is None or other.witness is None:
            return self.witness is other.witness
        return bool(np.array_equal(self.witness, other.witness))


def _check(instance: Instance, result: ExactResult) -> ExactResult:
    if result.witness is not None:
        ev = evaluate(instance, result.witness)
        assert ev.feasible and ev.value == result.optimum, "oracle witness is inconsistent"
    return result


def dp_optimum(instance: Instance, witness: bool = True, max_cells: int = DEFAULT_MAX_CELLS) -> ExactResult:
    """Classic 0/1 knapsack DP over capacities ``0..W`` with a rolling value row.

    With ``witness=True`` one packed decision row of ``W + 1`` bits is kept
    per item (``n * (W + 1)`` cells, refused above ``max_cells``) and the
    optimal selection is recovered by walking the decisions backwards.
    ``witness=False`` keeps only the value row.
    """
    W = instance.capacity
    cells = instance.n * (W + 1) if witness else W + 1
    if cells > max_cells:
        raise DPCapacityError(
            f"DP needs {cells} cells (n={instance.n}, W={W}), budget is {max_cells}"
        )
    best = np.zeros(W + 1, dtype=np.int64)
    decisions = [] if witness else None
    for p, w in zip(instance.profits.tolist(), instance.weights.tolist()):
        if w > W:
            if witness:
                decisions.append(None)
            continue
        cand = best[: W + 1 - w] + p
        take = cand > best[w:]
        best[w:] = np.where(take, cand, best[w:])
        if witness:
            decisions.append(np.packbits(take))
    optimum = int(best[W])
    if not witness:
        return ExactResult(optimum, None)

    bits = np.zeros(instance.n, dtype=bool)
    c = W
    for i in range(instance.n - 1, -1, -1):
        row = decisions[i]
        if row is None:
            continue
        w = int(instance.weights[i])
        if c >= w:
            j = c - w
            if (row[j >> 3] >> (7 - (j & 7))) & 1:
                bits[i] = True
                c -= w
    return _check(instance, ExactResult(optimum, bits))


def brute_force(instance: Instance) -> ExactResult:
    """Enumerate every subset; ties go to the lexicographically smallest bit vector."""
    n = instance.n
    if n > BRUTE_FORCE_MAX_N:
        raise ContractError(f"brute force refuses n={n} > {BRUTE_FORCE_MAX_N}")
    W = instance.capacity
    profits = [int(x) for x in instance.profits]
    weights = [int(x) for x in instance.weights]

    # Subset masks put item 0 on the most significant bit, so numeric order on
    # masks is lexicographic order on bit vectors.
    high = max(0, n - 20)
    low_items = range(high, n)
    lw = np.zeros(1, dtype=np.int64)
    lv = np.zeros(1, dtype=np.int64)
    for i in reversed(low_items):
        lw = np.concatenate([lw, lw + weights[i]])
        lv = np.concatenate([lv, lv + profits[i]])
    n_low = n - high

    best_val, best_mask = -1, 0
    for prefix in range(1 << high):
        pw = sum(weights[i] for i in range(high) if prefix >> (high - 1 - i) & 1)
        if pw > W:
            continue
        pv = sum(profits[i] for i in range(high) if prefix >> (high - 1 - i) & 1)
        vals = np.where(lw + pw <= W, lv + pv, -1)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_mask = int(vals[k]), (prefix << n_low) | k
    bits = np.array([(best_mask >> (n - 1 - i)) & 1 for i in range(n)], dtype=bool)
    return _check(instance, ExactResult(best_val, bits))
