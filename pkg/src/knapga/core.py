"""Problem representation, solution evaluation and the ratio greedy heuristics."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cmp_to_key
from typing import Optional, Sequence

import numpy as np


class ContractError(ValueError):
    """Raised when an argument violates an operation's precondition."""


@dataclass(frozen=True)
class Item:
    profit: int
    weight: int

    def __post_init__(self):
        if int(self.profit) != self.profit or int(self.weight) != self.weight:
            raise ContractError(f"item coefficients must be integers: {self}")
        if self.profit < 1 or self.weight < 1:
            raise ContractError(f"item profit and weight must be >= 1: {self}")


@dataclass(frozen=True)
class Evaluation:
    value: int
    weight: int
    feasible: bool


@dataclass(frozen=True)
class Instance:
    """An immutable 0/1 knapsack problem: ordered items plus a capacity.

    ``meta`` carries generator provenance (a ``GenMeta``) when the instance
    came out of the spanner generator. Instances whose capacity admits every
    item are rejected unless ``allow_trivial`` is set.
    """

    items: tuple[Item, ...]
    capacity: int
    meta: Optional[object] = None
    allow_trivial: bool = field(default=False, compare=False)

    profits: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)
    oversized: tuple[int, ...] = field(init=False, repr=False, compare=False)
    order: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(it if isinstance(it, Item) else Item(*it) for it in self.items)
        object.__setattr__(self, "items", items)
        if len(items) == 0:
            raise ContractError("an instance needs at least one item")
        if int(self.capacity) != self.capacity or self.capacity < 0:
            raise ContractError(f"capacity must be a non-negative integer, got {self.capacity}")
        object.__setattr__(self, "capacity", int(self.capacity))
        total = sum(it.weight for it in items)
        if self.capacity > total and not self.allow_trivial:
            raise ContractError(
                f"capacity {self.capacity} exceeds total weight {total}; "
                "pass allow_trivial=True to accept it"
            )
        profits = np.array([it.profit for it in items], dtype=np.int64)
        weights = np.array([it.weight for it in items], dtype=np.int64)
        profits.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "weights", weights)
        # Dead variables: kept in place so chromosome positions line up with item indices.
        oversized = tuple(i for i, it in enumerate(items) if it.weight > self.capacity)
        object.__setattr__(self, "oversized", oversized)
        order = np.array(sorted(range(len(items)), key=cmp_to_key(_ratio_cmp(items))), dtype=np.intp)
        order.setflags(write=False)
        object.__setattr__(self, "order", order)

    @classmethod
    def from_pairs(cls, pairs, capacity, **kwargs) -> "Instance":
        """Build from ``(profit, weight)`` pairs."""
        return cls(tuple(Item(int(p), int(w)) for p, w in pairs), capacity, **kwargs)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def total_weight(self) -> int:
        return int(self.weights.sum())


def as_bits(instance: Instance, bits) -> np.ndarray:
    """Coerce a 0/1 sequence to a boolean vector of length ``instance.n``."""
    arr = np.asarray(bits)
    if arr.ndim != 1 or arr.shape[0] != instance.n:
        raise ContractError(f"expected a bit vector of length {instance.n}, got shape {arr.shape}")
    if arr.dtype != np.bool_:
        if not np.isin(arr, (0, 1)).all():
            raise ContractError("bit vector entries must be 0 or 1")
        arr = arr.astype(bool)
    return arr


def evaluate(instance: Instance, bits) -> Evaluation:
    b = as_bits(instance, bits)
    value = int(instance.profits[b].sum())
    weight = int(instance.weights[b].sum())
    return Evaluation(value, weight, weight <= instance.capacity)


def _ratio_cmp(items: Sequence[Item]):
    def cmp(i: int, j: int) -> int:
        # v_i/w_i > v_j/w_j  <=>  v_i*w_j > v_j*w_i (weights are positive)
        lhs = items[i].profit * items[j].weight
        rhs = items[j].profit * items[i].weight
        if lhs != rhs:
            return -1 if lhs > rhs else 1
        if items[i].weight != items[j].weight:
            return -1 if items[i].weight < items[j].weight else 1
        return -1 if i < j else (1 if i > j else 0)

    return cmp


def ratio_order(instance: Instance) -> np.ndarray:
    """Item indices by profit/weight ratio, best first.

    Ratios are compared exactly by cross-multiplication; equal ratios put the
    lighter item first, then the lower index.
    """
    return instance.order


def greedy_ratio(instance: Instance) -> tuple[np.ndarray, Evaluation]:
    """Scan items in ratio order, packing each one that still fits."""
    bits = np.zeros(instance.n, dtype=bool)
    remaining = instance.capacity
    for i in ratio_order(instance):
        w = instance.items[i].weight
        if w <= remaining:
            bits[i] = True
            remaining -= w
    return bits, evaluate(instance, bits)


def greedy_half(instance: Instance) -> tuple[np.ndarray, Evaluation]:
    """Better of the ratio fill and the most profitable single fitting item.

    This variant guarantees ``2 * value >= optimum``.
    """
    bits, ev = greedy_ratio(instance)
    best_single = None
    for i, it in enumerate(instance.items):
        if it.weight <= instance.capacity and (
            best_single is None or it.profit > instance.items[best_single].profit
        ):
            best_single = i
    if best_single is not None and instance.items[best_single].profit > ev.value:
        bits = np.zeros(instance.n, dtype=bool)
        bits[best_single] = True
        ev = evaluate(instance, bits)
    return bits, ev
