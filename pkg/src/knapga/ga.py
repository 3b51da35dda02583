"""Genetic algorithm for 0/1 knapsack with penalty fitness and adaptive operators.

The population is held as a boolean matrix (one row per chromosome, one
column per item in original order), so fitness, selection, crossover and
mutation are vectorized over the whole generation. Single-chromosome helpers
(``fitness``, ``crossover``, ``greedy_merge``, ...) are thin wrappers over the
batch kernels the engine itself uses.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import ContractError, Instance, as_bits, evaluate, greedy_half

FITNESS_FLOOR = 1e-9


class XType(enum.IntEnum):
    ONE_POINT = 0
    GREEDY = 1


@dataclass
class Chromosome:
    bits: np.ndarray
    xtype: XType


@dataclass
class GaConfig:
    population_size: int = 200
    max_generations: int = 1000
    time_limit: Optional[float] = 300.0  # seconds; None disables
    init_include_prob: float = 0.7
    penalty_c: float = 100.0
    mutation_step: Optional[float] = None  # default 1 / (10 N)
    mutation_cap: Optional[float] = None  # default 10 / N
    random_selection_prob: float = 0.5
    stagnation_window: int = 20
    seed: int = 0
    record_trace: bool = False

    def __post_init__(self):
        N = self.population_size
        if N < 2 or N % 2:
            raise ContractError(f"population_size must be even and >= 2, got {N}")
        if self.max_generations < 1:
            raise ContractError("max_generations must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ContractError("time_limit must be positive or None")
        if not 0.0 <= self.init_include_prob <= 1.0:
            raise ContractError("init_include_prob must lie in [0, 1]")
        if self.penalty_c <= 0:
            raise ContractError("penalty_c must be positive")
        if not 0.0 <= self.random_selection_prob <= 1.0:
            raise ContractError("random_selection_prob must lie in [0, 1]")
        if self.stagnation_window < 1:
            raise ContractError("stagnation_window must be positive")
        if self.mutation_step is None:
            self.mutation_step = 1.0 / (10 * N)
        if self.mutation_cap is None:
            self.mutation_cap = 10.0 / N
        if self.mutation_step < 0 or not 0 <= self.mutation_cap <= 1:
            raise ContractError("mutation_step must be >= 0 and mutation_cap in [0, 1]")


@dataclass
class TraceRow:
    generation: int
    best_value: int
    best_fitness: float
    mutation_rate: float
    selection_mode: str


@dataclass
class EngineState:
    population: np.ndarray  # (N, n) bool
    xtypes: np.ndarray  # (N,) int8, XType values
    values: np.ndarray  # (N,) int64
    weights: np.ndarray  # (N,) int64
    fitness: np.ndarray  # (N,) float64
    rng: np.random.Generator
    generation: int = 1
    best_bits: Optional[np.ndarray] = None
    best_xtype: XType = XType.ONE_POINT
    best_value: int = -1
    reference_value: float = 0.0  # f(gBest) used by the penalty term
    mutation_rate: float = 0.0
    since_improvement: int = 0
    stagnant: bool = False
    improved: bool = False
    evaluations: int = 0

    @property
    def selection_mode(self) -> str:
        return "stagnant" if self.stagnant else "normal"


@dataclass
class RunReport:
    best_value: int
    best_bits: np.ndarray
    solved: Optional[bool]
    generations_used: int
    wall_time: float
    seed: int = 0
    trace: Optional[list[TraceRow]] = None

    def to_dict(self, include_bits: bool = True) -> dict:
        d = {
            "best_value": self.best_value,
            "solved": self.solved,
            "generations_used": self.generations_used,
            "wall_time": self.wall_time,
            "seed": self.seed,
        }
        if include_bits:
            d["best_bits"] = bits_to_hex(self.best_bits)
            d["n"] = int(len(self.best_bits))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        bits = hex_to_bits(d["best_bits"], d["n"]) if "best_bits" in d else np.zeros(0, dtype=bool)
        return cls(
            best_value=d["best_value"],
            best_bits=bits,
            solved=d["solved"],
            generations_used=d["generations_used"],
            wall_time=d["wall_time"],
            seed=d.get("seed", 0),
        )

    def same_outcome(self, other: "RunReport") -> bool:
        """Equality ignoring wall-clock time."""
        return (
            self.best_value == other.best_value
            and np.array_equal(self.best_bits, other.best_bits)
            and self.solved == other.solved
            and self.generations_used == other.generations_used
            and self.seed == other.seed
            and self.trace == other.trace
        )


def bits_to_hex(bits) -> str:
    """Pack a bit vector (item 0 = most significant bit of the first byte) as hex."""
    return np.packbits(np.asarray(bits, dtype=bool)).tobytes().hex()


def hex_to_bits(text: str, n: int) -> np.ndarray:
    raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
    bits = np.unpackbits(raw)
    if len(bits) < n or bits[n:].any():
        raise ContractError(f"hex string does not encode a {n}-bit vector")
    return bits[:n].astype(bool)


# --- fitness -----------------------------------------------------------------


def penalty_fitness(values, weights, capacity: int, reference: float, generation: int, c: float) -> np.ndarray:
    """Batch fitness: the objective when feasible, else ``f(gBest)/g + (W - weight)/c``.

    Everything is floored at ``FITNESS_FLOOR`` so roulette weights stay positive.
    """
    values = np.asarray(values)
    weights = np.asarray(weights)
    slack = capacity - weights
    penalized = reference / generation + slack / c
    f = np.where(slack >= 0, values.astype(np.float64), penalized)
    return np.maximum(f, FITNESS_FLOOR)


def fitness(state: EngineState, instance: Instance, bits, config: Optional[GaConfig] = None) -> float:
    c = config.penalty_c if config is not None else GaConfig.penalty_c
    ev = evaluate(instance, bits)
    return float(
        penalty_fitness(ev.value, ev.weight, instance.capacity, state.reference_value, state.generation, c)
    )


def _evaluate_rows(instance: Instance, rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = rows.view(np.uint8) if rows.dtype == np.bool_ else rows
    return r @ instance.profits, r @ instance.weights


# --- initialization ----------------------------------------------------------


def init_population(instance: Instance, config: GaConfig, rng: np.random.Generator):
    """Random bit matrix with include probability ``init_include_prob`` and random crossover types."""
    pop = rng.random((config.population_size, instance.n)) < config.init_include_prob
    xtypes = rng.integers(0, 2, size=config.population_size).astype(np.int8)
    return pop, xtypes


def init_state(instance: Instance, config: GaConfig) -> EngineState:
    rng = np.random.default_rng(config.seed)
    pop, xtypes = init_population(instance, config, rng)
    values, weights = _evaluate_rows(instance, pop)
    feasible = weights <= instance.capacity
    if not feasible.any():
        # Seed one feasible individual so f(gBest) and elitism are defined from the start.
        gbits, gev = greedy_half(instance)
        pop[-1] = gbits
        values[-1], weights[-1] = gev.value, gev.weight
        feasible[-1] = True
    state = EngineState(
        population=pop,
        xtypes=xtypes,
        values=values,
        weights=weights,
        fitness=np.empty(len(pop)),
        rng=rng,
    )
    _update_best(state, feasible)
    state.improved = False
    state.fitness = penalty_fitness(
        values, weights, instance.capacity, state.reference_value, state.generation, config.penalty_c
    )
    state.evaluations = len(pop)
    return state


def _update_best(state: EngineState, feasible: np.ndarray) -> None:
    cand = np.where(feasible, state.values, -1)
    i = int(np.argmax(cand))
    state.improved = bool(cand[i] > state.best_value)
    if state.improved:
        state.best_value = int(cand[i])
        state.best_bits = state.population[i].copy()
        state.best_xtype = XType(int(state.xtypes[i]))
        state.reference_value = float(state.best_value)


# --- selection ---------------------------------------------------------------


def detect_stagnation(state: EngineState, config: GaConfig) -> bool:
    """Stagnant once the global best has been flat for ``stagnation_window`` generations."""
    return state.since_improvement >= config.stagnation_window


def roulette(fitness_values: np.ndarray, rng: np.random.Generator, k: int) -> np.ndarray:
    cum = np.cumsum(fitness_values)
    u = rng.random(k) * cum[-1]
    return np.minimum(np.searchsorted(cum, u, side="right"), len(cum) - 1)


def select_parents(state: EngineState, config: GaConfig, k: int) -> np.ndarray:
    rng = state.rng
    idx = roulette(state.fitness, rng, k)
    if state.stagnant:
        coin = rng.random(k) < config.random_selection_prob
        uniform = rng.integers(0, len(state.fitness), size=k)
        idx = np.where(coin, uniform, idx)
    return idx


def select_parent(state: EngineState, config: GaConfig) -> Chromosome:
    i = int(select_parents(state, config, 1)[0])
    return Chromosome(state.population[i].copy(), XType(int(state.xtypes[i])))


# --- crossover ---------------------------------------------------------------


def greedy_merge_rows(union: np.ndarray, instance: Instance) -> np.ndarray:
    """Pack each row's candidate items in ratio order, adding every item that still fits."""
    k, n = union.shape
    W = instance.capacity
    order = instance.order
    w = instance.weights[order]
    U = union[:, order]
    cum = np.cumsum(np.where(U, w, 0), axis=1)
    fits = cum <= W
    # cum is non-decreasing, so the fitting part of each row is a prefix.
    taken = U & fits
    rem = W - np.where(taken, w, 0).sum(axis=1)
    overflow = ~fits
    first = np.where(overflow.any(axis=1), overflow.argmax(axis=1), n)
    j0 = int(first.min()) if k else n
    if j0 < n:
        suffix_min = np.minimum.accumulate(w[::-1])[::-1]
        active = first < n
        for j in range(j0, n):
            if rem.max() < suffix_min[j]:
                break
            col = U[:, j] & (w[j] <= rem) & active & (first <= j)
            if col.any():
                taken[:, j] = col
                rem = rem - w[j] * col
    out = np.zeros_like(union)
    out[:, order] = taken
    return out


def greedy_merge(parent_a, parent_b, instance: Instance) -> np.ndarray:
    a = as_bits(instance, parent_a)
    b = as_bits(instance, parent_b)
    return greedy_merge_rows((a | b)[None, :], instance)[0]


def one_point_rows(A: np.ndarray, B: np.ndarray, cuts: np.ndarray):
    mask = np.arange(A.shape[1])[None, :] < cuts[:, None]
    return np.where(mask, A, B), np.where(mask, B, A)


def resolve_types(ta: np.ndarray, tb: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Shared parent type if they agree, otherwise a fair coin."""
    coin = rng.integers(0, 2, size=len(ta)).astype(np.int8)
    return np.where(ta == tb, ta, coin).astype(np.int8)


def crossover_rows(A, B, ta, tb, instance: Instance, rng: np.random.Generator):
    """Cross parent rows pairwise. Returns ``(first, second, used_types)``.

    One-point pairs swap tails at a cut drawn from ``[1, n-1]``. Greedy pairs
    get the greedy merge as the first offspring and the first one-point
    child as the second, keeping two offspring per pair.
    """
    n = A.shape[1]
    used = resolve_types(ta, tb, rng)
    cuts = rng.integers(1, max(n, 2), size=len(A))
    first, second = one_point_rows(A, B, cuts)
    greedy = used == XType.GREEDY
    if greedy.any():
        second[greedy] = first[greedy]
        first[greedy] = greedy_merge_rows(A[greedy] | B[greedy], instance)
    return first, second, used


def crossover(parent_a: Chromosome, parent_b: Chromosome, instance: Instance, rng: np.random.Generator):
    """Cross two chromosomes; offspring carry the used type until ``adapt_xtypes`` runs."""
    A = as_bits(instance, parent_a.bits)[None, :]
    B = as_bits(instance, parent_b.bits)[None, :]
    ta = np.array([parent_a.xtype], dtype=np.int8)
    tb = np.array([parent_b.xtype], dtype=np.int8)
    first, second, used = crossover_rows(A, B, ta, tb, instance, rng)
    t = XType(int(used[0]))
    return (Chromosome(first[0], t), Chromosome(second[0], t)), t


def adapt_xtypes(parent_fitness, offspring_fitness, used, rng: np.random.Generator) -> np.ndarray:
    """Crossover types for offspring pairs.

    ``parent_fitness`` and ``offspring_fitness`` are ``(P, 2)``. A pair whose
    best offspring strictly beats its best parent passes the used type to
    both children; otherwise each child gets a random type.
    """
    parent_fitness = np.asarray(parent_fitness, dtype=float).reshape(-1, 2)
    offspring_fitness = np.asarray(offspring_fitness, dtype=float).reshape(-1, 2)
    used = np.asarray(used, dtype=np.int8).reshape(-1)
    better = offspring_fitness.max(axis=1) > parent_fitness.max(axis=1)
    random_types = rng.integers(0, 2, size=(len(used), 2)).astype(np.int8)
    return np.where(better[:, None], used[:, None], random_types).astype(np.int8)


# --- mutation ----------------------------------------------------------------


def mutate_rows(rows: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    if rate <= 0.0:
        return rows
    return rows ^ (rng.random(rows.shape) < rate)


def mutate(bits, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``rate``."""
    b = np.asarray(bits, dtype=bool)
    return mutate_rows(b[None, :], rate, rng)[0]


def update_mutation_rate(rate: float, improved: bool, config: GaConfig) -> float:
    """Saw-tooth schedule: reset to 0 on improvement, otherwise ramp by one step up to the cap."""
    if improved:
        return 0.0
    return min(rate + config.mutation_step, config.mutation_cap)


# --- generation loop ---------------------------------------------------------


def step_generation(state: EngineState, instance: Instance, config: GaConfig) -> EngineState:
    rng = state.rng
    N = config.population_size
    W = instance.capacity
    c = config.penalty_c

    state.stagnant = detect_stagnation(state, config)
    parents = select_parents(state, config, N).reshape(-1, 2)
    ia, ib = parents[:, 0], parents[:, 1]
    pop, xt = state.population, state.xtypes
    first, second, used = crossover_rows(pop[ia], pop[ib], xt[ia], xt[ib], instance, rng)

    offspring = np.empty_like(pop)
    offspring[0::2] = first
    offspring[1::2] = second

    # Operator credit is judged on the crossover product, before mutation.
    ov, ow = _evaluate_rows(instance, offspring)
    of = penalty_fitness(ov, ow, W, state.reference_value, state.generation, c)
    parent_fit = np.stack([state.fitness[ia], state.fitness[ib]], axis=1)
    new_types = adapt_xtypes(parent_fit, of.reshape(-1, 2), used, rng).reshape(-1)

    if state.mutation_rate > 0.0:
        offspring = mutate_rows(offspring, state.mutation_rate, rng)
        ov, ow = _evaluate_rows(instance, offspring)
        of = penalty_fitness(ov, ow, W, state.reference_value, state.generation, c)
    state.evaluations += N

    state.population, state.xtypes = offspring, new_types
    state.values, state.weights, state.fitness = ov, ow, of

    # 1-elitism: the previous global best survives unchanged.
    if state.best_bits is not None and not (offspring == state.best_bits).all(axis=1).any():
        worst = int(np.argmin(of))
        offspring[worst] = state.best_bits
        new_types[worst] = state.best_xtype
        ov[worst] = state.best_value
        ow[worst] = int(instance.weights[state.best_bits].sum())
        of[worst] = max(float(state.best_value), FITNESS_FLOOR)

    _update_best(state, ow <= W)
    state.mutation_rate = update_mutation_rate(state.mutation_rate, state.improved, config)
    state.since_improvement = 0 if state.improved else state.since_improvement + 1
    state.generation += 1
    return state


def _trace_row(state: EngineState, config: GaConfig) -> TraceRow:
    return TraceRow(
        generation=state.generation,
        best_value=state.best_value,
        best_fitness=float(state.fitness.max()),
        mutation_rate=state.mutation_rate,
        selection_mode="stagnant" if detect_stagnation(state, config) else "normal",
    )


def run(
    instance: Instance,
    config: Optional[GaConfig] = None,
    oracle_optimum: Optional[int] = None,
) -> RunReport:
    """Evolve until the generation budget, the time limit, or the known optimum is hit.

    The initial population is generation 1, so ``generations_used`` never
    exceeds ``max_generations``. The time limit is checked between
    generations only.
    """
    config = config or GaConfig()
    start = time.perf_counter()
    state = init_state(instance, config)
    trace = [_trace_row(state, config)] if config.record_trace else None

    while True:
        if oracle_optimum is not None and state.best_value >= oracle_optimum:
            break
        if state.generation >= config.max_generations:
            break
        if config.time_limit is not None and time.perf_counter() - start > config.time_limit:
            break
        step_generation(state, instance, config)
        if trace is not None:
            trace.append(_trace_row(state, config))

    elapsed = time.perf_counter() - start
    solved = None if oracle_optimum is None else state.best_value == oracle_optimum
    return RunReport(
        best_value=state.best_value,
        best_bits=state.best_bits.copy(),
        solved=solved,
        generations_used=state.generation,
        wall_time=elapsed,
        seed=config.seed,
        trace=trace,
    )
