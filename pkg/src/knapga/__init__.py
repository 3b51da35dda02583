"""Genetic algorithm, exact oracles and instance generator for spanner 0/1 knapsack problems."""

from .core import ContractError, Evaluation, Instance, Item, evaluate, greedy_half, greedy_ratio
from .exact import DPCapacityError, ExactResult, brute_force, dp_optimum
from .ga import GaConfig, RunReport, run
from .gen import Correlation, GenMeta, SpannerParams, generate, read_instance, write_instance

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "Correlation",
    "DPCapacityError",
    "Evaluation",
    "ExactResult",
    "GaConfig",
    "GenMeta",
    "Instance",
    "Item",
    "RunReport",
    "SpannerParams",
    "brute_force",
    "dp_optimum",
    "evaluate",
    "generate",
    "greedy_half",
    "greedy_ratio",
    "read_instance",
    "run",
    "write_instance",
]
