"""Spanner knapsack instance generator and the plain-text instance format.

A spanner(v, m) instance is built from ``v`` base items drawn from one of
the classic correlation families over ``[1, R]``, shrunk by ``m + 1``. Every
generated item is a base item scaled by an integer multiplier in ``[1, m]``.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import asdict, dataclass, fields
from typing import Union

from .core import ContractError, Instance, Item
from .rng import PortableRng

GENERATOR_VERSION = "knapga-spanner/1"


class Correlation(str, enum.Enum):
    UNCORRELATED = "uncorrelated"
    WEAKLY_CORRELATED = "weakly"
    STRONGLY_CORRELATED = "strongly"


@dataclass(frozen=True)
class SpannerParams:
    n: int
    R: int
    v: int = 2
    m: int = 10
    correlation: Correlation = Correlation.STRONGLY_CORRELATED
    capacity_ratio: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "correlation", Correlation(self.correlation))
        if self.n < 1 or self.v < 1 or self.m < 1:
            raise ContractError("n, v and m must be positive")
        if self.R < 10:
            raise ContractError(f"R must be at least 10, got {self.R}")
        if not 0 < self.capacity_ratio <= 1:
            raise ContractError(f"capacity_ratio must lie in (0, 1], got {self.capacity_ratio}")
        if not 0 <= self.seed < 1 << 64:
            raise ContractError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class GenMeta:
    params: SpannerParams
    spanner_set: tuple[Item, ...]
    version: str = GENERATOR_VERSION


def make_spanner_set(params: SpannerParams, rng: PortableRng) -> list[Item]:
    """Draw ``v`` base items and normalize them by ``m + 1`` (floor, clamped to 1)."""
    shift = params.R // 10
    base = []
    for _ in range(params.v):
        w = rng.randint(1, params.R)
        if params.correlation is Correlation.STRONGLY_CORRELATED:
            p = w + shift
        elif params.correlation is Correlation.WEAKLY_CORRELATED:
            p = rng.randint(max(1, w - shift), w + shift)
        else:
            p = rng.randint(1, params.R)
        base.append((p, w))
    d = params.m + 1
    return [Item(max(1, p // d), max(1, w // d)) for p, w in base]


def generate(params: SpannerParams) -> Instance:
    rng = PortableRng(params.seed)
    spanner = make_spanner_set(params, rng)
    items = []
    for _ in range(params.n):
        k = rng.randint(0, params.v - 1)
        a = rng.randint(1, params.m)
        items.append(Item(a * spanner[k].profit, a * spanner[k].weight))

    total = sum(it.weight for it in items)
    capacity = math.floor(params.capacity_ratio * total + 0.5)
    capacity = max(capacity, max(it.weight for it in items))
    capacity = min(capacity, total - 1)
    meta = GenMeta(params, tuple(spanner))
    return Instance(tuple(items), capacity, meta=meta)


# --- text format -----------------------------------------------------------


class InstanceFormatError(ValueError):
    """Malformed instance file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class InstanceStructureError(InstanceFormatError):
    """Header and body disagree."""


_PARAM_KEYS = [f.name for f in fields(SpannerParams)]


def _meta_lines(meta) -> list[str]:
    if meta is None:
        return []
    if isinstance(meta, GenMeta):
        d = asdict(meta.params)
        d["correlation"] = meta.params.correlation.value
        d["capacity_ratio"] = repr(meta.params.capacity_ratio)
        lines = [f"# generator={meta.version}"]
        lines += [f"# {k}={d[k]}" for k in _PARAM_KEYS]
        lines.append("# spanner=" + ",".join(f"{it.profit}:{it.weight}" for it in meta.spanner_set))
        return lines
    return [f"# {k}={v}" for k, v in dict(meta).items()]


def format_instance(instance: Instance) -> str:
    lines = [f"{instance.n} {instance.capacity}"]
    lines += [f"{it.profit} {it.weight}" for it in instance.items]
    lines += _meta_lines(instance.meta)
    return "\n".join(lines) + "\n"


def _parse_meta(kv: dict[str, str], line: int):
    if "generator" not in kv:
        return kv or None
    try:
        params = SpannerParams(
            n=int(kv["n"]),
            R=int(kv["R"]),
            v=int(kv["v"]),
            m=int(kv["m"]),
            correlation=Correlation(kv["correlation"]),
            capacity_ratio=float(kv["capacity_ratio"]),
            seed=int(kv["seed"]),
        )
        spanner = tuple(
            Item(int(p), int(w)) for p, w in (pair.split(":") for pair in kv["spanner"].split(","))
        )
    except (KeyError, ValueError) as exc:
        raise InstanceFormatError(f"bad generator metadata: {exc}", line) from exc
    return GenMeta(params, spanner, kv["generator"])


def parse_instance(text: str, allow_trivial: bool = False) -> Instance:
    header = None
    items: list[Item] = []
    kv: dict[str, str] = {}
    last_line = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                kv[key.strip()] = value.strip()
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise InstanceFormatError(f"expected integers, got {raw!r}", lineno) from None
        if len(nums) != 2:
            raise InstanceFormatError(f"expected two integers, got {len(nums)}", lineno)
        if header is None:
            n, cap = nums
            if n < 1 or cap < 0:
                raise InstanceFormatError(f"bad header 'n W' = {n} {cap}", lineno)
            header = (n, cap)
            continue
        p, w = nums
        if p < 1 or w < 1:
            raise InstanceFormatError(f"profit and weight must be positive, got {p} {w}", lineno)
        if len(items) == header[0]:
            raise InstanceStructureError(f"header declares {header[0]} items but more follow", lineno)
        items.append(Item(p, w))
    if header is None:
        raise InstanceFormatError("missing 'n W' header", last_line or 1)
    if len(items) != header[0]:
        raise InstanceStructureError(f"header declares {header[0]} items, body has {len(items)}")
    meta = _parse_meta(kv, last_line)
    try:
        return Instance(tuple(items), header[1], meta=meta, allow_trivial=allow_trivial)
    except ContractError as exc:
        raise InstanceStructureError(str(exc)) from exc


def write_instance(instance: Instance, path: Union[str, os.PathLike]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_instance(instance))


def read_instance(path: Union[str, os.PathLike], allow_trivial: bool = False) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), allow_trivial=allow_trivial)
