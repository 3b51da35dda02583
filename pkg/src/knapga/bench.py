"""Repeated-run campaigns over generated instances and their reports.

A campaign file is JSON::

    {
      "schema_version": 1,
      "problems": [
        {
          "name": "P100",
          "instance": {"n": 100, "R": 1000, "v": 2, "m": 10,
                       "correlation": "strongly", "capacity_ratio": 0.5, "seed": 1},
          "ga": {"population_size": 200, "max_generations": 1000, "time_limit": 300},
          "repeats": 20,
          "base_seed": 0
        }
      ]
    }

Run ``i`` of a problem uses GA seed ``base_seed + i``. ``ga`` keys are any
``GaConfig`` fields except ``seed``; omitted keys keep their defaults.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

from .core import ContractError, greedy_half, greedy_ratio
from .exact import DEFAULT_MAX_CELLS, DPCapacityError, dp_optimum
from .ga import GaConfig, RunReport, run
from .gen import Correlation, SpannerParams, generate

SCHEMA_VERSION = 1


@dataclass
class ProblemSpec:
    name: str
    params: SpannerParams
    ga: GaConfig = field(default_factory=GaConfig)
    repeats: int = 20
    base_seed: int = 0

    def __post_init__(self):
        if self.repeats < 1:
            raise ContractError(f"{self.name}: repeats must be >= 1")

    def run_seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.repeats)]


@dataclass
class CampaignSpec:
    problems: list[ProblemSpec] = field(default_factory=list)

    @classmethod
    def from_dict(cls, d: dict) -> "CampaignSpec":
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ContractError(f"unsupported campaign schema_version {version}")
        ga_keys = {f.name for f in fields(GaConfig)} - {"seed"}
        problems = []
        for i, p in enumerate(d.get("problems", [])):
            ga = dict(p.get("ga", {}))
            unknown = set(ga) - ga_keys
            if unknown:
                raise ContractError(f"problem {i}: unknown ga keys {sorted(unknown)}")
            inst = dict(p["instance"])
            inst["correlation"] = Correlation(inst.get("correlation", "strongly"))
            params = SpannerParams(**inst)
            problems.append(
                ProblemSpec(
                    name=p.get("name", f"P{params.n}"),
                    params=params,
                    ga=GaConfig(**ga),
                    repeats=int(p.get("repeats", 20)),
                    base_seed=int(p.get("base_seed", 0)),
                )
            )
        return cls(problems)

    @classmethod
    def load(cls, path) -> "CampaignSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class ProblemReport:
    name: str
    n: int
    R: int
    capacity_ratio: float
    capacity: int
    optimum: Optional[int]  # None when the DP oracle was over budget
    greedy_estimate: int
    greedy_half: int
    runs: list[RunReport]

    @property
    def total(self) -> int:
        return len(self.runs)

    @property
    def solved(self) -> Optional[int]:
        if self.optimum is None:
            return None
        return sum(1 for r in self.runs if r.best_value == self.optimum)

    @property
    def exceeded(self) -> int:
        return sum(1 for r in self.runs if r.best_value > self.greedy_estimate)

    @property
    def mean_solve_time(self) -> Optional[float]:
        if self.optimum is None:
            return None
        times = [r.wall_time for r in self.runs if r.best_value == self.optimum]
        return statistics.fmean(times) if times else None


@dataclass
class BenchReport:
    problems: list[ProblemReport] = field(default_factory=list)


def _run_one(args):
    instance, config, optimum = args
    return run(instance, config, oracle_optimum=optimum)


def run_problem(spec: ProblemSpec, workers: int = 1, max_cells: int = DEFAULT_MAX_CELLS) -> ProblemReport:
    instance = generate(spec.params)
    _, gev = greedy_ratio(instance)
    _, hev = greedy_half(instance)
    try:
        optimum = dp_optimum(instance, witness=False, max_cells=max_cells).optimum
    except DPCapacityError:
        optimum = None
    jobs = [(instance, replace(spec.ga, seed=s), optimum) for s in spec.run_seeds()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, jobs))
    else:
        runs = [_run_one(j) for j in jobs]
    return ProblemReport(
        name=spec.name,
        n=instance.n,
        R=spec.params.R,
        capacity_ratio=spec.params.capacity_ratio,
        capacity=instance.capacity,
        optimum=optimum,
        greedy_estimate=gev.value,
        greedy_half=hev.value,
        runs=runs,
    )


def run_campaign(spec: CampaignSpec, workers: int = 1, max_cells: int = DEFAULT_MAX_CELLS) -> BenchReport:
    return BenchReport([run_problem(p, workers=workers, max_cells=max_cells) for p in spec.problems])


# --- rendering ---------------------------------------------------------------

SUMMARY_COLUMNS = [
    "name",
    "n",
    "R",
    "capacity_ratio",
    "capacity",
    "optimum",
    "greedy_estimate",
    "greedy_half",
    "exceed_greedy",
    "solved",
    "runs",
    "mean_solve_time",
]


def _summary(p: ProblemReport) -> dict:
    return {
        "name": p.name,
        "n": p.n,
        "R": p.R,
        "capacity_ratio": p.capacity_ratio,
        "capacity": p.capacity,
        "optimum": p.optimum,
        "greedy_estimate": p.greedy_estimate,
        "greedy_half": p.greedy_half,
        "exceed_greedy": p.exceeded,
        "solved": p.solved,
        "runs": p.total,
        "mean_solve_time": p.mean_solve_time,
    }


def report_to_dict(report: BenchReport) -> dict:
    problems = []
    for p in report.problems:
        d = _summary(p)
        d["run_reports"] = [r.to_dict() for r in p.runs]
        problems.append(d)
    return {"schema_version": SCHEMA_VERSION, "problems": problems}


def report_from_dict(d: dict) -> BenchReport:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ContractError(f"unsupported report schema_version {d.get('schema_version')}")
    problems = [
        ProblemReport(
            name=p["name"],
            n=p["n"],
            R=p["R"],
            capacity_ratio=p["capacity_ratio"],
            capacity=p["capacity"],
            optimum=p["optimum"],
            greedy_estimate=p["greedy_estimate"],
            greedy_half=p["greedy_half"],
            runs=[RunReport.from_dict(r) for r in p["run_reports"]],
        )
        for p in d["problems"]
    ]
    return BenchReport(problems)


def _fmt_table(report: BenchReport) -> str:
    header = [
        "Problem",
        "n",
        "R",
        "W/sum(w)",
        "Optimum",
        "Greedy Estimate",
        "Best Value",
        "Exceed Greedy",
        "Solve Completely",
        "Solves completely (mean)",
    ]
    rows = []
    for p in report.problems:
        best = max((r.best_value for r in p.runs), default=None)
        mean = p.mean_solve_time
        rows.append(
            [
                p.name,
                str(p.n),
                str(p.R),
                f"{p.capacity_ratio:g}",
                "unavailable" if p.optimum is None else str(p.optimum),
                str(p.greedy_estimate),
                "-" if best is None else str(best),
                f"{p.exceeded}/{p.total}",
                "n/a" if p.solved is None else f"{p.solved}/{p.total}",
                "-" if mean is None else f"{mean:.2f} seconds",
            ]
        )
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _fmt_csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["schema_version", *SUMMARY_COLUMNS], lineterminator="\n")
    writer.writeheader()
    for p in report.problems:
        row = {k: ("" if v is None else v) for k, v in _summary(p).items()}
        writer.writerow({"schema_version": SCHEMA_VERSION, **row})
    return buf.getvalue()


def render_report(report: BenchReport, fmt: str = "table") -> str:
    if fmt == "table":
        return _fmt_table(report)
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        return _fmt_csv(report)
    raise ContractError(f"unknown report format {fmt!r}")


def campaign_to_dict(spec: CampaignSpec) -> dict:
    problems = []
    for p in spec.problems:
        inst = asdict(p.params)
        inst["correlation"] = p.params.correlation.value
        ga = {k: v for k, v in asdict(p.ga).items() if k != "seed"}
        problems.append(
            {"name": p.name, "instance": inst, "ga": ga, "repeats": p.repeats, "base_seed": p.base_seed}
        )
    return {"schema_version": SCHEMA_VERSION, "problems": problems}
