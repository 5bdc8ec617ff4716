"""Seeded experiment scenarios producing CSV records.

Each (grid point, seed) pair is an independent task whose random stream is
derived from ``(seed, ell, d)`` alone, and records are sorted before writing,
so output bytes do not depend on how many workers ran the tasks.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from treedisc.evaluator import eval_certified, eval_star_circle_exact
from treedisc.labeling import DEFAULT_L0, label_star, label_tree
from treedisc.oriented import orient_tree, oriented_eval
from treedisc.sphere import EpsNet, certified_net, lower_bound, phi, sample_sphere_many
from treedisc.tree_core import InputError, Tree, generate, num_leaves

CSV_COLUMNS = (
    "scenario", "d", "ell", "seed", "value_lo", "value_hi",
    "lower_bound", "trace_bound", "ratio", "wall_ms",
)
SCENARIOS = ("star-scaling", "concentration", "tree-scaling", "oriented-scaling")
FAMILIES = ("random", "caterpillar", "spider", "star")

# target relative certification error for d >= 2 nets
CERT_TOLERANCE = 0.01
CIRCLE_EPS = 0.005


@dataclass
class ExperimentConfig:
    scenario: str
    d: int = 1
    grid: list[int] = field(default_factory=list)
    seeds: list[int] = field(default_factory=lambda: [1])
    family: str = "random"
    eps: float | None = None
    l0: int = DEFAULT_L0
    csv: str | None = None
    threads: int | None = None
    timing: bool = False

    def validate(self) -> None:
        if self.scenario not in SCENARIOS:
            raise InputError(f"unknown scenario {self.scenario!r}; pick one of {', '.join(SCENARIOS)}")
        if not self.grid:
            raise InputError("size grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InputError(f"grid must be strictly increasing, got {self.grid}")
        if min(self.grid) < 1:
            raise InputError("grid sizes must be >= 1")
        if not self.seeds:
            raise InputError("at least one explicit seed is required")
        if self.d < 1:
            raise InputError("d must be >= 1")
        if self.family not in FAMILIES:
            raise InputError(f"unknown family {self.family!r}")
        if self.eps is not None and not 0 < self.eps <= 2:
            raise InputError("eps must lie in (0, 2]")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {k: data[k] for k in cls.__dataclass_fields__ if k in data}
        return cls(**known)


@dataclass
class ExperimentRecord:
    scenario: str
    d: int
    ell: int
    seed: int
    value_lo: float
    value_hi: float
    lower_bound: float
    trace_bound: float
    ratio: float
    wall_ms: float | None = None
    target: int = 0  # grid value the record was generated for; not written

    def row(self) -> list[str]:
        wall = "" if self.wall_ms is None else f"{self.wall_ms:.1f}"
        nums = (self.value_lo, self.value_hi, self.lower_bound, self.trace_bound, self.ratio)
        return [self.scenario, str(self.d), str(self.ell), str(self.seed), *(repr(float(x)) for x in nums), wall]


def point_rng(seed: int, ell: int, d: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(ell), int(d), int(stream)])


def default_eps(d: int, lb: float, m: int) -> float:
    """Net radius keeping the certification error under 1% of the measured value."""
    if d == 1:
        return CIRCLE_EPS
    eps_lip = CERT_TOLERANCE * lb / max(m, 1)
    eps_ang = math.sqrt(2 * CERT_TOLERANCE / (1 + CERT_TOLERANCE))
    return min(2.0, max(eps_lip, eps_ang))


@lru_cache(maxsize=16)
def _net(d: int, eps: float, seed: int) -> EpsNet:
    return certified_net(d, eps, np.random.default_rng([int(seed), d, 7919]))


def family_tree(family: str, ell: int, seed: int) -> Tree:
    """A tree of the family with (about) ``ell`` leaves."""
    if family == "star":
        return generate("star", ell)
    if family == "caterpillar":
        return generate("caterpillar", max(2, round(ell / 5)), 5)
    if family == "spider":
        return generate("spider", max(3, ell), 3)
    if family == "random":
        # a uniform labeled tree on n vertices has about n/e leaves
        return generate("random", max(3, round(math.e * ell)), seed=seed)
    raise InputError(f"unknown family {family!r}")


def r_a_values(ell: int, d: int, rng, net: EpsNet) -> np.ndarray:
    """R_a = sum_i |<x_i, a>| over ell//2 uniform points x_i, for every net direction a."""
    x = sample_sphere_many(d, ell // 2, rng)
    return np.abs(x @ net.points.T).sum(axis=0)


# ------------------------------------------------------------------ points


def _star_point(d, ell, seed, eps, l0, family):
    f = label_star(ell, d, point_rng(seed, ell, d))
    tree = generate("star", ell)
    lb = lower_bound(ell, d)
    if d == 1:
        res = eval_star_circle_exact(tree, f)
    else:
        e = eps or default_eps(d, lb, tree.m)
        res = eval_certified(tree, f, _net(d, e, seed), slack="best")
    return ell, res.lower, res.upper, lb, phi(ell, d)


def _concentration_point(d, ell, seed, eps, l0, family):
    lb = lower_bound(ell, d)
    e = eps or (CIRCLE_EPS if d == 1 else default_eps(d, lb, ell))
    R = r_a_values(ell, d, point_rng(seed, ell, d), _net(d, e, seed))
    top = float(R.max())
    # R_a is a support function, Lipschitz with constant ell/2
    hi = min(top + e * (ell // 2), top / (1 - e * e / 2) if e * e < 2 else math.inf)
    return ell, top, hi, lb, lb + ell ** 0.75


def _tree_point(d, ell, seed, eps, l0, family):
    tree = family_tree(family, ell, seed)
    leaves = num_leaves(tree)
    f, trace = label_tree(tree, d, point_rng(seed, ell, d), l0=l0)
    lb = lower_bound(leaves, d)
    e = eps or default_eps(d, lb, tree.m)
    res = eval_certified(tree, f, _net(d, e, seed), slack="best")
    return leaves, res.lower, res.upper, lb, trace.bound()


def _oriented_point(d, ell, seed, eps, l0, family):
    tree = family_tree(family, ell, seed)
    leaves = num_leaves(tree)
    sigma, trace = orient_tree(tree)
    value, _ = oriented_eval(tree, sigma)
    return leaves, float(value), float(value), leaves / 2, float(trace.bound())


_POINTS = {
    "star-scaling": _star_point,
    "concentration": _concentration_point,
    "tree-scaling": _tree_point,
    "oriented-scaling": _oriented_point,
}


def _run_task(args) -> ExperimentRecord:
    scenario, d, ell, seed, eps, l0, family, timing = args
    t0 = time.perf_counter()
    leaves, lo, hi, lb, bound = _POINTS[scenario](d, ell, seed, eps, l0, family)
    wall = (time.perf_counter() - t0) * 1000 if timing else None
    return ExperimentRecord(scenario, d, leaves, seed, lo, hi, lb, bound, hi / lb, wall, target=ell)


def thread_count(requested: int | None = None) -> int:
    """Worker count: ``requested`` (or the env cap when unset), capped by TREEDISC_THREADS."""
    cap = os.environ.get("TREEDISC_THREADS")
    n = requested if requested else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, n)


def run_experiment(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.validate()
    tasks = [
        (cfg.scenario, cfg.d, ell, seed, cfg.eps, cfg.l0, cfg.family, cfg.timing)
        for ell in cfg.grid
        for seed in cfg.seeds
    ]
    workers = thread_count(cfg.threads)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    records.sort(key=lambda r: (r.scenario, r.d, r.target, r.ell, r.seed))
    return records


def scenario_star_scaling(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.scenario = "star-scaling"
    return run_experiment(cfg)


def scenario_concentration(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.scenario = "concentration"
    return run_experiment(cfg)


def scenario_tree_scaling(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.scenario = "tree-scaling"
    return run_experiment(cfg)


def scenario_oriented_scaling(cfg: ExperimentConfig) -> list[ExperimentRecord]:
    cfg.scenario = "oriented-scaling"
    return run_experiment(cfg)


# ----------------------------------------------------------------- summary


def mean_ratios(records: list[ExperimentRecord]) -> list[tuple[int, float]]:
    """Seed-averaged ratio per grid value, in grid order."""
    groups: dict[int, list[float]] = {}
    for r in records:
        groups.setdefault(r.target, []).append(r.ratio)
    return [(t, float(np.mean(v))) for t, v in sorted(groups.items())]


def strictly_decreasing(values) -> bool:
    values = list(values)
    return all(b < a for a, b in zip(values, values[1:]))


def to_csv(records: list[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()
