"""Batch experiments and the exhaustive small-input sweep."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import __version__, _kernels
from .algorithms import make_algorithm, ra_mixture
from .generators import GeneratorSpec, generate
from .online import run_online
from .opt import CapExceeded, brute_force_min, min_dominating_set_tree
from .tree import OnlineTree

RA_BOUND = Fraction(5, 2)
ALGORITHMS = ("a", "b", "ra", "greedy", "always-new", "never-new")


class BoundViolation(AssertionError):
    """RA exceeded 5/2 on some input; the message carries the input."""


def fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Row:
    instance: int
    generator: str
    n: int
    seed: int
    alg: str
    cost: Fraction
    cost_a: int
    cost_b: int
    ra_expected: Fraction
    opt: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.cost) / self.opt

    def to_dict(self) -> dict:
        return {
            "instance": self.instance,
            "generator": self.generator,
            "n": self.n,
            "seed": self.seed,
            "alg": self.alg,
            "cost": fmt(Fraction(self.cost)),
            "cost_a": self.cost_a,
            "cost_b": self.cost_b,
            "ra_expected": fmt(self.ra_expected),
            "opt": self.opt,
            "ratio": fmt(self.ratio),
            "ratio_float": float(self.ratio),
        }


@dataclass
class ExperimentReport:
    rows: list[Row]
    seed: int
    notes: list[str] = field(default_factory=list)

    def aggregates(self) -> dict[str, dict[str, str | float]]:
        out = {}
        for alg in dict.fromkeys(r.alg for r in self.rows):
            ratios = [r.ratio for r in self.rows if r.alg == alg]
            mx = max(ratios)
            mean = sum(ratios, Fraction(0)) / len(ratios)
            out[alg] = {"count": len(ratios), "max_ratio": fmt(mx), "max_ratio_float": float(mx), "mean_ratio": fmt(mean), "mean_ratio_float": float(mean)}
        return out

    def to_dict(self) -> dict:
        return {
            "meta": {"seed": self.seed, "version": __version__},
            "aggregates": self.aggregates(),
            "rows": [r.to_dict() for r in self.rows],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = list(Row.__dataclass_fields__) + ["ratio", "ratio_float"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for r in self.rows:
            w.writerow(r.to_dict())
        return buf.getvalue()


def _evaluate(job: tuple[int, GeneratorSpec, tuple[str, ...], int | None]) -> tuple[list[Row], str | None]:
    idx, spec, algs, brute_cap = job
    tree = generate(spec)
    opt = min_dominating_set_tree(tree).size
    if brute_cap is not None:
        try:
            if brute_force_min(tree, cap=brute_cap).size != opt:
                raise AssertionError(f"instance {idx}: DP and brute force disagree on {tree.to_json()}")
        except CapExceeded:
            return [], f"instance {idx} skipped: n={tree.n} is above the brute-force cap {brute_cap}"
    mix = ra_mixture(tree)
    ca, cb = mix.trace_a.cost, mix.trace_b.cost
    rows = []
    for alg in algs:
        cost = mix.expected_cost if alg == "ra" else Fraction(run_online(make_algorithm(alg), tree).cost)
        row = Row(idx, spec.label, tree.n, spec.seed, alg, cost, ca, cb, mix.expected_cost, opt)
        if alg == "ra" and row.ratio > RA_BOUND:
            raise BoundViolation(f"RA ratio {fmt(row.ratio)} > 5/2 on {tree.to_json()}")
        rows.append(row)
    return rows, None


def run_experiment(
    specs: Sequence[GeneratorSpec],
    algs: Iterable[str] = ("ra",),
    seed: int = 0,
    workers: int = 1,
    brute_cap: int | None = None,
) -> ExperimentReport:
    """Evaluate every algorithm on every generated instance.  Rows come back
    in instance order whatever the worker count."""
    algs = tuple(algs)
    for a in algs:
        if a not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {a!r}")
    jobs = [(i, s, algs, brute_cap) for i, s in enumerate(specs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=16))
    else:
        results = [_evaluate(j) for j in jobs]
    rows = [r for rs, _ in results for r in rs]
    notes = [note for _, note in results if note]
    return ExperimentReport(rows, seed, notes)


def random_specs(count: int, max_n: int, seed: int, kinds: Sequence[str] = ("uniform-attachment",)) -> list[GeneratorSpec]:
    import random

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        kind = rng.choice(list(kinds))
        n = rng.randint(4 if kind == "degree13-tree" else 2, max_n)
        if kind == "degree13-tree":
            n -= n % 2
        out.append(GeneratorSpec(kind, n, rng.getrandbits(32), rng.choice(["bfs", "dfs", "random-valid"])))
    return out


# -- exhaustive sweep -----------------------------------------------------------


@dataclass(frozen=True)
class SweepLine:
    n: int
    count: int
    domination_failures: int
    membership_mismatches: int
    arrival_edge_deficits: int
    oracle_mismatches: int
    bound_violations: int
    tight: int
    max_ratio: Fraction
    argmax: tuple[int, ...]
    seconds: float

    @property
    def ok(self) -> bool:
        return not (self.domination_failures or self.membership_mismatches or self.arrival_edge_deficits or self.oracle_mismatches or self.bound_violations)

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        del d["seconds"]  # keep reports byte-reproducible
        d["max_ratio"] = fmt(self.max_ratio)
        d["max_ratio_float"] = float(self.max_ratio)
        d["argmax"] = list(self.argmax)
        d["ok"] = self.ok
        return d


def _to_kernel(parents: Sequence[int]) -> np.ndarray:
    return np.array([-1] + [p - 1 for p in parents[1:]], dtype=np.int64)


def _from_kernel(par: np.ndarray) -> tuple[int, ...]:
    return (0,) + tuple(int(p) + 1 for p in par[1:] if p >= -1)


def exhaustive_small_sweep(max_n: int, check_brute: bool = True, min_n: int = 1) -> list[SweepLine]:
    """Every parent array with ``min_n <= n <= max_n`` vertices: A/B domination,
    the membership table, the arrival-edge probability bound, DP against brute
    force, and RA's 5/2 bound."""
    if max_n > 12:
        raise ValueError("the exhaustive sweep is limited to n <= 12")
    out = []
    for n in range(max(1, min_n), max_n + 1):
        stats = _kernels.new_stats()
        argmax = np.full(n, -2, dtype=np.int64)
        start = time.perf_counter()
        _kernels.sweep_all_parent_arrays(n, check_brute, stats, argmax)
        s = stats
        out.append(
            SweepLine(
                n,
                int(s[_kernels.S_COUNT]),
                int(s[_kernels.S_DOM]),
                int(s[_kernels.S_MEMBERSHIP]),
                int(s[_kernels.S_ARRIVAL_EDGE]),
                int(s[_kernels.S_ORACLE]),
                int(s[_kernels.S_BOUND]),
                int(s[_kernels.S_TIGHT]),
                Fraction(int(s[_kernels.S_MAX_NUM]), int(s[_kernels.S_MAX_DEN])),
                _from_kernel(argmax),
                time.perf_counter() - start,
            )
        )
    return out


def kernel_batch_check(trees: Sequence[OnlineTree], check_brute: bool = False) -> dict:
    """Run the sweep kernel over an explicit batch (e.g. random large inputs)."""
    width = max(t.n for t in trees)
    pars = np.full((len(trees), width), -2, dtype=np.int64)
    sizes = np.zeros(len(trees), dtype=np.int64)
    for r, t in enumerate(trees):
        pars[r, : t.n] = _to_kernel(t.parents)
        sizes[r] = t.n
    stats = _kernels.new_stats()
    argmax = np.full(width, -2, dtype=np.int64)
    _kernels.sweep_batch(pars, sizes, check_brute, stats, argmax)
    return {
        "count": int(stats[_kernels.S_COUNT]),
        "domination_failures": int(stats[_kernels.S_DOM]),
        "membership_mismatches": int(stats[_kernels.S_MEMBERSHIP]),
        "arrival_edge_deficits": int(stats[_kernels.S_ARRIVAL_EDGE]),
        "oracle_mismatches": int(stats[_kernels.S_ORACLE]),
        "bound_violations": int(stats[_kernels.S_BOUND]),
        "max_ratio": Fraction(int(stats[_kernels.S_MAX_NUM]), int(stats[_kernels.S_MAX_DEN])),
        "argmax": _from_kernel(argmax),
    }
