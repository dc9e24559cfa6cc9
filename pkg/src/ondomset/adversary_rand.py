"""Lower-bound adversary for randomized online algorithms.

The adversary reveals a path of 2m vertices, asks for each vertex's
selection probability, and then adds a pendant next to the cheaper vertex of
every pair that the algorithm does not already cover with high probability.
Either way the algorithm pays at least 4/3 per pair in expectation while an
offline cover pays one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol

from .algorithms import RandomizedRA, ra_mixture
from .online import OnlineAlgorithm, run_online
from .opt import opt_size
from .tree import OnlineTree, is_dominating, pendant

THRESHOLD = Fraction(2, 3)
TARGET = Fraction(4, 3)


@dataclass(frozen=True)
class ProbabilityEstimate:
    """Selection probabilities of every vertex at the end of the input and,
    per arrival edge (u, v), of both endpoints right after v was revealed.
    ``radius`` is zero for exact values."""

    final: dict[int, Fraction | float]
    at_reveal: dict[tuple[int, int], tuple[Fraction | float, Fraction | float]]
    radius: dict[int, float]
    exact: bool
    trials: int = 0


class ProbabilityOracle(Protocol):
    name: str

    def estimate(self, tree: OnlineTree) -> ProbabilityEstimate: ...


class ExactRAOracle:
    """Exact probabilities for RA from its two deterministic arms."""

    name = "ra"
    exact = True

    def estimate(self, tree: OnlineTree) -> ProbabilityEstimate:
        mix = ra_mixture(tree)
        final = {v: mix.probability(v) for v in tree.vertices()}
        at_reveal = {(u, v): (mix.probability(u, v), mix.probability(v, v)) for u, v in tree.edges()}
        return ProbabilityEstimate(final, at_reveal, {v: 0.0 for v in tree.vertices()}, True)


class MonteCarloOracle:
    """Frequencies over independent runs of a randomized online algorithm.

    Trial ``k`` builds its algorithm from a seed drawn from the master seed,
    so the estimate is reproducible.  ``radius`` is ``z`` standard errors,
    with the variance floored at ``1/trials`` so that empirical 0 or 1 still
    carry some uncertainty.
    """

    exact = False

    def __init__(
        self,
        factory: Callable[[int], OnlineAlgorithm] = RandomizedRA,
        trials: int = 10_000,
        seed: int = 0,
        z: float = 3.0,
        name: str = "monte-carlo",
    ) -> None:
        if trials < 1:
            raise ValueError("trials must be positive")
        self.factory = factory
        self.trials = trials
        self.seed = seed
        self.z = z
        self.name = name

    def trial_seeds(self) -> list[int]:
        rng = random.Random(self.seed)
        return [rng.getrandbits(63) for _ in range(self.trials)]

    def sample_traces(self, tree: OnlineTree):
        for s in self.trial_seeds():
            yield run_online(self.factory(s), tree)

    def estimate(self, tree: OnlineTree) -> ProbabilityEstimate:
        final = dict.fromkeys(tree.vertices(), 0)
        edges = tree.edges()
        at_u = dict.fromkeys(edges, 0)
        at_v = dict.fromkeys(edges, 0)
        for trace in self.sample_traces(tree):
            when = trace.selected_at
            for v in when:
                final[v] += 1
            for u, v in edges:
                at_u[(u, v)] += when.get(u, v + 1) <= v
                at_v[(u, v)] += when.get(v, v + 1) <= v
        n = self.trials
        probs = {v: c / n for v, c in final.items()}
        radius = {v: self.z * math.sqrt(max(p * (1 - p), 1 / n) / n) for v, p in probs.items()}
        pairs = {e: (at_u[e] / n, at_v[e] / n) for e in edges}
        return ProbabilityEstimate(probs, pairs, radius, False, n)


@dataclass(frozen=True)
class EdgeCheck:
    parent: int
    child: int
    total: Fraction | float
    slack: float
    ok: bool


@dataclass(frozen=True)
class ArrivalEdgeReport:
    checks: tuple[EdgeCheck, ...]
    exact: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[EdgeCheck]:
        return [c for c in self.checks if not c.ok]


def check_lemma17(tree: OnlineTree, oracle: ProbabilityOracle | None = None) -> ArrivalEdgeReport:
    """Every arrival edge has endpoint probabilities summing to at least one
    right after the child is revealed (within the radius for estimates)."""
    oracle = oracle or ExactRAOracle()
    est = oracle.estimate(tree)
    checks = []
    for (u, v), (pu, pv) in est.at_reveal.items():
        total = pu + pv
        slack = est.radius[u] + est.radius[v]
        ok = total >= 1 if est.exact else total + slack >= 1
        checks.append(EdgeCheck(u, v, total, slack, ok))
    return ArrivalEdgeReport(tuple(checks), est.exact)


def path_input(length: int) -> OnlineTree:
    return OnlineTree((0,) + tuple(range(1, length)))


@dataclass(frozen=True)
class PairDecision:
    pair: int
    case: int
    low: int | None
    other: int | None
    pendant: int | None
    off_vertex: int


@dataclass
class RandAdversaryTranscript:
    m: int
    oracle: str
    path_probabilities: dict[int, Fraction | float]
    decisions: list[PairDecision]
    tree: OnlineTree
    off_witness: frozenset[int]
    radius: dict[int, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "oracle": self.oracle,
            "path_probabilities": {str(k): str(v) for k, v in self.path_probabilities.items()},
            "pairs": [vars(d) for d in self.decisions],
            "parents": list(self.tree.parents),
            "off_witness": sorted(self.off_witness),
        }


def build_rand_adversary(m: int, oracle: ProbabilityOracle | None = None) -> RandAdversaryTranscript:
    if m < 1:
        raise ValueError("m must be positive")
    oracle = oracle or ExactRAOracle()
    path = path_input(2 * m)
    est = oracle.estimate(path)
    p, r = est.final, est.radius
    tree = path
    decisions = []
    off = set()
    for pair in range(1, m + 1):
        a, b = 2 * pair - 1, 2 * pair
        # conservative for estimates: only skip the pendant when both are
        # certainly above the threshold
        if min(p[a] - r[a], p[b] - r[b]) >= THRESHOLD:
            decisions.append(PairDecision(pair, 1, None, None, None, a))
            off.add(a)
            continue
        low, other = (a, b) if p[a] <= p[b] else (b, a)
        tree = pendant(tree, low)
        decisions.append(PairDecision(pair, 2, low, other, tree.n, low))
        off.add(low)
    tree = OnlineTree(tree.parents)
    witness = frozenset(off)
    if not is_dominating(tree, witness) or len(witness) != m:
        raise AssertionError("offline cover of the adversary input is broken")
    return RandAdversaryTranscript(m, oracle.name, {j: p[j] for j in path.vertices()}, decisions, tree, witness, dict(r))


@dataclass(frozen=True)
class RandEvaluation:
    expected_cost: Fraction | float
    radius: float
    opt: int
    off: int
    ratio: Fraction | float
    ratio_low: Fraction | float
    exact: bool
    group_costs: tuple[Fraction, ...] = ()

    def to_dict(self) -> dict:
        fmt = lambda x: f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else x
        return {
            "expected_cost": fmt(self.expected_cost),
            "radius": self.radius,
            "opt": self.opt,
            "off": self.off,
            "ratio": fmt(self.ratio),
            "ratio_float": float(self.ratio),
            "ratio_low": fmt(self.ratio_low),
            "exact": self.exact,
        }


def evaluate_rand_adversary(transcript: RandAdversaryTranscript, oracle: ProbabilityOracle | None = None) -> RandEvaluation:
    """Expected cost on the adversary's input divided by the true optimum."""
    oracle = oracle or ExactRAOracle()
    tree = transcript.tree
    opt = opt_size(tree)
    if opt > transcript.m:
        raise AssertionError(f"optimum {opt} exceeds the offline cover size {transcript.m}")
    if isinstance(oracle, ExactRAOracle):
        mix = ra_mixture(tree)
        cost = mix.expected_cost
        groups = []
        for d in transcript.decisions:
            members = [2 * d.pair - 1, 2 * d.pair] + ([d.pendant] if d.pendant else [])
            groups.append(sum((mix.probability(v) for v in members), Fraction(0)))
        ratio = cost / opt
        return RandEvaluation(cost, 0.0, opt, transcript.m, ratio, ratio, True, tuple(groups))
    if not isinstance(oracle, MonteCarloOracle):
        raise TypeError("cost evaluation needs the exact RA oracle or a Monte Carlo oracle")
    costs = [t.cost for t in oracle.sample_traces(tree)]
    n = len(costs)
    mean = sum(costs) / n
    var = sum((c - mean) ** 2 for c in costs) / max(n - 1, 1)
    radius = oracle.z * math.sqrt(max(var, 1 / n) / n)
    return RandEvaluation(mean, radius, opt, transcript.m, mean / opt, (mean - radius) / opt, False)


__all__ = [
    "ExactRAOracle",
    "MonteCarloOracle",
    "ProbabilityEstimate",
    "RandAdversaryTranscript",
    "RandEvaluation",
    "build_rand_adversary",
    "check_lemma17",
    "evaluate_rand_adversary",
    "path_input",
]
