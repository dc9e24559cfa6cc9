"""Online dominating-set algorithms on trees.

``AlgorithmA`` and ``AlgorithmB`` are the two deterministic arms of the
randomized algorithm RA, which flips one fair coin before the first reveal
and then runs the chosen arm.  Because the mixture has exactly two atoms, its
expected cost and per-vertex selection probabilities are computed exactly by
running both arms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .online import GrowingTree, SelectionTrace, run_online
from .tree import OnlineTree

HALF = Fraction(1, 2)


class _ParityAlgorithm:
    # select_new_on_odd: A picks v_i when p(v_i) is odd, B when it is even
    select_new_on_odd: bool
    name = ""

    def reset(self) -> None:
        pass

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]:
        if v == 1:
            return (1,)
        u = tree.parent(v)
        if tree.degree(u) >= 3:
            return (u,)
        odd = tree.depth(v) % 2 == 1
        return (v,) if odd == self.select_new_on_odd else (u,)


class AlgorithmA(_ParityAlgorithm):
    name = "a"
    select_new_on_odd = True


class AlgorithmB(_ParityAlgorithm):
    name = "b"
    select_new_on_odd = False


class BaselineGreedy:
    """Select v1; when an undominated vertex arrives, cover it.

    The parent is taken when it is itself undominated, otherwise the new
    vertex is taken.  In a valid run the parent is always already dominated,
    so this amounts to selecting every vertex that arrives at an unselected one.
    """

    name = "greedy"

    def reset(self) -> None:
        pass

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]:
        if v == 1:
            return (1,)
        u = tree.parent(v)
        if u in selected:
            return ()
        u_dominated = any(w in selected for w in tree.neighbors(u))
        return (v,) if u_dominated else (u,)


class AlwaysNew:
    """Select every arriving vertex, except one that lands on a selected
    parent right after a selected sibling did (that sibling already covers
    the parent's side, so a second leaf there is free)."""

    name = "always-new"

    def reset(self) -> None:
        pass

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]:
        if v == 1:
            return (1,)
        u = tree.parent(v)
        kids = tree.children(u)
        if u in selected and len(kids) >= 2 and kids[-2] in selected:
            return ()
        return (v,)


class NeverNew:
    """Never select the arriving vertex; cover it through its parent."""

    name = "never-new"

    def reset(self) -> None:
        pass

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]:
        if v == 1:
            return (1,)
        return (tree.parent(v),)


DETERMINISTIC = {
    "a": AlgorithmA,
    "b": AlgorithmB,
    "greedy": BaselineGreedy,
    "always-new": AlwaysNew,
    "never-new": NeverNew,
}


def make_algorithm(name: str):
    try:
        return DETERMINISTIC[name]()
    except KeyError:
        raise ValueError(f"unknown deterministic algorithm {name!r}; choose from {sorted(DETERMINISTIC)}") from None


def run_algorithm_a(tree: OnlineTree) -> SelectionTrace:
    return run_online(AlgorithmA(), tree)


def run_algorithm_b(tree: OnlineTree) -> SelectionTrace:
    return run_online(AlgorithmB(), tree)


def run_baseline_greedy(tree: OnlineTree) -> SelectionTrace:
    return run_online(BaselineGreedy(), tree)


@dataclass(frozen=True)
class RAMixture:
    trace_a: SelectionTrace
    trace_b: SelectionTrace
    weight: Fraction = HALF

    @property
    def expected_cost(self) -> Fraction:
        return self.weight * self.trace_a.cost + (1 - self.weight) * self.trace_b.cost

    def probability(self, v: int, t: int | None = None) -> Fraction:
        """P(v is selected) at the end, or right after v_t when ``t`` is given."""
        if t is None:
            in_a, in_b = v in self.trace_a.selected_at, v in self.trace_b.selected_at
        else:
            in_a = self.trace_a.selected_at.get(v, t + 1) <= t
            in_b = self.trace_b.selected_at.get(v, t + 1) <= t
        return self.weight * in_a + (1 - self.weight) * in_b


def ra_mixture(tree: OnlineTree) -> RAMixture:
    return RAMixture(run_algorithm_a(tree), run_algorithm_b(tree))


def ra_expected_cost(tree: OnlineTree) -> Fraction:
    return ra_mixture(tree).expected_cost


def ra_selection_probability(tree: OnlineTree) -> dict[int, Fraction]:
    mix = ra_mixture(tree)
    return {v: mix.probability(v) for v in tree.vertices()}


class RandomizedRA:
    """RA as a genuine online algorithm: one seeded coin picks the arm."""

    name = "ra-sample"

    def __init__(self, seed: int | None = None) -> None:
        self._rng = random.Random(seed)
        self.arm: _ParityAlgorithm = AlgorithmA()

    def reset(self) -> None:
        self.arm = AlgorithmA() if self._rng.random() < 0.5 else AlgorithmB()

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]:
        return self.arm.on_reveal(tree, v, selected)


def run_ra_sample(tree: OnlineTree, seed: int | None = None) -> tuple[str, SelectionTrace]:
    alg = RandomizedRA(seed)
    trace = run_online(alg, tree)
    return alg.arm.name, trace


# -- structural membership table and per-vertex expected costs ------------

# case label -> (in D_A, in D_B)
MEMBERSHIP = {
    "1": (True, True),
    "2": (True, True),
    "3-e": (False, True),
    "3-o": (True, False),
    "4-1-e": (False, True),
    "4-1-o": (True, False),
    "4-2": (False, False),
    "4-3-e": (False, True),
    "4-3-o": (True, False),
}


class UnclassifiedVertex(RuntimeError):
    pass


def classify_vertex(tree: OnlineTree, v: int) -> str:
    """Structural case of ``v`` from final degrees, reveal-time degree and parity."""
    if v == 1:
        return "1"
    deg = tree.degree(v)
    parity = "e" if tree.depth(v) % 2 == 0 else "o"
    if deg >= 3:
        return "2"
    if deg == 2:
        return f"3-{parity}"
    if deg == 1:
        u = tree.neighbors[v][0]
        if tree.degree(u) >= 3:
            if tree.degree_at(u, v) <= 2:
                return f"4-1-{parity}"
            return "4-2"
        return f"4-3-{parity}"
    raise UnclassifiedVertex(f"v{v} matches no case (degree {deg})")


@dataclass(frozen=True)
class MembershipFinding:
    vertex: int
    case: str
    expected: tuple[bool, bool]
    actual: tuple[bool, bool]

    @property
    def ok(self) -> bool:
        return self.expected == self.actual


def verify_membership_table(tree: OnlineTree) -> list[MembershipFinding]:
    if tree.n < 2:
        raise ValueError("membership table assumes at least two vertices")
    da, db = run_algorithm_a(tree).selected, run_algorithm_b(tree).selected
    out = []
    for v in tree.vertices():
        case = classify_vertex(tree, v)
        out.append(MembershipFinding(v, case, MEMBERSHIP[case], (v in da, v in db)))
    return out


_CASE_COST = {"1": Fraction(1), "2": Fraction(1), "3": HALF, "4-1": HALF, "4-2": Fraction(0), "4-3": HALF}


def structural_cost(tree: OnlineTree, v: int) -> Fraction:
    case = classify_vertex(tree, v)
    key = case if case in ("1", "2", "4-2") else case.rsplit("-", 1)[0]
    return _CASE_COST[key]


def expected_cost_per_vertex(tree: OnlineTree, v: int, mixture: RAMixture | None = None) -> Fraction:
    """RA's expected cost for ``v`` from its structural case, cross-checked
    against the two arms' actual final sets."""
    if tree.n < 2:
        raise ValueError("per-vertex costs assume at least two vertices")
    value = structural_cost(tree, v)
    mixture = mixture or ra_mixture(tree)
    actual = mixture.probability(v)
    if value != actual:
        raise AssertionError(f"v{v}: structural cost {value} but arms give {actual}")
    return value
