"""Small instances on which a given normalisation step applies.

Random trees almost always violate the first property, so the later steps
are fed from hand-built shapes revealed in random orders.  Each shape is
listed with the step it was designed for; the filter below still decides.
"""

from __future__ import annotations

import random
from typing import Iterator

from ondomset.analysis import PreconditionError, normalize_step, property_witnesses
from ondomset.generators import POLICIES, GeneratorSpec, generate, reveal
from ondomset.opt import enumerate_optimal_sets
from ondomset.tree import OnlineTree

ORDER = ("P1", "P2", "P3", "P4", "P5", "P6")

TEMPLATES = {
    # hub of degree four whose last leaf is covered only by the hub; a
    # low-degree selected vertex sits three levels below it
    "P2": [
        (0, 1, 1, 1, 4, 5, 5, 7, 7, 8, 8, 9, 9, 1),
        # same with the low vertex padded to degree three
        (0, 1, 1, 1, 4, 5, 5, 7, 7, 8, 8, 9, 9, 1, 6, 6),
    ],
    # a selected root of degree two above two good triplets
    "P3": [(0, 1, 1, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9)],
    # a selected root next to a vertex its subtree already covers
    "P4": [(0, 1, 1, 2, 2, 4, 4, 5, 5, 6, 6, 7, 7, 8, 8, 1)],
    # two good triplets hanging below a selected root
    "P5": [(0, 1, 1, 1, 2, 2, 5, 5, 6, 6, 7, 7, 8, 8, 9, 9, 10, 10)],
}


def _shape(parents: tuple[int, ...]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in parents]
    for i, p in enumerate(parents[1:], start=1):
        adj[i].append(p - 1)
        adj[p - 1].append(i)
    return adj


def _candidates(target: str, seed: int) -> Iterator[OnlineTree]:
    rng = random.Random(seed)
    shapes = [_shape(p) for p in TEMPLATES.get(target, [])]
    k = 0
    while True:
        k += 1
        if shapes and k % 2:
            yield reveal(rng.choice(shapes), "random-valid", rng)
            continue
        kind = rng.choice(["uniform-attachment", "degree13-tree", "caterpillar"])
        n = rng.randint(4, 12)
        if kind == "degree13-tree":
            n -= n % 2
        yield generate(GeneratorSpec(kind, n, rng.getrandbits(32), rng.choice(POLICIES)))


def crafted_instances(target: str, count: int, seed: int = 0, budget: int = 200_000):
    """``count`` distinct (tree, optimal set) pairs on which ``target`` is
    the first violated property and its step applies."""
    found: dict[tuple, tuple[OnlineTree, frozenset[int]]] = {}
    for i, tree in enumerate(_candidates(target, seed)):
        if len(found) >= count or i >= budget:
            break
        for optset in enumerate_optimal_sets(tree, cap=20)[:40]:
            key = (tree.parents, optset)
            if key in found:
                continue
            w = property_witnesses(tree, optset)
            first = next((p for p in ORDER if w[p]), None)
            if first != target:
                continue
            try:
                normalize_step(tree, optset, target)
            except PreconditionError:
                continue
            found[key] = (tree, optset)
            if len(found) >= count:
                break
    return list(found.values())
