"""Random and structured tree families, revealed under a chosen order policy.

A generator first builds an unlabeled shape (adjacency lists over 0..n-1)
and then turns it into an online input by walking it.  ``bfs`` and ``dfs``
start from shape vertex 0 and visit neighbours in label order;
``random-valid`` starts anywhere and reveals a uniformly chosen frontier
vertex each step.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from .tree import OnlineTree

KINDS = ("uniform-attachment", "path", "star", "degree13-tree", "caterpillar")
POLICIES = ("bfs", "dfs", "random-valid")


class InfeasibleSpec(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    seed: int = 0
    policy: str = "bfs"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InfeasibleSpec(f"unknown generator kind {self.kind!r}")
        if self.policy not in POLICIES:
            raise InfeasibleSpec(f"unknown reveal policy {self.policy!r}")
        if self.n < 2:
            raise InfeasibleSpec("n must be at least 2")
        if self.kind == "degree13-tree" and (self.n < 4 or self.n % 2):
            raise InfeasibleSpec("trees with all degrees in {1, 3} have an even number >= 4 of vertices")

    @property
    def label(self) -> str:
        return f"{self.kind}/{self.policy}"


Shape = list[list[int]]


def _empty(n: int) -> Shape:
    return [[] for _ in range(n)]


def _link(adj: Shape, a: int, b: int) -> None:
    adj[a].append(b)
    adj[b].append(a)


def uniform_attachment_shape(n: int, rng: random.Random) -> Shape:
    adj = _empty(n)
    for i in range(1, n):
        _link(adj, i, rng.randrange(i))
    return adj


def path_shape(n: int) -> Shape:
    adj = _empty(n)
    for i in range(1, n):
        _link(adj, i - 1, i)
    return adj


def star_shape(n: int) -> Shape:
    # the hub is label 1 so that a walk from label 0 enters through a leaf
    adj = _empty(n)
    for i in range(n):
        if i != 1:
            _link(adj, 1, i)
    return adj


def degree13_shape(n: int, rng: random.Random) -> Shape:
    """Start from a 3-star and repeatedly turn a random leaf into a cherry."""
    adj = star_shape(4)
    leaves = [0, 2, 3]
    while len(adj) < n:
        leaf = leaves.pop(rng.randrange(len(leaves)))
        a, b = len(adj), len(adj) + 1
        adj.extend([[], []])
        _link(adj, leaf, a)
        _link(adj, leaf, b)
        leaves.extend([a, b])
    return adj


def caterpillar_shape(n: int, rng: random.Random) -> Shape:
    spine = max(1, (n + 1) // 2)
    adj = path_shape(spine) + [[] for _ in range(n - spine)]
    for leg in range(spine, n):
        _link(adj, leg, rng.randrange(spine))
    return adj


def reveal(shape: Shape, policy: str, rng: random.Random) -> OnlineTree:
    n = len(shape)
    order: list[int] = []
    parent_of: dict[int, int] = {}
    if policy == "bfs":
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            order.append(x)
            for y in sorted(shape[x]):
                if y not in seen:
                    seen.add(y)
                    parent_of[y] = x
                    queue.append(y)
    elif policy == "dfs":
        seen = set()
        stack = [(0, -1)]
        while stack:
            x, p = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            order.append(x)
            if p >= 0:
                parent_of[x] = p
            stack.extend((y, x) for y in sorted(shape[x], reverse=True) if y not in seen)
    elif policy == "random-valid":
        start = rng.randrange(n)
        seen = {start}
        order.append(start)
        frontier = [(y, start) for y in shape[start]]
        while frontier:
            y, p = frontier.pop(rng.randrange(len(frontier)))
            seen.add(y)
            order.append(y)
            parent_of[y] = p
            frontier.extend((z, y) for z in shape[y] if z not in seen)
    else:
        raise InfeasibleSpec(f"unknown reveal policy {policy!r}")
    index = {x: i + 1 for i, x in enumerate(order)}
    parents = [0] + [index[parent_of[x]] for x in order[1:]]
    return OnlineTree(tuple(parents))


def generate(spec: GeneratorSpec) -> OnlineTree:
    rng = random.Random(spec.seed)
    if spec.kind == "uniform-attachment":
        shape = uniform_attachment_shape(spec.n, rng)
    elif spec.kind == "path":
        shape = path_shape(spec.n)
    elif spec.kind == "star":
        shape = star_shape(spec.n)
    elif spec.kind == "degree13-tree":
        shape = degree13_shape(spec.n, rng)
    else:
        shape = caterpillar_shape(spec.n, rng)
    tree = reveal(shape, spec.policy, rng)
    if spec.kind == "degree13-tree" and any(d not in (1, 3) for d in tree.degrees[1:]):
        raise AssertionError("degree-{1,3} generator produced another degree")
    return tree


def random_parents(n: int, rng: random.Random) -> OnlineTree:
    """Uniform over all parent arrays of length ``n``."""
    return OnlineTree((0,) + tuple(rng.randint(1, i) for i in range(1, n)))
