"""The online model: a tree that grows one vertex at a time and a runner that
feeds reveals to an algorithm while enforcing irrevocability and domination."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Protocol

from .tree import OnlineTree


class ContractViolation(RuntimeError):
    """An online algorithm broke the domination or irrevocability contract."""


class GrowingTree:
    """Revealed prefix of an online input.  Algorithms get read access only."""

    def __init__(self) -> None:
        self.parents: list[int] = []
        self._deg: list[int] = [0]
        self._depth: list[int] = [0]
        self._children: list[list[int]] = [[]]

    @property
    def n(self) -> int:
        return len(self.parents)

    def reveal(self, parent: int) -> int:
        v = self.n + 1
        if v == 1:
            if parent not in (0, None):
                raise ValueError("the first vertex has no parent")
            self.parents.append(0)
            self._deg.append(0)
            self._depth.append(0)
        else:
            if not 1 <= parent < v:
                raise ValueError(f"v{v} cannot arrive at v{parent}")
            self.parents.append(parent)
            self._deg.append(1)
            self._deg[parent] += 1
            self._depth.append(self._depth[parent] + 1)
            self._children[parent].append(v)
        self._children.append([])
        return v

    def parent(self, v: int) -> int:
        return self.parents[v - 1]

    def degree(self, v: int) -> int:
        """Current degree, i.e. deg_{v_n}(v) for the latest revealed v_n."""
        return self._deg[v]

    def depth(self, v: int) -> int:
        return self._depth[v]

    def children(self, v: int) -> list[int]:
        return self._children[v]

    def neighbors(self, v: int) -> list[int]:
        out = list(self._children[v])
        if v != 1:
            out.append(self.parents[v - 1])
        return out

    def freeze(self) -> OnlineTree:
        return OnlineTree(tuple(self.parents))


class OnlineAlgorithm(Protocol):
    """Receives reveal events and answers with vertices to add.

    ``selected`` is the accumulated set so far; treat it as read-only.
    Returning an already-selected vertex is a no-op.
    """

    name: str

    def reset(self) -> None: ...

    def on_reveal(self, tree: GrowingTree, v: int, selected: set[int]) -> Iterable[int]: ...


@dataclass
class SelectionTrace:
    additions: list[frozenset[int]] = field(default_factory=list)
    selected_at: dict[int, int] = field(default_factory=dict)

    @property
    def selected(self) -> set[int]:
        return set(self.selected_at)

    @property
    def cost(self) -> int:
        return len(self.selected_at)

    def selected_after(self, t: int) -> set[int]:
        return {v for v, when in self.selected_at.items() if when <= t}


class OnlineRun:
    """Drives one algorithm over reveals that may be chosen adaptively."""

    def __init__(self, algorithm: OnlineAlgorithm) -> None:
        self.algorithm = algorithm
        self.tree = GrowingTree()
        self.trace = SelectionTrace()
        self._selected: set[int] = set()
        algorithm.reset()

    @property
    def selected(self) -> set[int]:
        return self._selected

    def reveal(self, parent: int = 0) -> int:
        v = self.tree.reveal(parent)
        added = frozenset(self.algorithm.on_reveal(self.tree, v, self._selected))
        for x in added:
            if not 1 <= x <= v:
                raise ContractViolation(f"{self.algorithm.name} selected unrevealed vertex {x} at v{v}")
        fresh = added - self._selected
        for x in fresh:
            self.trace.selected_at[x] = v
        self._selected |= fresh
        self.trace.additions.append(frozenset(fresh))
        # earlier vertices stay dominated: edges and selections only accumulate
        if v not in self._selected and (v == 1 or self.tree.parent(v) not in self._selected):
            raise ContractViolation(f"{self.algorithm.name} left v{v} undominated")
        return v


def run_online(algorithm: OnlineAlgorithm, tree: OnlineTree) -> SelectionTrace:
    run = OnlineRun(algorithm)
    for p in tree.parents:
        run.reveal(p)
    return run.trace
