"""Online tree inputs: the parent-pointer reveal sequence and queries on it.

Vertices are identified by reveal index, 1-based: ``v1`` is the first
revealed vertex.  An input is stored as ``parents`` where ``parents[i - 1]``
is the vertex ``v_i`` arrives at and ``parents[0] == 0`` marks ``v1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class InvalidInput(ValueError):
    """Raised when a parent array does not describe an online tree."""


class UnknownVertex(KeyError):
    pass


@dataclass(frozen=True)
class Violation:
    index: int
    reason: str

    def __str__(self) -> str:
        return f"v{self.index}: {self.reason}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(parents: Sequence[int]) -> ValidationReport:
    """Check every invariant of a reveal sequence; never raises."""
    violations: list[Violation] = []
    notes: list[str] = []
    n = len(parents)
    if n == 0:
        return ValidationReport((Violation(0, "empty input"),))
    if parents[0] not in (0, None):
        violations.append(Violation(1, "first vertex must carry the null marker 0"))
    for i in range(2, n + 1):
        p = parents[i - 1]
        if not isinstance(p, int) or isinstance(p, bool):
            violations.append(Violation(i, f"parent {p!r} is not an integer"))
        elif p < 1:
            violations.append(Violation(i, f"parent {p} is not a vertex"))
        elif p >= i:
            violations.append(Violation(i, f"parent v{p} not revealed before v{i}"))
    if n == 1 and not violations:
        notes.append("trivial size: n = 1, every ratio is 1")
    return ValidationReport(tuple(violations), tuple(notes))


@dataclass(frozen=True)
class OnlineTree:
    """An immutable online input plus lazily computed structure.

    ``origin`` optionally maps each vertex of this input to the vertex it came
    from when the input was derived by a split or a connection; it is carried
    for traceability only and never affects equality.
    """

    parents: tuple[int, ...]
    origin: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        parents = tuple(0 if p is None else p for p in self.parents)
        object.__setattr__(self, "parents", parents)
        report = validate(parents)
        if not report.ok:
            raise InvalidInput("; ".join(str(v) for v in report.violations))

    # -- construction -----------------------------------------------------

    @classmethod
    def from_parents(cls, parents: Iterable[int | None]) -> "OnlineTree":
        return cls(tuple(0 if p is None else int(p) for p in parents))

    @classmethod
    def from_json(cls, text: str) -> "OnlineTree":
        data = json.loads(text)
        if isinstance(data, Mapping):
            data = data["parents"]
        return cls.from_parents(data)

    def to_json(self) -> str:
        return json.dumps({"parents": list(self.parents)})

    # -- basic structure --------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.parents)

    @property
    def is_trivial(self) -> bool:
        return self.n == 1

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def parent(self, v: int) -> int:
        self._check(v)
        return self.parents[v - 1]

    def edges(self) -> list[tuple[int, int]]:
        """Arrival edges ``(v, u)``: ``u`` arrived at ``v``."""
        return [(self.parents[u - 1], u) for u in range(2, self.n + 1)]

    def edge_set(self) -> set[frozenset[int]]:
        return {frozenset(e) for e in self.edges()}

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u in range(2, self.n + 1):
            kids[self.parents[u - 1]].append(u)
        return tuple(tuple(k) for k in kids)

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for v, u in self.edges():
            adj[v].append(u)
            adj[u].append(v)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        """Final degrees; index 0 is unused."""
        return tuple(len(a) for a in self.neighbors)

    @cached_property
    def depths(self) -> tuple[int, ...]:
        d = [0] * (self.n + 1)
        for v in range(2, self.n + 1):
            d[v] = d[self.parents[v - 1]] + 1
        return tuple(d)

    def _check(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise UnknownVertex(f"v{v} is not a vertex of this {self.n}-vertex input")

    # -- queries ----------------------------------------------------------

    def degree(self, v: int) -> int:
        self._check(v)
        return self.degrees[v]

    def depth(self, v: int) -> int:
        """Length of the path from ``v1`` to ``v``."""
        self._check(v)
        return self.depths[v]

    def degree_at(self, v: int, t: int) -> int:
        """Degree of ``v`` immediately after ``v_t`` is revealed."""
        self._check(v)
        self._check(t)
        if v > t:
            raise ValueError(f"v{v} is revealed after v{t}")
        deg = sum(1 for c in self.children[v] if c <= t)
        return deg + (1 if v != 1 else 0)

    def descendants(self, v: int) -> set[int]:
        self._check(v)
        out: set[int] = set()
        stack = list(self.children[v])
        while stack:
            x = stack.pop()
            out.add(x)
            stack.extend(self.children[x])
        return out

    def subtree(self, v: int) -> set[int]:
        return self.descendants(v) | {v}

    def closed_neighborhood(self, v: int) -> set[int]:
        return set(self.neighbors[v]) | {v}

    def prefix(self, t: int) -> "OnlineTree":
        """The input truncated right after ``v_t`` is revealed."""
        self._check(t)
        return OnlineTree(self.parents[:t])


def is_dominating(tree: OnlineTree, chosen: Iterable[int]) -> bool:
    chosen = set(chosen)
    return all(v in chosen or any(w in chosen for w in tree.neighbors[v]) for v in tree.vertices())


def undominated(tree: OnlineTree, chosen: Iterable[int]) -> list[int]:
    chosen = set(chosen)
    return [v for v in tree.vertices() if v not in chosen and not any(w in chosen for w in tree.neighbors[v])]


def induced_input(tree: OnlineTree, keep: Iterable[int]) -> OnlineTree:
    """Restrict ``tree`` to ``keep`` (which must induce a subtree), preserving order.

    The first kept vertex becomes ``v1``; ``origin`` records old indices.
    """
    kept = sorted(set(keep))
    if not kept:
        raise InvalidInput("cannot restrict to an empty vertex set")
    new_id = {old: i + 1 for i, old in enumerate(kept)}
    parents = [0]
    for old in kept[1:]:
        p = tree.parents[old - 1]
        if p not in new_id:
            raise InvalidInput(f"v{old} loses its parent v{p} in the restriction")
        parents.append(new_id[p])
    return OnlineTree(tuple(parents), origin=tuple(kept))


def f1_split(tree: OnlineTree, u: int) -> OnlineTree:
    """Remove ``u`` and all of its descendants."""
    if u == 1:
        raise ValueError("f1 at v1 would leave an empty input")
    return induced_input(tree, set(tree.vertices()) - tree.subtree(u))


def f2_split(tree: OnlineTree, u: int) -> OnlineTree:
    """Keep only ``u`` and its descendants; ``u`` becomes ``v1``."""
    return induced_input(tree, tree.subtree(u))


def f3_connect(base: OnlineTree, v: int, attach: OnlineTree) -> OnlineTree:
    """Reveal all of ``base`` then all of ``attach``, whose first vertex arrives at ``v``.

    In ``origin`` the base vertices keep their indices and attached vertices
    are recorded as negatives of their index in ``attach``.
    """
    base._check(v)
    shift = base.n
    tail = [v] + [p + shift for p in attach.parents[1:]]
    origin = tuple(range(1, base.n + 1)) + tuple(-i for i in range(1, attach.n + 1))
    return OnlineTree(base.parents + tuple(tail), origin=origin)


def pendant(tree: OnlineTree, v: int) -> OnlineTree:
    """Attach one new leaf at ``v`` (``f3`` with a single-vertex input)."""
    return f3_connect(tree, v, OnlineTree((0,)))


def index_map(tree: OnlineTree) -> dict[int, int]:
    """old index -> new index for a derived input (positive origins only)."""
    if tree.origin is None:
        return {v: v for v in tree.vertices()}
    return {old: new for new, old in enumerate(tree.origin, start=1) if old > 0}


def rooted_shape_key(tree: OnlineTree) -> str:
    """Canonical string of the tree rooted at ``v1``, ignoring reveal order.

    Two inputs get the same key exactly when some relabelling maps one onto
    the other while keeping ``v1`` as the root.
    """
    code = [""] * (tree.n + 1)
    for v in range(tree.n, 0, -1):
        code[v] = "(" + "".join(sorted(code[c] for c in tree.children[v])) + ")"
    return code[1]
