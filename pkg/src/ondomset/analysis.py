"""Executable form of the structural argument behind RA's 5/2 bound.

Three layers:

* edge and triplet predicates relative to a chosen optimal set, and the
  seven worst-case properties built from them;
* one-step input transformations that remove a property violation without
  lowering RA's ratio, plus a driver that chains them;
* the greedy block partition, its taxonomy and the counting identities and
  per-block cost bounds that close the argument.

Every ratio here is an exact ``Fraction``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algorithms import ra_mixture
from .opt import enumerate_optimal_sets, min_dominating_set_tree, opt_size
from .tree import OnlineTree, f1_split, f2_split, f3_connect, is_dominating, pendant

PROPERTIES = ("P1", "P2", "P3", "P4", "P5", "P6", "P7")
HALF = Fraction(1, 2)


class PreconditionError(ValueError):
    """The instance does not meet the hypotheses a transformation needs."""


class AlreadySatisfied(ValueError):
    """The instance already has the property a transformation targets."""


class UnclassifiedBlock(ValueError):
    pass


def ra_ratio(tree: OnlineTree) -> Fraction:
    """Exact E[C_RA] / C_OPT (a single vertex gives 1)."""
    return ra_mixture(tree).expected_cost / opt_size(tree)


# -- edges, triplets and properties -------------------------------------------


@dataclass(frozen=True)
class EdgeStatus:
    parent: int
    child: int
    free: bool
    fixed: bool


def _dominated_by(tree: OnlineTree, y: int, chosen: frozenset[int]) -> set[int]:
    return {x for x in tree.closed_neighborhood(y) if x in chosen}


def edge_status(tree: OnlineTree, optset: Iterable[int], edge: tuple[int, int]) -> EdgeStatus:
    """``edge`` is ``(v, u)`` with ``u`` arriving at ``v``."""
    v, u = edge
    if u < 2 or u > tree.n or tree.parent(u) != v:
        raise ValueError(f"({v}, {u}) is not an arrival edge")
    chosen = frozenset(optset)
    inside = tree.subtree(u)
    free = bool(_dominated_by(tree, u, chosen) & inside) and bool(_dominated_by(tree, v, chosen) - inside)
    fixed = False
    if free and v != 1 and tree.degree(u) >= 3:
        if tree.degree(v) == 3:
            fixed = True
        elif tree.degree(v) == 2:
            up = tree.parent(v)
            fixed = tree.degree(up) >= 3 and tree.degree_at(up, v) >= 3
    return EdgeStatus(v, u, free, fixed)


def edge_statuses(tree: OnlineTree, optset: Iterable[int]) -> list[EdgeStatus]:
    chosen = frozenset(optset)
    return [edge_status(tree, chosen, e) for e in tree.edges()]


@dataclass(frozen=True)
class SplitCheck:
    """A free edge ``(v, u)`` under ``optset`` and the two halves of it."""

    edge: tuple[int, int]
    optset: frozenset[int]
    upper: frozenset[int]
    lower: frozenset[int]
    upper_opt: int
    lower_opt: int

    @property
    def ok(self) -> bool:
        return len(self.upper) == self.upper_opt and len(self.lower) == self.lower_opt


def split_at_free_edge(tree: OnlineTree, optset: Iterable[int], edge: tuple[int, int]) -> SplitCheck:
    """Cut ``optset`` along a free edge into sets for ``f1(tree, u)`` and
    ``f2(tree, u)`` (in their own indices).  Both halves dominate their part;
    ``ok`` says whether both are also optimal there, so their union is the
    optimal ``optset``."""
    chosen = frozenset(optset)
    if not edge_status(tree, chosen, edge).free:
        raise PreconditionError(f"{edge} is not free under {sorted(chosen)}")
    u = edge[1]
    top, bottom = f1_split(tree, u), f2_split(tree, u)
    halves = []
    for part in (top, bottom):
        local = frozenset(new for new, old in enumerate(part.origin, start=1) if old in chosen)
        if not is_dominating(part, local):
            raise AssertionError(f"restriction of {sorted(chosen)} misses part of the split at {edge}")
        halves.append(local)
    return SplitCheck(tuple(edge), chosen, halves[0], halves[1], opt_size(top), opt_size(bottom))


def pendant_keeps_optimum(tree: OnlineTree, optset: Iterable[int], v: int) -> bool:
    """``optset`` selects ``v`` and stays optimal after a leaf arrives at ``v``."""
    chosen = frozenset(optset)
    if v not in chosen:
        raise PreconditionError(f"v{v} is not selected by {sorted(chosen)}")
    grown = pendant(tree, v)
    return is_dominating(grown, chosen) and opt_size(grown) == len(chosen)


def good_triplets(tree: OnlineTree, optset: Iterable[int]) -> list[tuple[int, int, int]]:
    """Paths ``u1 - u2 - u3`` (``u1 < u3``) of degree-3 vertices with both ends chosen."""
    chosen = frozenset(optset)
    out = []
    for mid in tree.vertices():
        if tree.degree(mid) != 3:
            continue
        ends = [w for w in tree.neighbors[mid] if w in chosen and tree.degree(w) == 3]
        for i, a in enumerate(ends):
            for b in ends[i + 1 :]:
                out.append((min(a, b), mid, max(a, b)))
    return sorted(out)


@dataclass(frozen=True)
class PropertyCheck:
    optset: frozenset[int]
    holds: dict[str, bool]
    witnesses: dict[str, tuple]

    @property
    def all_hold(self) -> bool:
        return all(self.holds.values())


@dataclass(frozen=True)
class PropertyReport:
    per_set: tuple[PropertyCheck, ...]

    def exists(self, prop: str) -> bool:
        return any(c.holds[prop] for c in self.per_set)

    def forall(self, prop: str) -> bool:
        return all(c.holds[prop] for c in self.per_set)

    @property
    def summary(self) -> dict[str, dict[str, bool]]:
        return {p: {"exists": self.exists(p), "forall": self.forall(p)} for p in PROPERTIES}


def property_witnesses(tree: OnlineTree, optset: Iterable[int]) -> dict[str, tuple]:
    """Violations of each property for one optimal set (empty tuple = holds)."""
    chosen = frozenset(optset)
    statuses = edge_statuses(tree, chosen)
    deg = tree.degrees
    return {
        "P1": tuple((s.parent, s.child) for s in statuses if s.free and not s.fixed),
        "P2": tuple(v for v in tree.vertices() if deg[v] > 3),
        "P3": tuple(sorted(v for v in chosen if deg[v] != 3)),
        "P4": tuple((s.parent, s.child) for s in statuses if s.free and s.parent in chosen),
        "P5": tuple(good_triplets(tree, chosen)),
        "P6": tuple((s.parent, s.child) for s in statuses if s.free and deg[s.parent] == 2),
        "P7": tuple(v for v in tree.vertices() if deg[v] not in (1, 3)),
    }


def check_properties(tree: OnlineTree, optsets: Sequence[Iterable[int]]) -> PropertyReport:
    if not optsets:
        raise ValueError("need at least one optimal set")
    checks = []
    for s in optsets:
        w = property_witnesses(tree, s)
        checks.append(PropertyCheck(frozenset(s), {p: not w[p] for p in PROPERTIES}, w))
    return PropertyReport(tuple(checks))


# measure each transformation strictly decreases
def violation_measure(tree: OnlineTree, optset: Iterable[int], target: str) -> int:
    if target == "P2":
        return sum(max(0, d - 3) for d in tree.degrees[1:])
    return len(property_witnesses(tree, optset)[target])


# -- transformations -----------------------------------------------------------


@dataclass(frozen=True)
class Derived:
    """A derived input and, per vertex, the source vertex it copies
    (``None`` for fresh pendants)."""

    tree: OnlineTree
    source: tuple[int | None, ...]

    def image(self, chosen: Iterable[int]) -> frozenset[int]:
        chosen = set(chosen)
        return frozenset(i for i, s in enumerate(self.source, start=1) if s in chosen)

    def local(self, original: int) -> int:
        return self.source.index(original) + 1


def _whole(tree: OnlineTree) -> Derived:
    return Derived(tree, tuple(tree.vertices()))


def _cut_below(d: Derived, u: int) -> Derived:
    """``f1`` on a derived input, with ``u`` given in original ids."""
    t = f1_split(d.tree, d.local(u))
    return Derived(t, tuple(d.source[o - 1] for o in t.origin))


def _keep_below(d: Derived, u: int) -> Derived:
    t = f2_split(d.tree, d.local(u))
    return Derived(t, tuple(d.source[o - 1] for o in t.origin))


def _graft(base: Derived, v: int, attach: Derived) -> Derived:
    t = f3_connect(base.tree, base.local(v), attach.tree)
    return Derived(t, base.source + attach.source)


def _add_leaf(d: Derived, v: int) -> Derived:
    t = pendant(d.tree, d.local(v))
    return Derived(t, d.source + (None,))


@dataclass
class StepResult:
    target: str
    source_ratio: Fraction
    derived: list[Derived]
    ratios: list[Fraction]
    optsets: list[frozenset[int]]
    image_optimal: list[bool]
    note: str = ""
    details: dict = field(default_factory=dict)

    @property
    def inputs(self) -> list[OnlineTree]:
        return [d.tree for d in self.derived]

    @property
    def best(self) -> int:
        return max(range(len(self.ratios)), key=lambda i: self.ratios[i])

    @property
    def monotone(self) -> bool:
        return max(self.ratios) >= self.source_ratio


_HYPOTHESES = {
    "P1": (),
    "P2": ("P1",),
    "P3": ("P1", "P2"),
    "P4": ("P1", "P2", "P3"),
    "P5": ("P1", "P2", "P3", "P4"),
    "P6": ("P1", "P2", "P3", "P4", "P5"),
}


def _finish(target: str, tree: OnlineTree, chosen: frozenset[int], derived: list[Derived], note: str, **details) -> StepResult:
    ratios, sets, clean = [], [], []
    for d in derived:
        ratios.append(ra_ratio(d.tree))
        img = d.image(chosen)
        ok = is_dominating(d.tree, img) and len(img) == opt_size(d.tree)
        sets.append(img if ok else min_dominating_set_tree(d.tree).witness)
        clean.append(ok)
    return StepResult(target, ra_ratio(tree), derived, ratios, sets, clean, note, details)


def normalize_step(tree: OnlineTree, optset: Iterable[int], target: str, strict: bool = True) -> StepResult:
    """Apply one transformation that repairs a violation of ``target``.

    ``optset`` must be an optimal set of ``tree``; with ``strict`` the
    properties the transformation assumes are checked first.
    """
    target = target.upper()
    if target not in _HYPOTHESES:
        raise ValueError(f"no transformation for {target}")
    chosen = frozenset(optset)
    if not is_dominating(tree, chosen) or len(chosen) != opt_size(tree):
        raise PreconditionError("the given set is not an optimal dominating set")
    w = property_witnesses(tree, chosen)
    if not w[target]:
        raise AlreadySatisfied(f"{target} already holds")
    if strict:
        missing = [p for p in _HYPOTHESES[target] if w[p]]
        if missing:
            raise PreconditionError(f"{target} transformation assumes {', '.join(missing)}")
    return _STEPS[target](tree, chosen, w)


def _step_p1(tree, chosen, w):
    v, u = min(w["P1"], key=lambda e: e[1])
    whole = _whole(tree)
    return _finish("P1", tree, chosen, [_cut_below(whole, u), _keep_below(whole, u)], f"split at ({v}, {u})", edge=(v, u))


def _p2_candidates(tree: OnlineTree) -> list[tuple[int, int]]:
    """Edges (v, u) with deg(v) >= 4, u the last arrival at v and no vertex
    of degree above three in u's subtree."""
    out = []
    for v in tree.vertices():
        if tree.degree(v) < 4:
            continue
        u = tree.children[v][-1]
        if all(tree.degree(x) <= 3 for x in tree.subtree(u)):
            out.append((v, u))
    return out


def _p2_graft(tree: OnlineTree, chosen: frozenset[int], v: int, u: int):
    """Derived input for one candidate edge, or the reason it has none."""
    if not (v in chosen and u not in chosen and not (set(tree.children[u]) & chosen)):
        return f"edge ({v}, {u}) is not dominated through v alone"
    inside = tree.subtree(u)
    picked = sorted(x for x in tree.descendants(v) - inside if x in chosen)
    low = [x for x in picked if tree.degree(x) <= 2]
    whole = _whole(tree)
    below = _keep_below(whole, u)
    above = _cut_below(whole, u)
    if low:
        anchor = low[0]
        return [_graft(above, anchor, below)], dict(case="2-2", edge=(v, u), anchor=anchor)
    for vp in picked:
        kids = tree.children[vp]
        if tree.degree(vp) != 3 or not kids:
            continue
        up = kids[-1]
        if tree.degree(up) == 1 and tree.degree_at(vp, up) == 3:
            trimmed = _cut_below(above, up)
            return [_graft(trimmed, vp, below)], dict(case="2-1", edge=(v, u), anchor=vp, dropped=up)
    return f"no selected vertex below v{v} ends in a late leaf to swap out"


def _step_p2(tree, chosen, w):
    reasons = []
    for v, u in _p2_candidates(tree):
        got = _p2_graft(tree, chosen, v, u)
        if isinstance(got, str):
            reasons.append(got)
            continue
        derived, details = got
        return _finish("P2", tree, chosen, derived, f"move the subtree at v{u} to v{details['anchor']}", **details)
    raise PreconditionError("; ".join(reasons) or "no high-degree vertex whose last arrival has a low-degree subtree")


def _step_p3(tree, chosen, w):
    v = w["P3"][0]
    deg = tree.degree(v)
    if deg > 3:
        raise PreconditionError(f"selected v{v} has degree {deg} > 3")
    d = _whole(tree)
    for _ in range(3 - deg):
        d = _add_leaf(d, v)
    return _finish("P3", tree, chosen, [d], f"{3 - deg} pendant(s) at v{v}", vertex=v)


def _step_p4(tree, chosen, w):
    v, u = min(w["P4"], key=lambda e: e[1])
    whole = _whole(tree)
    top = _add_leaf(_cut_below(whole, u), v)
    bottom = _keep_below(whole, u)
    if u in chosen:
        bottom = _add_leaf(bottom, u)
    return _finish("P4", tree, chosen, [top, bottom], f"split at ({v}, {u}) and pad", edge=(v, u))


def _step_p5(tree, chosen, w):
    u1, u2, u3 = w["P5"][0]
    if not u2 < u1:
        raise PreconditionError(f"middle v{u2} of the triplet is revealed after v{u1}")
    if u2 == 1:
        raise PreconditionError("the triplet's middle is the first vertex; nothing lies above it")
    whole = _whole(tree)
    middle = _keep_below(whole, u2)
    parts = [_cut_below(whole, u2), _cut_below(middle, u3), _cut_below(middle, u1)]
    return _finish("P5", tree, chosen, parts, f"three-way split around ({u1}, {u2}, {u3})", triplet=(u1, u2, u3))


def _step_p6(tree, chosen, w):
    cands = set(w["P6"])
    pick = None
    for v, u in sorted(cands, key=lambda e: e[1]):
        below = tree.descendants(v)
        if not any(a in below for a, _ in cands):
            pick = (v, u)
            break
    if pick is None:
        raise PreconditionError("no lowest degree-2 free edge")
    v, u = pick
    whole = _whole(tree)
    cut = _cut_below(whole, u)
    base_ratio = ra_ratio(tree)
    if ra_ratio(cut.tree) >= base_ratio:
        return _finish("P6", tree, chosen, [cut], f"drop the subtree at v{u}", edge=pick, branch="cut")
    copy = _keep_below(whole, u)
    return _finish("P6", tree, chosen, [_graft(whole, v, copy)], f"duplicate the subtree at v{u} under v{v}", edge=pick, branch="duplicate")


_STEPS = {"P1": _step_p1, "P2": _step_p2, "P3": _step_p3, "P4": _step_p4, "P5": _step_p5, "P6": _step_p6}

NORMALIZE_ORDER = ("P1", "P2", "P1", "P3", "P4", "P5", "P6")


@dataclass
class NormalizeResult:
    tree: OnlineTree
    optset: frozenset[int]
    history: list[tuple[str, Fraction, Fraction]]
    stopped: str

    @property
    def ratio(self) -> Fraction:
        return ra_ratio(self.tree)


def normalize(tree: OnlineTree, optset: Iterable[int] | None = None, max_steps: int = 200) -> NormalizeResult:
    """Run the transformations in dependency order, always following the
    derived input with the highest ratio."""
    chosen = frozenset(optset) if optset is not None else min_dominating_set_tree(tree).witness
    history: list[tuple[str, Fraction, Fraction]] = []
    steps = 0
    for target in NORMALIZE_ORDER:
        while True:
            if steps >= max_steps:
                return NormalizeResult(tree, chosen, history, "step cap reached")
            try:
                res = normalize_step(tree, chosen, target)
            except AlreadySatisfied:
                break
            except PreconditionError as exc:
                return NormalizeResult(tree, chosen, history, f"{target}: {exc}")
            i = res.best
            history.append((target, res.source_ratio, res.ratios[i]))
            tree, chosen = res.inputs[i], res.optsets[i]
            steps += 1
    return NormalizeResult(tree, chosen, history, "done")


# -- blocks --------------------------------------------------------------------


@dataclass(frozen=True)
class Block:
    ident: int
    members: tuple[int, ...]  # in assignment order
    kind: str  # B1, B2, B3, B4 or unclassified
    path: tuple[int, ...]  # (u1, u2, u3) ordered per the taxonomy, or (u1,)

    @property
    def has_first(self) -> bool:
        return 1 in self.members


@dataclass(frozen=True)
class BlockAssignment:
    tree: OnlineTree
    block_of: tuple[int, ...]  # index 0 unused
    blocks: tuple[Block, ...]


def _orient(tree: OnlineTree, members: Sequence[int]) -> tuple[str, tuple[int, ...]]:
    deg = tree.degrees
    if len(members) == 1:
        (x,) = members
        return ("B1", (x,)) if deg[x] == 1 else ("unclassified", (x,))
    if len(members) != 3:
        return "unclassified", tuple(members)
    mids = [x for x in members if all(y == x or y in tree.neighbors[x] for y in members)]
    if not mids:
        return "unclassified", tuple(members)
    mid = mids[0]
    ends = sorted((x for x in members if x != mid), key=lambda x: (-deg[x], x))
    pattern = (deg[ends[0]], deg[mid], deg[ends[1]])
    kind = {(3, 3, 1): "B2", (1, 3, 1): "B3", (3, 3, 3): "B4"}.get(pattern, "unclassified")
    if kind == "B3":
        ends.sort()
    return kind, (ends[0], mid, ends[1])


def block_routine(tree: OnlineTree) -> BlockAssignment:
    """Greedy grouping by reveal index: the first free vertex, its first free
    neighbour, then the first free neighbour of either."""
    free = set(tree.vertices())
    block_of = [0] * (tree.n + 1)
    groups: list[list[int]] = []
    while free:
        ident = len(groups) + 1
        first = min(free)
        free.discard(first)
        group = [first]
        nb = [x for x in tree.neighbors[first] if x in free]
        if nb:
            second = min(nb)
            free.discard(second)
            group.append(second)
            nb = [x for x in set(tree.neighbors[first]) | set(tree.neighbors[second]) if x in free]
            if nb:
                third = min(nb)
                free.discard(third)
                group.append(third)
        for x in group:
            block_of[x] = ident
        groups.append(group)
    blocks = []
    for i, g in enumerate(groups, start=1):
        kind, path = _orient(tree, g)
        blocks.append(Block(i, tuple(g), kind, path))
    return BlockAssignment(tree, tuple(block_of), tuple(blocks))


ALLOWED_SUBKINDS = {"B1^0", "B2^010", "B3^010", "B4^000", "B4^100", "B4^010"}


def block_subkind(tree: OnlineTree, block: Block, optset: frozenset[int]) -> str:
    """Taxonomy label such as ``B4^100``; end order is normalised so that
    a single selected end of a B4-block reads as ``100``."""
    if block.kind == "B1":
        return f"B1^{int(block.path[0] in optset)}"
    a, m, b = (int(x in optset) for x in block.path)
    if block.kind == "B4" and b and not a:
        a, b = b, a
    return f"{block.kind}^{a}{m}{b}"


def leaf_block_rank(tree: OnlineTree, leaf: int) -> str:
    """``B1,0`` when the leaf was its neighbour's third edge, else ``B1,1``."""
    (u,) = tree.neighbors[leaf]
    return "B1,0" if leaf > u and tree.degree_at(u, leaf) == 3 else "B1,1"


@dataclass(frozen=True)
class BlockCounts:
    b10: int = 0
    b11: int = 0
    b2: int = 0
    b3: int = 0
    b4: int = 0
    b4_000: int = 0
    b4_100: int = 0
    b4_010: int = 0
    forbidden: tuple[str, ...] = ()
    subkinds: tuple[tuple[str, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "b10": self.b10,
            "b11": self.b11,
            "b2": self.b2,
            "b3": self.b3,
            "b4": self.b4,
            "b4_000": self.b4_000,
            "b4_100": self.b4_100,
            "b4_010": self.b4_010,
            "forbidden": list(self.forbidden),
            "subkinds": dict(self.subkinds),
        }


def classify_blocks(assignment: BlockAssignment, optset: Iterable[int]) -> BlockCounts:
    tree = assignment.tree
    chosen = frozenset(optset)
    bad = [v for v in tree.vertices() if tree.degree(v) not in (1, 3)]
    if bad:
        raise UnclassifiedBlock(f"degrees outside {{1, 3}} at {bad}")
    c = Counter()
    sub = Counter()
    forbidden = []
    for blk in assignment.blocks:
        if blk.kind == "unclassified":
            raise UnclassifiedBlock(f"block {blk.ident} {blk.members} fits no block kind")
        label = block_subkind(tree, blk, chosen)
        sub[label] += 1
        if label not in ALLOWED_SUBKINDS:
            forbidden.append(f"{label}@{blk.ident}")
        if blk.kind == "B1":
            c["b10" if leaf_block_rank(tree, blk.path[0]) == "B1,0" else "b11"] += 1
        elif blk.kind == "B2":
            c["b2"] += 1
        elif blk.kind == "B3":
            c["b3"] += 1
        else:
            c["b4"] += 1
            if label in ("B4^000", "B4^100", "B4^010"):
                c["b4_" + label[3:]] += 1
    return BlockCounts(**c, forbidden=tuple(forbidden), subkinds=tuple(sorted(sub.items())))


@dataclass(frozen=True)
class IdentityReport:
    leaf_identity: bool
    leaf_lhs: int
    leaf_rhs: int
    b10_bound: bool | None
    b11_bound: bool | None

    @property
    def ok(self) -> bool:
        return self.leaf_identity and self.b10_bound is not False and self.b11_bound is not False


def check_counting_identities(counts: BlockCounts, n: int | None = None) -> IdentityReport:
    """Leaf-block identity always; the two leaf-block bounds only when the
    tree has at least five vertices (pass ``n=None`` to force them)."""
    lhs = counts.b10 + counts.b11 + counts.b3
    rhs = counts.b2 + 3 * counts.b4 + 2
    b10 = b11 = None
    if n is None or n >= 5:
        b10 = counts.b10 <= counts.b2 + counts.b4_100 + counts.b4_010
        b11 = counts.b11 <= counts.b4_100
    return IdentityReport(lhs == rhs, lhs, rhs, b10, b11)


# blocks without v1 / with v1
BLOCK_BOUNDS = {"B1,0": Fraction(0), "B1,1": HALF, "B2": Fraction(5, 2), "B3": Fraction(3, 2), "B4": Fraction(3)}
FIRST_BLOCK_BOUNDS = {"B2": Fraction(3), "B3": Fraction(5, 2), "B4": Fraction(3)}


@dataclass(frozen=True)
class BlockCost:
    ident: int
    kind: str
    has_first: bool
    cost: Fraction
    bound: Fraction
    exact_bound: bool  # single-vertex blocks have an exact value, not a bound

    @property
    def ok(self) -> bool:
        return self.cost == self.bound if self.exact_bound else self.cost <= self.bound


def block_cost_audit(tree: OnlineTree, assignment: BlockAssignment) -> list[BlockCost]:
    mix = ra_mixture(tree)
    out = []
    for blk in assignment.blocks:
        if blk.kind == "unclassified":
            raise UnclassifiedBlock(f"block {blk.ident} {blk.members} fits no block kind")
        cost = sum((mix.probability(v) for v in blk.members), Fraction(0))
        if blk.kind == "B1":
            kind = leaf_block_rank(tree, blk.path[0])
            bound, exact = BLOCK_BOUNDS[kind], True
        else:
            kind = blk.kind
            bound, exact = (FIRST_BLOCK_BOUNDS if blk.has_first else BLOCK_BOUNDS)[kind], False
        out.append(BlockCost(blk.ident, kind, blk.has_first, cost, bound, exact))
    return out


def final_bound_value(counts: BlockCounts) -> Fraction:
    """The last expression of the substitution chain."""
    b10, b2, b4, b4_010 = counts.b10, counts.b2, counts.b4, counts.b4_010
    num = -b10 + 2 * b2 + 3 * b4 + Fraction(2, 5) * b4_010 + Fraction(8, 5)
    den = -b10 + 2 * b2 + 3 * b4 + b4_010 + 2
    return Fraction(5, 2) * num / den


@dataclass(frozen=True)
class BoundChain:
    block_estimate: Fraction
    relaxed_estimate: Fraction
    after_leaf_identity: Fraction
    after_b11: Fraction
    after_b10: Fraction
    final: Fraction

    @property
    def steps(self) -> tuple[Fraction, ...]:
        return (self.block_estimate, self.relaxed_estimate, self.after_leaf_identity, self.after_b11, self.after_b10, self.final)


def theorem2_bound_chain(counts: BlockCounts, first_b2: int = 0, first_b3: int = 0, check: bool = True) -> BoundChain:
    """Evaluate each step of the chain that turns block counts into a bound
    below 5/2.  With ``check`` the counts must satisfy the identities and
    every step must be no smaller than the one before it."""
    if first_b2 not in (0, 1) or first_b3 not in (0, 1) or first_b2 + first_b3 > 1:
        raise ValueError("at most one of the first-vertex block flags can be set")
    if check:
        rep = check_counting_identities(counts)
        if not rep.ok:
            raise ValueError(f"counts violate the block identities: {rep}")
    b10, b11, b2, b3, b4 = counts.b10, counts.b11, counts.b2, counts.b3, counts.b4
    b100, b010 = counts.b4_100, counts.b4_010
    F = Fraction
    opt_part = b2 + b3 + b100 + b010
    first = (F(b11, 2) + F(5 * b2, 2) + F(3 * b3, 2) + 3 * b4 + F(first_b2, 2) + first_b3) / opt_part
    relaxed = (F(b11, 2) + F(5 * b2, 2) + F(3 * b3, 2) + 3 * b4 + 1) / opt_part
    sub_leaf = (F(-3 * b10, 2) - b11 + 4 * b2 + F(15 * b4, 2) + 4) / (-b10 - b11 + 2 * b2 + 3 * b4 + b100 + b010 + 2)
    sub_b11 = (F(-3 * b10, 2) + 4 * b2 + F(15 * b4, 2) - b100 + 4) / (-b10 + 2 * b2 + 3 * b4 + b010 + 2)
    sub_b10 = (F(-5 * b10, 2) + 5 * b2 + F(15 * b4, 2) + b010 + 4) / (-b10 + 2 * b2 + 3 * b4 + b010 + 2)
    final = final_bound_value(counts)
    chain = BoundChain(first, relaxed, sub_leaf, sub_b11, sub_b10, final)
    if check:
        s = chain.steps
        if not all(s[i] <= s[i + 1] for i in range(1, len(s) - 1)) or first > relaxed:
            raise AssertionError(f"bound chain is not monotone: {[str(x) for x in s]}")
        if sub_b10 != final:
            raise AssertionError("last two forms of the bound disagree")
        if not final < F(5, 2):
            raise AssertionError(f"final bound {final} is not below 5/2")
    return chain


def first_block_flags(assignment: BlockAssignment) -> tuple[int, int]:
    blk = assignment.blocks[assignment.block_of[1] - 1]
    return int(blk.kind == "B2"), int(blk.kind == "B3")


@dataclass(frozen=True)
class InstanceAudit:
    counts: BlockCounts
    identities: IdentityReport
    costs: tuple[BlockCost, ...]
    chain: BoundChain | None
    measured: Fraction
    measured_within_estimate: bool | None

    @property
    def ok(self) -> bool:
        return self.identities.ok and all(c.ok for c in self.costs) and self.measured_within_estimate is not False


def audit_instance(tree: OnlineTree, optset: Iterable[int] | None = None) -> InstanceAudit:
    """Blocks, identities, per-block costs and, when the optimal set fits the
    taxonomy, the bound chain against the measured ratio."""
    chosen = frozenset(optset) if optset is not None else min_dominating_set_tree(tree).witness
    assignment = block_routine(tree)
    counts = classify_blocks(assignment, chosen)
    ident = check_counting_identities(counts, tree.n)
    costs = tuple(block_cost_audit(tree, assignment))
    measured = ra_ratio(tree)
    chain = None
    within = None
    if tree.n >= 5 and not counts.forbidden and ident.ok:
        fb2, fb3 = first_block_flags(assignment)
        chain = theorem2_bound_chain(counts, fb2, fb3)
        within = measured <= chain.block_estimate
    return InstanceAudit(counts, ident, costs, chain, measured, within)


def all_optimal_property_report(tree: OnlineTree) -> PropertyReport:
    return check_properties(tree, enumerate_optimal_sets(tree))


# selection patterns along ``Block.path`` that stay inside the taxonomy
_ALLOWED_PATTERNS = {
    "B1": ((0,),),
    "B2": ((0, 1, 0),),
    "B3": ((0, 1, 0),),
    "B4": ((0, 0, 0), (1, 0, 0), (0, 0, 1), (0, 1, 0)),
}
_INF = float("inf")


def taxonomy_optimal_set(tree: OnlineTree, assignment: BlockAssignment | None = None) -> frozenset[int] | None:
    """Smallest dominating set whose every block pattern is allowed, or
    ``None`` if there is none.  It is an optimal set fitting the taxonomy
    exactly when its size equals the optimum.

    Dynamic programme over the tree of blocks: blocks are connected, so
    contracting them leaves a tree in which each child block hangs off its
    parent block by a single edge.
    """
    assignment = assignment or block_routine(tree)
    blocks = assignment.blocks
    if any(b.kind not in _ALLOWED_PATTERNS for b in blocks):
        return None
    block_of = assignment.block_of
    # root the block tree at v1's block; the link of a child block is the
    # tree edge (x in parent block, y in child block)
    root = block_of[1]
    link: dict[int, tuple[int, int]] = {}
    kids: dict[int, list[int]] = {b.ident: [] for b in blocks}
    order = [root]
    seen = {root}
    for bid in order:
        for x in blocks[bid - 1].members:
            for y in tree.neighbors[x]:
                c = block_of[y]
                if c not in seen:
                    seen.add(c)
                    link[c] = (x, y)
                    kids[bid].append(c)
                    order.append(c)

    # table[c][(x_sel, need_x)] = (cost, choice) where x is the parent-side
    # endpoint: x_sel says whether x is selected, need_x whether x still
    # needs this child to dominate it
    table: dict[int, dict[tuple[int, int], tuple[float, tuple]]] = {}

    def solve(bid: int, outside: dict[int, int]) -> dict[tuple, tuple[float, tuple]]:
        # outside[v] = 1 if v is selected by the parent block (v = the link y)
        blk = blocks[bid - 1]
        best: dict[tuple, tuple[float, tuple]] = {}
        for pat in _ALLOWED_PATTERNS[blk.kind]:
            sel = {v for v, s in zip(blk.path, pat) if s}
            cost = len(sel)
            covered = {v for v in blk.members if v in sel or any(w in sel for w in tree.neighbors[v] if block_of[w] == bid)}
            covered |= {v for v, s in outside.items() if s}
            picks = []
            dominators: set[int] = set()
            ok = True
            for c in kids[bid]:
                x, y = link[c]
                xs = int(x in sel)
                # cheaper of: child need not dominate x / child dominates x
                free_cost, free_pick = table[c][(xs, 0)]
                dom_cost, dom_pick = table[c][(xs, 1)]
                picks.append((c, xs, free_cost, free_pick, dom_cost, dom_pick, x))
            # x vertices still needing a child: choose per x the cheapest child
            # to dominate it, others take their free option
            need = {v for v in blk.members if v not in covered}
            chosen = {}
            for c, xs, fc, fp, dc, dp, x in picks:
                chosen[c] = (fc, (c, xs, 0))
            for v in need:
                opts = [(dc - fc, c) for c, xs, fc, fp, dc, dp, x in picks if x == v and dc < _INF]
                if not opts:
                    ok = False
                    break
                delta, c = min(opts)
                xs = int(v in sel)
                chosen[c] = (table[c][(xs, 1)][0], (c, xs, 1))
            if not ok:
                continue
            total = cost + sum(v[0] for v in chosen.values())
            key = tuple(sorted(sel))
            if total < best.get(key, (_INF,))[0]:
                best[key] = (total, (pat, tuple(v[1] for v in chosen.values())))
        return best

    for bid in reversed(order):
        if bid == root:
            break
        x, y = link[bid]
        entry: dict[tuple[int, int], tuple[float, tuple]] = {}
        for xs in (0, 1):
            res = solve(bid, {y: xs})
            for need_x in (0, 1):
                cands = [(cost, key, ch) for key, (cost, ch) in res.items() if not need_x or y in key]
                entry[(xs, need_x)] = min(cands, key=lambda t: (t[0], t[1]))[0::2] if cands else (_INF, ())
        table[bid] = entry
    res = solve(root, {})
    if not res:
        return None
    cost, (pat, chosen) = min(res.values(), key=lambda t: t[0])
    if cost == _INF:
        return None

    picked: set[int] = set()

    def emit(bid: int, pat: tuple, chosen: tuple) -> None:
        blk = blocks[bid - 1]
        picked.update(v for v, s in zip(blk.path, pat) if s)
        for c, xs, need_x in chosen:
            _, (cpat, cchosen) = table[c][(xs, need_x)]
            emit(c, cpat, cchosen)

    emit(root, pat, chosen)
    out = frozenset(picked)
    if not is_dominating(tree, out) or len(out) != cost:
        raise AssertionError("block-pattern programme returned an inconsistent set")
    return out
