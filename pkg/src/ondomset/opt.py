"""Exact offline minimum dominating sets on trees."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .tree import OnlineTree, is_dominating

INF = float("inf")

DEFAULT_BRUTE_CAP = 20
DEFAULT_ENUM_CAP = 14
DEFAULT_ENUM_LIMIT = 100_000


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    size: int
    witness: frozenset[int]
    all_optimal: tuple[frozenset[int], ...] | None = None


# DP states for a vertex x given its subtree:
#   SEL  x selected
#   COV  x not selected, dominated by a child
#   OPEN x not selected, not dominated by any child (parent must cover it)
SEL, COV, OPEN = 0, 1, 2


def _dp_tables(tree: OnlineTree) -> list[list[float]]:
    n = tree.n
    dp = [[0.0, 0.0, 0.0] for _ in range(n + 1)]
    # children always have larger indices than their parent
    for x in range(n, 0, -1):
        kids = tree.children[x]
        sel = 1.0
        open_ = 0.0
        base = 0.0
        extra = INF
        for c in kids:
            s, cov, op = dp[c]
            sel += min(s, cov, op)
            open_ += cov
            best = min(s, cov)
            base += best
            extra = min(extra, s - best)
        dp[x][SEL] = sel
        dp[x][OPEN] = open_
        dp[x][COV] = base + extra if kids else INF
    return dp


def min_dominating_set_tree(tree: OnlineTree) -> OptResult:
    """Three-state tree DP.  Ties prefer selecting the deeper vertex."""
    dp = _dp_tables(tree)
    root_state = COV if dp[1][COV] <= dp[1][SEL] else SEL
    size = int(min(dp[1][SEL], dp[1][COV]))
    chosen: set[int] = set()
    stack = [(1, root_state)]
    while stack:
        x, state = stack.pop()
        kids = tree.children[x]
        if state == SEL:
            chosen.add(x)
            for c in kids:
                s, cov, op = dp[c]
                best = min(s, cov, op)
                stack.append((c, SEL if s == best else (COV if cov == best else OPEN)))
        elif state == OPEN:
            stack.extend((c, COV) for c in kids)
        else:
            # pick the child forced into SEL: minimal penalty, deepest on ties
            forced, penalty = None, INF
            for c in kids:
                s, cov, _ = dp[c]
                d = s - min(s, cov)
                if d < penalty or (d == penalty and forced is not None and tree.depths[c] > tree.depths[forced]):
                    forced, penalty = c, d
            for c in kids:
                s, cov, _ = dp[c]
                if c == forced or s <= cov:
                    stack.append((c, SEL))
                else:
                    stack.append((c, COV))
    assert len(chosen) == size, (len(chosen), size)
    return OptResult(size, frozenset(chosen))


def opt_size(tree: OnlineTree) -> int:
    dp = _dp_tables(tree)
    return int(min(dp[1][SEL], dp[1][COV]))


def _closed_masks(tree: OnlineTree) -> list[int]:
    masks = []
    for v in tree.vertices():
        m = 1 << (v - 1)
        for w in tree.neighbors[v]:
            m |= 1 << (w - 1)
        masks.append(m)
    return masks


def _dominating_subsets(tree: OnlineTree, k: int, masks: list[int]):
    full = (1 << tree.n) - 1
    for combo in combinations(range(tree.n), k):
        m = 0
        for i in combo:
            m |= masks[i]
        if m == full:
            yield frozenset(i + 1 for i in combo)


def brute_force_min(tree: OnlineTree, cap: int = DEFAULT_BRUTE_CAP) -> OptResult:
    """Exhaustive search over subsets by increasing size."""
    if tree.n > cap:
        raise CapExceeded(f"brute force capped at n <= {cap}, got {tree.n}")
    masks = _closed_masks(tree)
    for k in range(1, tree.n + 1):
        for found in _dominating_subsets(tree, k, masks):
            return OptResult(k, found)
    raise AssertionError("a tree always has a dominating set")


def enumerate_optimal_sets(
    tree: OnlineTree, cap: int = DEFAULT_ENUM_CAP, limit: int = DEFAULT_ENUM_LIMIT
) -> list[frozenset[int]]:
    """All minimum dominating sets, in lexicographic order of sorted members."""
    if tree.n > cap:
        raise CapExceeded(f"optimal-set enumeration capped at n <= {cap}, got {tree.n}")
    k = opt_size(tree)
    out = []
    for s in _dominating_subsets(tree, k, _closed_masks(tree)):
        out.append(s)
        if len(out) > limit:
            raise CapExceeded(f"more than {limit} optimal sets")
    assert out and all(is_dominating(tree, s) for s in out)
    return out
