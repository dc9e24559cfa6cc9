import json

import pytest
from hypothesis import given

from ondomset.tree import (
    InvalidInput,
    OnlineTree,
    f1_split,
    f2_split,
    f3_connect,
    index_map,
    pendant,
    validate,
)
from strategies import online_trees, tree_and_vertex

STAR = OnlineTree((0, 1, 2, 2))
CHAIN4 = OnlineTree((0, 1, 2, 3))


class TestValidate:
    def test_star_is_valid(self):
        assert validate([0, 1, 2, 2]).ok

    def test_forward_reference_names_index(self):
        report = validate([0, 3, 1])
        assert not report.ok
        assert [v.index for v in report.violations] == [2]

    def test_single_vertex_is_flagged_trivial(self):
        report = validate([0])
        assert report.ok
        assert any("trivial" in note for note in report.notes)

    @pytest.mark.parametrize("bad", [[], [1], [0, 0], [0, 1, "x"], [0, 1, 3]])
    def test_rejections(self, bad):
        assert not validate(bad).ok

    def test_constructor_rejects(self):
        with pytest.raises(InvalidInput):
            OnlineTree((0, 3, 1))

    def test_null_marker_accepted(self):
        assert OnlineTree.from_parents([None, 1, 2, 2]) == STAR


def test_json_round_trip():
    assert OnlineTree.from_json(STAR.to_json()) == STAR
    assert json.loads(STAR.to_json()) == {"parents": [0, 1, 2, 2]}
    assert OnlineTree.from_json("[0, 1, 1]").parents == (0, 1, 1)


@pytest.mark.parametrize("tree,v,expected", [(CHAIN4, 1, 0), (CHAIN4, 3, 2), (STAR, 4, 2)])
def test_depth(tree, v, expected):
    assert tree.depth(v) == expected


def test_unknown_vertex():
    with pytest.raises(KeyError):
        STAR.depth(9)


@pytest.mark.parametrize("v,t,expected", [(2, 3, 2), (2, 4, 3), (1, 2, 1)])
def test_degree_at(v, t, expected):
    assert STAR.degree_at(v, t) == expected


def test_degree_at_before_reveal():
    with pytest.raises(ValueError):
        STAR.degree_at(4, 3)


@pytest.mark.parametrize("v,expected", [(2, {3, 4}), (4, set()), (1, {2, 3, 4})])
def test_descendants(v, expected):
    assert STAR.descendants(v) == expected


class TestSplits:
    @pytest.mark.parametrize(
        "tree,u,expected",
        [(STAR, 2, (0,)), (CHAIN4, 3, (0, 1)), (STAR, 4, (0, 1, 2))],
    )
    def test_f1(self, tree, u, expected):
        assert f1_split(tree, u).parents == expected

    def test_f1_rejects_first_vertex(self):
        with pytest.raises(ValueError):
            f1_split(STAR, 1)

    @pytest.mark.parametrize(
        "tree,u,expected",
        [(STAR, 2, (0, 1, 1)), (STAR, 1, (0, 1, 2, 2)), (CHAIN4, 4, (0,))],
    )
    def test_f2(self, tree, u, expected):
        assert f2_split(tree, u).parents == expected

    def test_f2_records_old_indices(self):
        assert f2_split(STAR, 2).origin == (2, 3, 4)
        assert index_map(f2_split(STAR, 2)) == {2: 1, 3: 2, 4: 3}

    @pytest.mark.parametrize(
        "base,v,attach,expected",
        [((0,), 1, (0,), (0, 1)), ((0, 1), 2, (0, 1), (0, 1, 2, 3))],
    )
    def test_f3(self, base, v, attach, expected):
        assert f3_connect(OnlineTree(base), v, OnlineTree(attach)).parents == expected

    def test_f3_unknown_vertex(self):
        with pytest.raises(KeyError):
            f3_connect(STAR, 7, OnlineTree((0,)))

    def test_pendant(self):
        assert pendant(STAR, 4).parents == (0, 1, 2, 2, 4)


def _edges(tree, label=lambda v: v):
    return {frozenset((label(a), label(b))) for a, b in tree.edges()}


@given(tree_and_vertex(min_n=2))
def test_split_partition_and_reconnect(tv):
    tree, u = tv
    if u == 1:
        return
    top, bottom = f1_split(tree, u), f2_split(tree, u)
    assert set(top.origin).isdisjoint(bottom.origin)
    assert set(top.origin) | set(bottom.origin) == set(tree.vertices())
    # reconnecting the lower part at its old parent restores the edge set
    parent_new = index_map(top)[tree.parent(u)]
    joined = f3_connect(top, parent_new, bottom)
    old_of = list(top.origin) + [bottom.origin[-o - 1] for o in joined.origin[top.n :]]
    assert _edges(joined, lambda v: old_of[v - 1]) == _edges(tree)


@given(online_trees())
def test_structure_invariants(tree):
    assert sum(tree.degrees[1:]) == 2 * (tree.n - 1)
    for v in tree.vertices():
        if v > 1:
            assert tree.depth(v) == tree.depth(tree.parent(v)) + 1
        degs = [tree.degree_at(v, t) for t in range(v, tree.n + 1)]
        assert degs == sorted(degs) and degs[-1] == tree.degree(v)
    # every prefix is connected: a parent always precedes its child
    assert all(tree.parent(v) < v for v in range(2, tree.n + 1))
