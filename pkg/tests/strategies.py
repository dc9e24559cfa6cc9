"""Shared hypothesis strategies."""

from hypothesis import strategies as st

from ondomset.tree import OnlineTree


@st.composite
def online_trees(draw, min_n: int = 1, max_n: int = 30) -> OnlineTree:
    n = draw(st.integers(min_n, max_n))
    tail = [draw(st.integers(1, i)) for i in range(1, n)]
    return OnlineTree((0, *tail))


@st.composite
def tree_and_vertex(draw, min_n: int = 1, max_n: int = 30):
    t = draw(online_trees(min_n, max_n))
    return t, draw(st.integers(1, t.n))
