from fractions import Fraction

import pytest
from hypothesis import given, settings

from ondomset.algorithms import (
    MEMBERSHIP,
    AlgorithmA,
    AlwaysNew,
    NeverNew,
    RandomizedRA,
    classify_vertex,
    expected_cost_per_vertex,
    make_algorithm,
    ra_expected_cost,
    ra_mixture,
    ra_selection_probability,
    run_algorithm_a,
    run_algorithm_b,
    run_baseline_greedy,
    run_ra_sample,
    verify_membership_table,
)
from ondomset.online import ContractViolation, OnlineRun, run_online
from ondomset.tree import OnlineTree, is_dominating
from strategies import online_trees

STAR = OnlineTree((0, 1, 2, 2))
CHAIN4 = OnlineTree((0, 1, 2, 3))
SINGLE = OnlineTree((0,))


def case_table(parents, even_selects_parent):
    """Reference transcription of the case table over a raw parent list:
    v1 is selected; a vertex arriving at u selects u when u has degree >= 3
    at that moment, otherwise the depth parity decides."""
    selected, deg, depth = set(), {}, {}
    for i, p in enumerate(parents, start=1):
        if i == 1:
            selected.add(1)
            deg[1], depth[1] = 0, 0
            continue
        deg[p] += 1
        deg[i], depth[i] = 1, depth[p] + 1
        if deg[p] >= 3:
            selected.add(p)
        elif (depth[i] % 2 == 0) == even_selects_parent:
            selected.add(p)
        else:
            selected.add(i)
    return selected


class TestTraces:
    @pytest.mark.parametrize(
        "tree,a,b",
        [(STAR, {1, 2}, {1, 2, 3}), (CHAIN4, {1, 2, 4}, {1, 3}), (SINGLE, {1}, {1})],
    )
    def test_examples(self, tree, a, b):
        assert run_algorithm_a(tree).selected == a
        assert run_algorithm_b(tree).selected == b

    def test_selection_times(self):
        # v2 is taken only once v4 lifts its degree to three
        assert run_algorithm_b(STAR).selected_at == {1: 1, 3: 3, 2: 4}

    @given(online_trees(max_n=40))
    def test_agrees_with_case_table(self, tree):
        assert run_algorithm_a(tree).selected == case_table(tree.parents, True)
        assert run_algorithm_b(tree).selected == case_table(tree.parents, False)


class TestRA:
    @pytest.mark.parametrize("tree,cost", [(STAR, Fraction(5, 2)), (CHAIN4, Fraction(5, 2)), (SINGLE, 1)])
    def test_expected_cost(self, tree, cost):
        assert ra_expected_cost(tree) == cost

    def test_probabilities_of_star(self):
        half = Fraction(1, 2)
        assert ra_selection_probability(STAR) == {1: 1, 2: 1, 3: half, 4: 0}

    def test_probability_at_a_time(self):
        mix = ra_mixture(STAR)
        assert mix.probability(2, 1) == 0 and mix.probability(2, 2) == Fraction(1, 2)

    def test_sampled_arm_is_seeded(self):
        assert run_ra_sample(CHAIN4, seed=5) == run_ra_sample(CHAIN4, seed=5)
        arms = {run_ra_sample(CHAIN4, seed=s)[0] for s in range(40)}
        assert arms == {"a", "b"}

    @given(online_trees(max_n=40))
    def test_sample_matches_an_arm(self, tree):
        arm, trace = run_ra_sample(tree, seed=tree.n)
        reference = run_algorithm_a(tree) if arm == "a" else run_algorithm_b(tree)
        assert trace.selected == reference.selected


class TestGreedy:
    # a lone v1 cannot dominate v3 and v4, so both leaves are selected
    def test_star(self):
        assert run_baseline_greedy(STAR).selected == {1, 3, 4}

    def test_chain(self):
        assert run_baseline_greedy(CHAIN4).selected == {1, 3}

    def test_single(self):
        assert run_baseline_greedy(SINGLE).selected == {1}


class TestMembership:
    def test_chain_middle_vertex(self):
        finding = verify_membership_table(CHAIN4)[2]
        assert (finding.vertex, finding.case, finding.actual) == (3, "3-e", (False, True))

    def test_star_late_leaf(self):
        finding = verify_membership_table(STAR)[3]
        assert finding.case == "4-2" and finding.actual == (False, False) and finding.ok

    def test_first_vertex_in_both(self):
        assert verify_membership_table(CHAIN4)[0].expected == MEMBERSHIP["1"] == (True, True)

    def test_needs_two_vertices(self):
        with pytest.raises(ValueError):
            verify_membership_table(SINGLE)

    @given(online_trees(min_n=2, max_n=40))
    def test_table_holds(self, tree):
        assert all(f.ok for f in verify_membership_table(tree))


class TestPerVertexCost:
    @pytest.mark.parametrize(
        "tree,v,cost",
        [(CHAIN4, 1, 1), (CHAIN4, 2, Fraction(1, 2)), (STAR, 4, 0), (STAR, 2, 1)],
    )
    def test_examples(self, tree, v, cost):
        assert expected_cost_per_vertex(tree, v) == cost

    @given(online_trees(min_n=2, max_n=40))
    def test_costs_sum_to_expectation(self, tree):
        mix = ra_mixture(tree)
        total = sum(expected_cost_per_vertex(tree, v, mix) for v in tree.vertices())
        assert total == mix.expected_cost
        assert {classify_vertex(tree, v)[0] for v in tree.vertices()} <= set("1234")


@pytest.mark.parametrize("name", ["a", "b", "greedy", "always-new", "never-new"])
@given(tree=online_trees(max_n=30))
@settings(max_examples=40)
def test_every_prefix_dominated_and_irrevocable(name, tree):
    trace = run_online(make_algorithm(name), tree)
    for t in tree.vertices():
        assert is_dominating(tree.prefix(t), trace.selected_after(t))
    # each vertex is selected once, at or after its own reveal
    assert all(v <= when for v, when in trace.selected_at.items())
    assert sum(len(a) for a in trace.additions) == trace.cost


def test_always_new_skips_second_sibling_leaf():
    assert run_online(AlwaysNew(), STAR).selected == {1, 2, 3}
    assert run_online(NeverNew(), STAR).selected == {1, 2}


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        make_algorithm("coin")


class _Lazy:
    name = "lazy"

    def reset(self):
        pass

    def on_reveal(self, tree, v, selected):
        return (1,) if v == 1 else ()


class _Eager:
    name = "eager"

    def reset(self):
        pass

    def on_reveal(self, tree, v, selected):
        return (v + 1,)


def test_runner_enforces_contract():
    with pytest.raises(ContractViolation):
        run_online(_Lazy(), CHAIN4)
    with pytest.raises(ContractViolation):
        run_online(_Eager(), CHAIN4)


def test_runner_accepts_adaptive_reveals():
    run = OnlineRun(AlgorithmA())
    run.reveal()
    run.reveal(1)
    assert run.tree.freeze() == OnlineTree((0, 1))
    assert RandomizedRA(seed=1).name == "ra-sample"
