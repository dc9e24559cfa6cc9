from fractions import Fraction

import pytest
from hypothesis import given

from ondomset.adversary_rand import (
    TARGET,
    ExactRAOracle,
    MonteCarloOracle,
    ProbabilityEstimate,
    build_rand_adversary,
    check_lemma17,
    evaluate_rand_adversary,
    path_input,
)
from ondomset.algorithms import ra_selection_probability
from ondomset.tree import OnlineTree, is_dominating
from strategies import online_trees

HALF = Fraction(1, 2)


class _Certain:
    """Every vertex selected with probability one."""

    name = "certain"

    def estimate(self, tree):
        ones = {v: Fraction(1) for v in tree.vertices()}
        pairs = {e: (Fraction(1), Fraction(1)) for e in tree.edges()}
        return ProbabilityEstimate(ones, pairs, {v: 0.0 for v in tree.vertices()}, True)


class TestArrivalEdges:
    def _edge(self, tree, edge):
        return next(c for c in check_lemma17(tree).checks if (c.parent, c.child) == edge)

    def test_two_vertices(self):
        assert self._edge(OnlineTree((0, 1)), (1, 2)).total >= 1

    def test_star_edge(self):
        star = OnlineTree((0, 1, 2, 2))
        # right after v3 arrives each arm holds one endpoint; v4 later makes v2 certain
        assert self._edge(star, (2, 3)).total == 1
        final = ra_selection_probability(star)
        assert final[2] + final[3] == Fraction(3, 2)

    def test_chain_edge_is_tight(self):
        assert self._edge(OnlineTree((0, 1, 2, 3)), (2, 3)).total == 1

    @given(online_trees(min_n=2, max_n=40))
    def test_holds_exactly(self, tree):
        report = check_lemma17(tree)
        assert report.exact and report.ok and len(report.checks) == tree.n - 1


class TestBuild:
    def test_m2_against_ra(self):
        t = build_rand_adversary(2)
        assert t.path_probabilities == {1: 1, 2: HALF, 3: HALF, 4: HALF}
        assert [(d.case, d.low) for d in t.decisions] == [(2, 2), (2, 3)]
        assert t.off_witness == {2, 3}
        assert t.tree.parents == (0, 1, 2, 3, 2, 3)

    def test_certain_oracle_adds_nothing(self):
        t = build_rand_adversary(4, _Certain())
        assert all(d.case == 1 for d in t.decisions)
        assert t.tree == path_input(8) and len(t.off_witness) == 4

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            build_rand_adversary(0)

    @pytest.mark.parametrize("m", [1, 2, 3, 7, 20])
    def test_transcript_invariants(self, m):
        t = build_rand_adversary(m)
        assert is_dominating(t.tree, t.off_witness) and len(t.off_witness) == m
        assert t.to_dict()["m"] == m


class TestEvaluate:
    @pytest.mark.parametrize("m", [1, 2, 10, 50])
    def test_ratio_at_least_four_thirds(self, m):
        ev = evaluate_rand_adversary(build_rand_adversary(m))
        assert ev.exact and ev.ratio >= TARGET and ev.opt <= m

    @pytest.mark.parametrize("m", [2, 9])
    def test_every_group_costs_four_thirds(self, m):
        ev = evaluate_rand_adversary(build_rand_adversary(m))
        assert all(c >= TARGET for c in ev.group_costs)
        assert sum(ev.group_costs) == ev.expected_cost

    def test_needs_a_known_oracle(self):
        with pytest.raises(TypeError):
            evaluate_rand_adversary(build_rand_adversary(2), _Certain())


class TestMonteCarlo:
    @pytest.mark.parametrize("parents", [(0, 1, 2, 2), (0, 1, 2, 3, 3, 5), (0, 1, 1, 2, 4, 4, 6, 1)])
    def test_estimates_close_to_exact(self, parents):
        tree = OnlineTree(parents)
        mc = MonteCarloOracle(trials=2000, seed=len(parents)).estimate(tree)
        exact = ExactRAOracle().estimate(tree)
        for v in tree.vertices():
            assert abs(mc.final[v] - exact.final[v]) <= mc.radius[v]

    def test_reproducible(self):
        tree = path_input(6)
        a = MonteCarloOracle(trials=300, seed=3).estimate(tree)
        b = MonteCarloOracle(trials=300, seed=3).estimate(tree)
        assert a == b

    def test_path_estimates_at_ten_thousand_trials(self):
        tree = path_input(8)
        mc = MonteCarloOracle(trials=10_000, seed=0).estimate(tree)
        exact = ExactRAOracle().estimate(tree)
        assert all(abs(mc.final[v] - exact.final[v]) <= mc.radius[v] for v in tree.vertices())

    def test_adversary_with_estimates(self):
        oracle = MonteCarloOracle(trials=2000, seed=1)
        t = build_rand_adversary(5, oracle)
        ev = evaluate_rand_adversary(t, oracle)
        assert not ev.exact and ev.ratio_low <= ev.ratio
        assert ev.ratio + 0.2 >= float(TARGET)
        assert check_lemma17(t.tree, oracle).ok

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            MonteCarloOracle(trials=0)
