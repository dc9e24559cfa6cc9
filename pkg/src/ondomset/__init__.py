"""Online dominating sets on trees: algorithms, adversaries, exact oracles
and the block/property analysis used to bound the randomized algorithm."""

from .algorithms import (
    AlgorithmA,
    AlgorithmB,
    AlwaysNew,
    BaselineGreedy,
    NeverNew,
    RAMixture,
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
from .online import ContractViolation, OnlineRun, SelectionTrace, run_online
from .opt import OptResult, brute_force_min, enumerate_optimal_sets, min_dominating_set_tree, opt_size
from .tree import (
    InvalidInput,
    OnlineTree,
    f1_split,
    f2_split,
    f3_connect,
    is_dominating,
    pendant,
    validate,
)

__version__ = "0.1.0"
