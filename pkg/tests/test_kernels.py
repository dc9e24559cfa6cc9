import json
import os
import random
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from ondomset import _kernels
from ondomset.algorithms import ra_mixture, verify_membership_table
from ondomset.experiment import _to_kernel, exhaustive_small_sweep, kernel_batch_check
from ondomset.generators import random_parents
from ondomset.opt import opt_size
from ondomset.tree import OnlineTree


def _random_trees(count, max_n, seed):
    rng = random.Random(seed)
    return [random_parents(rng.randint(1, max_n), rng) for _ in range(count)]


def test_costs_match_object_level():
    trees = _random_trees(300, 40, 1)
    width = max(t.n for t in trees)
    pars = np.full((len(trees), width), -2, dtype=np.int64)
    sizes = np.array([t.n for t in trees], dtype=np.int64)
    for r, t in enumerate(trees):
        pars[r, : t.n] = _to_kernel(t.parents)
    out = np.zeros((len(trees), 3), dtype=np.int64)
    _kernels.ab_costs_batch(pars, sizes, out)
    for row, t in zip(out, trees):
        mix = ra_mixture(t)
        assert tuple(row) == (mix.trace_a.cost, mix.trace_b.cost, opt_size(t))


def test_batch_agrees_with_object_level_checks():
    trees = _random_trees(200, 14, 2)
    report = kernel_batch_check(trees, check_brute=True)
    assert report["count"] == 200
    assert report["membership_mismatches"] == 0 and report["oracle_mismatches"] == 0
    best = max(ra_mixture(t).expected_cost / opt_size(t) for t in trees)
    assert report["max_ratio"] == best
    assert all(f.ok for t in trees if t.n > 1 for f in verify_membership_table(t))


def test_sweep_small_sizes():
    lines = exhaustive_small_sweep(6)
    assert [line.count for line in lines] == [1, 1, 2, 6, 24, 120]
    assert [line.max_ratio for line in lines] == [1, Fraction(3, 2), 2, Fraction(5, 2), Fraction(5, 2), Fraction(5, 2)]
    assert lines[3].argmax == (0, 1, 2, 2)
    assert all(line.ok for line in lines)


def test_sweep_limit():
    with pytest.raises(ValueError):
        exhaustive_small_sweep(13)


def test_python_kernel_unwraps():
    fn = _kernels.python_kernel(_kernels.tree_dp_opt)
    assert fn(np.array([-1, 0, 1, 1]), 4) == 1


FALLBACK = r"""
import json
from ondomset import _kernels
from ondomset.experiment import exhaustive_small_sweep
line = exhaustive_small_sweep(7, min_n=7)[0]
print(json.dumps({"numba": _kernels.HAVE_NUMBA, "line": line.to_dict()}))
"""


def test_pure_python_fallback_gives_same_sweep():
    env = dict(os.environ, ONDOMSET_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", FALLBACK], env=env, capture_output=True, text=True, check=True)
    result = json.loads(out.stdout.strip().splitlines()[-1])
    assert result["numba"] is False
    assert result["line"] == exhaustive_small_sweep(7, min_n=7)[0].to_dict()


def test_single_vertex_kernel():
    assert kernel_batch_check([OnlineTree((0,))])["max_ratio"] == 1
