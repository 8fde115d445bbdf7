import itertools
import math

import numpy as np
import pytest

from grmr.errors import ConfigError
from grmr.fixtures import hexagon, worked_2d
from grmr.oracle import brute_force_grmr, colex
from grmr.regret import exact_max_regret

from conftest import random_instance


def naive_min_size(pts, eps):
    """Every subset of every point, evaluated with the 2-d arc sweep."""
    n = pts.shape[0]
    for k in range(1, n + 1):
        for comb in itertools.combinations(range(n), k):
            if exact_max_regret(pts, comb, method="arc").value <= eps + 1e-12:
                return k
    return None


def test_colex_order():
    assert list(colex(4, 2)) == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]
    assert sum(1 for _ in colex(7, 3)) == math.comb(7, 3)
    assert list(colex(3, 0)) == [()]


def test_hexagon():
    assert brute_force_grmr(hexagon(), 0.5).size == 3
    assert brute_force_grmr(hexagon(), 0.49).size == 6


def test_worked_dataset():
    res = brute_force_grmr(worked_2d(), 0.1)
    assert res.size == 5 and res.regret <= 0.1


@pytest.mark.parametrize("seed", range(6))
def test_matches_naive_enumeration(seed):
    pts = random_instance(np.random.default_rng(seed), 9)
    for eps in (0.05, 0.2):
        assert brute_force_grmr(pts, eps).size == naive_min_size(pts, eps)


def test_hd_scope_and_validity(rng):
    pts = random_instance(rng, 25, d=3)
    res = brute_force_grmr(pts, 0.2)
    assert res.scope == "optimal over X"
    assert exact_max_regret(pts, res.subset).value <= 0.2 + 1e-9


def test_size_cap():
    res = brute_force_grmr(hexagon(), 0.1, size_cap=4)
    assert res.size is None and res.cap_reached


def test_bad_eps():
    with pytest.raises(ConfigError):
        brute_force_grmr(hexagon(), 1.2)
