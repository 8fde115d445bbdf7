import math

import numpy as np
import pytest
from scipy.optimize import linprog

from grmr.errors import ConfigError
from grmr.extremes import extreme_points
from grmr.fixtures import WORKED_2D_OPTIMUM_01, hexagon, square, worked_2d, worked_domgraph
from grmr.hgrmr import (DomGraph, build_dom_graph, dominance_weight, dual_min_regret,
                        greedy_dominating_set, hgrmr, hgrmr_reuse)
from grmr.ipdg import empty_ipdg, ipdg_approx, ipdg_exact_2d
from grmr.regret import exact_max_regret

from conftest import random_instance


def highs_weight(ti, tj, nbrs):
    """max 1 - <ti, x>  s.t.  <t - tj, x> <= 0 for t in nbrs, <tj, x> = 1, via HiGHS."""
    d = ti.size
    res = linprog(ti, A_ub=np.asarray(nbrs) - tj, b_ub=np.zeros(len(nbrs)), A_eq=tj[None, :], b_eq=[1.0],
                  bounds=[(None, None)] * d, method="highs")
    if res.status == 3:
        return math.inf
    if res.status == 2:
        return None
    return 1.0 - res.fun


def test_dominance_weight_square_and_hexagon():
    S = square()
    assert dominance_weight(S[0], S[1], S[[0, 2]]) == pytest.approx(2.0, abs=1e-6)
    H = hexagon()
    assert dominance_weight(H[0], H[1], H[[0, 2]]) == pytest.approx(1.0, abs=1e-6)


def test_dominance_weight_without_walls_is_unbounded():
    H = hexagon()
    assert dominance_weight(H[0], H[1], np.zeros((0, 2))) == math.inf


@pytest.mark.parametrize("d", [3, 4, 5])
def test_stored_weights_match_highs(rng, d):
    pts = random_instance(rng, 400, d=d, dist="normal")
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=20_000, k=8, seed=0)
    dg = build_dom_graph(pts, X, g, 0.3)
    T = X.points(pts)
    assert dg.weights
    for (i, j), w in list(dg.weights.items())[:300]:
        ref = highs_weight(T[i], T[j], T[g.neighbors(j)])
        assert w == pytest.approx(max(ref, 0.0), abs=1e-7)


def test_worked_graph_greedy_order():
    dg = worked_domgraph()
    picks = greedy_dominating_set(dg, 0.2)
    assert picks[0] == 7
    assert sorted(picks) == [1, 3, 4, 5, 7]


def test_greedy_covers_everything(rng):
    pts = random_instance(rng, 500, d=3)
    X = extreme_points(pts)
    dg = build_dom_graph(pts, X, ipdg_approx(pts, X, m=20_000, k=8), 0.15)
    picks = greedy_dominating_set(dg)
    D = dg.dom_matrix()
    assert D[picks].any(axis=0).all()
    assert len(set(picks)) == len(picks)


def test_worked_dataset_heuristic():
    P = worked_2d()
    X = extreme_points(P)
    r = hgrmr(P, X, ipdg_exact_2d(X), 0.2)
    assert tuple(r.indices) == WORKED_2D_OPTIMUM_01
    assert exact_max_regret(P, r.indices, X).value <= 0.2


@pytest.mark.parametrize("d,eps", [(3, 0.05), (3, 0.2), (4, 0.1), (5, 0.1)])
def test_validity(rng, d, eps):
    for dist in ("normal", "uniform"):
        pts = random_instance(rng, 800, d=d, dist=dist)
        X = extreme_points(pts)
        for g in (ipdg_approx(pts, X, m=20_000, k=8), empty_ipdg(X)):
            r = hgrmr(pts, X, g, eps)
            assert exact_max_regret(pts, r.indices, X).value <= eps + 1e-9


def test_empty_graph_keeps_every_extreme_point(rng):
    pts = random_instance(rng, 300, d=3)
    X = extreme_points(pts)
    assert hgrmr(pts, X, empty_ipdg(X), 0.2).size == len(X)


def test_reuse_never_worse_and_valid(rng):
    pts = random_instance(rng, 1000, d=3, dist="normal")
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=20_000, k=16)
    for eps in (0.05, 0.1):
        base = hgrmr(pts, X, g, eps)
        re = hgrmr_reuse(pts, X, g, eps)
        assert re.size <= base.size
        assert eps <= re.delta <= min(3 * eps, 0.99)
        assert exact_max_regret(pts, re.indices, X).value <= eps + 1e-9
        assert re.extra["validations"] >= 1


def test_reuse_sampled_validation_runs(rng):
    pts = random_instance(rng, 500, d=3)
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=10_000, k=8)
    r = hgrmr_reuse(pts, X, g, 0.1, validate="sampled", m=20_000)
    assert r.size >= 4
    with pytest.raises(ConfigError):
        hgrmr_reuse(pts, X, g, 0.1, validate="nope")
    with pytest.raises(ConfigError):
        hgrmr_reuse(pts, X, g, 0.1, eta=0.05)


def test_dual_budget(rng):
    pts = random_instance(rng, 800, d=3, dist="normal")
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=20_000, k=16)
    prev = math.inf
    for r in (6, 10, 20):
        res = dual_min_regret(pts, X, g, r=r)
        assert res.size <= r
        assert res.extra["exact_max_regret"] <= res.delta + 1e-9
        assert res.delta <= prev
        prev = res.delta
    with pytest.raises(ConfigError):
        dual_min_regret(pts, X, g, r=3)


def test_domgraph_file_roundtrip(tmp_path, rng):
    pts = random_instance(rng, 300, d=3)
    X = extreme_points(pts)
    dg = build_dom_graph(pts, X, ipdg_approx(pts, X, m=10_000, k=8), 0.3)
    p = tmp_path / "dom.txt"
    dg.write(p, delta=0.2)
    back = DomGraph.read(p)
    assert back.cap == 0.2
    assert back.edges() == [(i, j, pytest.approx(w)) for i, j, w in dg.edges(0.2)]
    assert greedy_dominating_set(back) == greedy_dominating_set(dg, 0.2)


def test_threshold_checked():
    X = extreme_points(hexagon())
    with pytest.raises(ConfigError):
        build_dom_graph(hexagon(), X, ipdg_exact_2d(X), 1.0)
