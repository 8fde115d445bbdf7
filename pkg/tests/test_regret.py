import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from grmr.errors import ConfigError
from grmr.extremes import extreme_points
from grmr.fixtures import hexagon, square
from grmr.regret import estimate_max_regret, exact_max_regret, regret_ratio

from conftest import random_instance


def highs_max_regret(pts, Q):
    """Independent reference: per hull vertex t, minimise Q's best score over t's cell at <t,x> = 1."""
    verts = ConvexHull(pts).vertices
    T = pts[verts]
    S = pts[list(Q)]
    d = pts.shape[1]
    best = 0.0
    for k in range(T.shape[0]):
        t = T[k]
        # variables (x, s): min s  s.t.  <q, x> <= s,  <t' - t, x> <= 0,  <t, x> = 1
        A = np.vstack([np.hstack([S, -np.ones((S.shape[0], 1))]),
                       np.hstack([np.delete(T, k, axis=0) - t, np.zeros((T.shape[0] - 1, 1))])])
        b = np.zeros(A.shape[0])
        c = np.zeros(d + 1)
        c[-1] = 1.0
        res = linprog(c, A_ub=A, b_ub=b, A_eq=np.append(t, 0.0)[None, :], b_eq=[1.0],
                      bounds=[(None, None)] * (d + 1), method="highs")
        if res.status == 0:
            best = max(best, 1.0 - res.fun)
    return best


def test_regret_ratio_hexagon():
    P = hexagon()
    x = np.array([math.cos(math.pi / 3), math.sin(math.pi / 3)])
    assert regret_ratio(P, [0, 2, 4], x) == pytest.approx(0.5)
    assert regret_ratio(P, [1], x) == pytest.approx(0.0)


def test_hexagon_alternate_vertices_exact():
    P = hexagon()
    for method in ("arc", "lp"):
        assert exact_max_regret(P, [0, 2, 4], method=method).value == pytest.approx(0.5, abs=1e-9)
    assert exact_max_regret(P, range(6)).value == pytest.approx(0.0, abs=1e-12)


def test_square_pair_of_opposites_exceeds_one():
    # {(1,0), (-1,0)} scores 0 on (0,1): regret exactly 1
    rep = exact_max_regret(square(), [0, 2])
    assert rep.value == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_arc_sweep_and_lp_agree_in_2d(seed):
    rng = np.random.default_rng(seed)
    pts = random_instance(rng, 25)
    X = extreme_points(pts)
    Q = rng.choice(X.indices, size=min(len(X), 4), replace=False)
    a = exact_max_regret(pts, Q, X, method="arc").value
    b = exact_max_regret(pts, Q, X, method="lp").value
    if a < 1.0:
        assert a == pytest.approx(b, abs=1e-8)
    else:
        assert b >= 1.0 - 1e-8


@pytest.mark.parametrize("d", [3, 4])
def test_lp_evaluator_matches_highs_reference(d):
    rng = np.random.default_rng(d)
    for _ in range(8):
        pts = random_instance(rng, 60, d=d)
        X = extreme_points(pts)
        Q = rng.choice(X.indices, size=max(d + 3, len(X) // 2), replace=False)
        ours = exact_max_regret(pts, Q, X).value
        ref = highs_max_regret(pts, Q)
        if ref < 1.0:
            assert ours == pytest.approx(ref, abs=1e-7)


def test_sampled_is_a_lower_bound_and_close_in_2d(rng):
    for _ in range(5):
        pts = random_instance(rng, 200)
        X = extreme_points(pts)
        Q = X.indices[::2]
        exact = exact_max_regret(pts, Q, X).value
        est = estimate_max_regret(pts, Q, m=200_000, seed=1, X=X).value
        assert est <= exact + 1e-12
        assert exact - est < 1e-3


def test_sampled_is_seeded():
    pts = hexagon()
    a = estimate_max_regret(pts, [0, 2, 4], m=5000, seed=7)
    b = estimate_max_regret(pts, [0, 2, 4], m=5000, seed=7)
    assert a.value == b.value and a.samples == 5000


def test_stop_above_cuts_the_scan_short(rng):
    pts = random_instance(rng, 300, d=3)
    X = extreme_points(pts)
    Q = X.indices[:4]
    full = exact_max_regret(pts, Q, X, method="lp")
    early = exact_max_regret(pts, Q, X, method="lp", stop_above=0.01)
    assert full.value > 0.01
    assert early.value > 0.01 and early.value <= full.value


def test_bad_subsets():
    with pytest.raises(ConfigError):
        exact_max_regret(hexagon(), [])
    with pytest.raises(ConfigError):
        exact_max_regret(hexagon(), [6])
    with pytest.raises(ConfigError):
        estimate_max_regret(hexagon(), [0], m=0)
