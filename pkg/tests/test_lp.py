"""The simplex is checked against HiGHS on random LPs."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from grmr.lp import LpProblem, is_feasible_standard, maximize, solve_lp, solve_standard


def _highs(c, G, h, E=None, f=None):
    res = linprog(-c, A_ub=G, b_ub=h, A_eq=E, b_eq=f, bounds=[(None, None)] * c.size, method="highs")
    return res


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 6), st.integers(0, 30), st.booleans())
def test_maximize_agrees_with_highs(seed, d, rows, with_eq):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=d)
    G = rng.normal(size=(rows, d))
    h = rng.uniform(-0.5, 1.0, size=rows)
    E = f = None
    if with_eq:
        E = rng.normal(size=(1, d))
        f = np.ones(1)
    ours = maximize(c, G if rows else None, h if rows else None, E, f)
    ref = _highs(c, G if rows else None, h if rows else None, E, f)
    expected = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert ours.status == expected
    if expected == "optimal":
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
        x = ours.solution
        if rows:
            assert np.all(G @ x <= h + 1e-7)
        if with_eq:
            assert E @ x == pytest.approx(f, abs=1e-7)


def test_small_known_lps():
    # max x + y  s.t.  x <= 1, y <= 2
    out = maximize(np.array([1.0, 1.0]), np.eye(2), np.array([1.0, 2.0]))
    assert out.optimal and out.value == pytest.approx(3.0)
    assert maximize(np.array([1.0, 0.0]), np.array([[0.0, 1.0]]), np.array([1.0])).status == "unbounded"
    infeasible = maximize(np.array([1.0]), np.array([[1.0], [-1.0]]), np.array([-1.0, -1.0]))
    assert infeasible.status == "infeasible"


def test_degenerate_lp_terminates():
    # many redundant constraints through the optimum
    k = 40
    th = np.linspace(0, np.pi / 2, k)
    G = np.column_stack([np.cos(th), np.sin(th)])
    G = np.vstack([G, G, [[-1.0, 0.0], [0.0, -1.0]]])
    h = np.concatenate([np.zeros(2 * k), [1.0, 1.0]])
    # max x + y sits on the origin, where all 80 cone rows are active
    out = maximize(np.array([1.0, 1.0]), G, h)
    assert out.optimal and out.value == pytest.approx(0.0, abs=1e-9)
    assert out.value == pytest.approx(-_highs(np.array([1.0, 1.0]), G, h).fun, abs=1e-9)


def test_lp_problem_rows_and_min_sense():
    prob = LpProblem.from_rows([1.0, 2.0], [([1.0, 1.0], "<=", 4), ([1.0, 0.0], ">=", 1),
                                           ([0.0, 1.0], ">=", 0)], sense="min", offset=1.0)
    out = solve_lp(prob)
    assert out.optimal and out.value == pytest.approx(2.0)
    with pytest.raises(ValueError):
        LpProblem.from_rows([1.0], [([1.0], "<>", 1)])


def test_standard_form_feasibility():
    A = np.array([[1.0, 1.0, 1.0]])
    assert is_feasible_standard(A, np.array([1.0]))
    assert not is_feasible_standard(A, np.array([-1.0]))
    status, z, obj, _ = solve_standard(A, np.array([1.0]), np.array([3.0, 1.0, 2.0]))
    assert obj == pytest.approx(1.0) and z[1] == pytest.approx(1.0)
