"""Small dense linear programs.

The workhorse is a two-phase tableau simplex over standard form
``min c.z  s.t.  A z = b, z >= 0`` (Dantzig pricing with a Bland fallback),
compiled with numba.
Problems here have a handful of free variables (a utility vector, maybe a
slack) and up to a few hundred inequality rows, so :func:`solve_lp` solves
the *dual*, whose tableau has one row per primal variable, and reads the
primal solution off the simplex multipliers.

Every optimal answer is re-checked against the original rows; if the check
fails the problem is handed to HiGHS and the fallback is logged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np

log = logging.getLogger(__name__)

OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = 0, 1, 2, 3
STATUS_NAMES = {OPTIMAL: "optimal", INFEASIBLE: "infeasible", UNBOUNDED: "unbounded",
                ITERATION_LIMIT: "iteration-limit"}

PIVOT_TOL = 1e-10
COST_TOL = 1e-10
FEAS_TOL = 1e-9
CHECK_TOL = 1e-7
DEGENERATE_RUN = 20


@numba.njit(cache=True)
def _pivot(T, basis, r, c):
    rows, cols = T.shape
    piv = T[r, c]
    for j in range(cols):
        T[r, j] /= piv
    for i in range(rows):
        if i != r:
            f = T[i, c]
            if f != 0.0:
                for j in range(cols):
                    T[i, j] -= f * T[r, j]
    basis[r] = c


@numba.njit(cache=True)
def _iterate(T, basis, ncand, max_iter):
    """Simplex pivots on tableau ``T`` (last row = reduced costs).

    Entering column: most negative reduced cost, lowest index on ties.
    After a run of degenerate pivots the rule switches to Bland's
    (first negative column), which cannot cycle.  Only the first ``ncand``
    columns may enter.  Returns a status code.
    """
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    stall = 0
    for _ in range(max_iter):
        enter = -1
        if stall < DEGENERATE_RUN:
            most = -COST_TOL
            for j in range(ncand):
                if T[m, j] < most:
                    most = T[m, j]
                    enter = j
        else:
            for j in range(ncand):
                if T[m, j] < -COST_TOL:
                    enter = j
                    break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = 0.0
        for i in range(m):
            a = T[i, enter]
            if a > PIVOT_TOL:
                ratio = T[i, rhs] / a
                if leave < 0 or ratio < best - 1e-12 or (ratio <= best + 1e-12 and basis[i] < basis[leave]):
                    leave = i
                    best = ratio
        if leave < 0:
            return UNBOUNDED
        if best <= 1e-12:
            stall += 1
        else:
            stall = 0
        _pivot(T, basis, leave, enter)
    return ITERATION_LIMIT


@numba.njit(cache=True)
def _standard_simplex(A, b, c, phase_one_only):
    """Two-phase simplex for ``min c.z, A z = b, z >= 0`` (rows of b any sign).

    Returns (status, z, objective, multipliers).  ``multipliers`` are the
    simplex multipliers of the final basis for the row-sign-normalised
    system, already mapped back to the caller's row signs.
    """
    m, n = A.shape
    sign = np.ones(m)
    for i in range(m):
        if b[i] < 0.0:
            sign[i] = -1.0
    cols = n + m + 1
    T = np.zeros((m + 1, cols))
    for i in range(m):
        for j in range(n):
            T[i, j] = sign[i] * A[i, j]
        T[i, n + i] = 1.0
        T[i, cols - 1] = sign[i] * b[i]
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        basis[i] = n + i
    # phase one: minimise the sum of artificials
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += T[i, j]
        T[m, j] = -s
    s = 0.0
    for i in range(m):
        s += T[i, cols - 1]
    T[m, cols - 1] = -s
    max_iter = 50 * (n + m) + 1000
    status = _iterate(T, basis, n, max_iter)
    z = np.zeros(n)
    pi = np.zeros(m)
    if status == ITERATION_LIMIT:
        return status, z, 0.0, pi
    if -T[m, cols - 1] > FEAS_TOL * max(1.0, s):
        return INFEASIBLE, z, 0.0, pi
    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if abs(T[i, j]) > 1e-9:
                    _pivot(T, basis, i, j)
                    break
    if phase_one_only:
        for i in range(m):
            if basis[i] < n:
                z[basis[i]] = T[i, cols - 1]
        return OPTIMAL, z, 0.0, pi
    # phase two: reduced costs c_j - c_B B^-1 A_j (artificials cost 0)
    for j in range(cols):
        T[m, j] = 0.0
    for j in range(n):
        T[m, j] = c[j]
    for i in range(m):
        bi = basis[i]
        cb = c[bi] if bi < n else 0.0
        if cb != 0.0:
            for j in range(cols):
                T[m, j] -= cb * T[i, j]
    status = _iterate(T, basis, n, max_iter)
    if status != OPTIMAL:
        return status, z, 0.0, pi
    obj = 0.0
    for i in range(m):
        if basis[i] < n:
            z[basis[i]] = T[i, cols - 1]
            obj += c[basis[i]] * T[i, cols - 1]
    # artificial column i started as e_i, so its reduced cost is -pi_i
    for i in range(m):
        pi[i] = -T[m, n + i] * sign[i]
    return OPTIMAL, z, obj, pi


@numba.njit(cache=True)
def _verified(c, G, h, E, f, x, target):
    scale = 1.0
    for k in range(x.size):
        if not np.isfinite(x[k]):
            return False
        scale = max(scale, 1.0 + abs(x[k]))
    tol = CHECK_TOL * scale
    for i in range(G.shape[0]):
        s = -h[i]
        for k in range(x.size):
            s += G[i, k] * x[k]
        if s > tol:
            return False
    for i in range(E.shape[0]):
        s = -f[i]
        for k in range(x.size):
            s += E[i, k] * x[k]
        if abs(s) > tol:
            return False
    s = 0.0
    for k in range(x.size):
        s += c[k] * x[k]
    return abs(s - target) <= CHECK_TOL * max(1.0, abs(target))


@numba.njit(cache=True)
def _dual_solve(c, G, h, E, f):
    """Solve ``max c.x, G x <= h, E x = f`` through its dual; see :func:`maximize`.

    Returns (status, objective, x, verified, probe_status).
    """
    d = c.size
    mg = G.shape[0]
    me = E.shape[0]
    ncol = mg + 2 * me
    M = np.empty((d, ncol))
    w = np.empty(ncol)
    for i in range(mg):
        for k in range(d):
            M[k, i] = G[i, k]
        w[i] = h[i]
    for i in range(me):
        for k in range(d):
            M[k, mg + i] = E[i, k]
            M[k, mg + me + i] = -E[i, k]
        w[mg + i] = f[i]
        w[mg + me + i] = -f[i]
    status, _, obj, pi = _standard_simplex(M, c.copy(), w, False)
    probe = -1
    ok = False
    if status == OPTIMAL:
        ok = _verified(c, G, h, E, f, pi, obj)
    elif status == INFEASIBLE:
        probe, _, _, _ = _standard_simplex(M, np.zeros(d), w, False)
    return status, obj, pi, ok, probe


def solve_standard(A, b, c=None, phase_one_only=False):
    """``min c.z  s.t.  A z = b, z >= 0``.  Returns (status, z, objective, multipliers)."""
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if c is None:
        c = np.zeros(A.shape[1])
        phase_one_only = True
    c = np.ascontiguousarray(c, dtype=float)
    return _standard_simplex(A, b, c, phase_one_only)


def is_feasible_standard(A, b) -> bool:
    """Does ``A z = b`` have a solution with ``z >= 0``?"""
    status, _, _, _ = solve_standard(A, b)
    return status == OPTIMAL


@dataclass
class LpOutcome:
    status: str
    value: Optional[float] = None
    solution: Optional[np.ndarray] = field(default=None, repr=False)
    diagnostic: str = ""

    @property
    def optimal(self):
        return self.status == "optimal"


@dataclass
class LpProblem:
    """``max/min objective.x + offset`` over free variables ``x``.

    Rows are stored as three blocks (``<=``, ``>=``, ``=``); build from
    ``(coeffs, relation, rhs)`` triples with :meth:`from_rows`.
    """

    objective: np.ndarray
    sense: str = "max"
    A_le: Optional[np.ndarray] = None
    b_le: Optional[np.ndarray] = None
    A_ge: Optional[np.ndarray] = None
    b_ge: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    offset: float = 0.0

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        d = self.objective.size
        if d < 1:
            raise ValueError("an LP needs at least one variable")
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', not {self.sense!r}")
        for a_name, b_name in (("A_le", "b_le"), ("A_ge", "b_ge"), ("A_eq", "b_eq")):
            A, b = getattr(self, a_name), getattr(self, b_name)
            if A is None:
                A, b = np.zeros((0, d)), np.zeros(0)
            A = np.asarray(A, dtype=float).reshape(-1, d)
            b = np.asarray(b, dtype=float).ravel()
            if A.shape[0] != b.size:
                raise ValueError(f"{a_name} has {A.shape[0]} rows but {b_name} has {b.size} entries")
            setattr(self, a_name, A)
            setattr(self, b_name, b)
        for arr in (self.objective, self.A_le, self.b_le, self.A_ge, self.b_ge, self.A_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")

    @classmethod
    def from_rows(cls, objective, rows: Sequence, sense="max", offset=0.0):
        blocks = {"<=": ([], []), ">=": ([], []), "=": ([], [])}
        for coeffs, rel, rhs in rows:
            rel = "=" if rel == "==" else rel
            if rel not in blocks:
                raise ValueError(f"unknown relation {rel!r}")
            blocks[rel][0].append(np.asarray(coeffs, dtype=float))
            blocks[rel][1].append(float(rhs))
        kw = {}
        for rel, (a_name, b_name) in (("<=", ("A_le", "b_le")), (">=", ("A_ge", "b_ge")), ("=", ("A_eq", "b_eq"))):
            if blocks[rel][0]:
                kw[a_name] = np.vstack(blocks[rel][0])
                kw[b_name] = np.asarray(blocks[rel][1])
        return cls(objective, sense=sense, offset=offset, **kw)


def _highs(c, G, h, E, f):
    from scipy.optimize import linprog

    d = c.size
    res = linprog(-c, A_ub=G if G.shape[0] else None, b_ub=h if G.shape[0] else None,
                  A_eq=E if E.shape[0] else None, b_eq=f if E.shape[0] else None,
                  bounds=[(None, None)] * d, method="highs")
    if res.status == 0:
        return "optimal", float(c @ res.x), res.x
    if res.status == 2:
        return "infeasible", None, None
    if res.status == 3:
        return "unbounded", None, None
    return "infeasible", None, None


def maximize(c, G=None, h=None, E=None, f=None) -> LpOutcome:
    """``max c.x  s.t.  G x <= h, E x = f`` with ``x`` free.

    Solved through the dual ``min h.u + f.v  s.t.  G^T u + E^T v = c, u >= 0``
    (``v`` split into two non-negative halves).
    """
    c = np.asarray(c, dtype=float)
    d = c.size
    G = np.zeros((0, d)) if G is None else np.asarray(G, dtype=float).reshape(-1, d)
    h = np.zeros(0) if h is None else np.asarray(h, dtype=float).ravel()
    E = np.zeros((0, d)) if E is None else np.asarray(E, dtype=float).reshape(-1, d)
    f = np.zeros(0) if f is None else np.asarray(f, dtype=float).ravel()
    status, obj, x, ok, probe = _dual_solve(c, np.ascontiguousarray(G), h, np.ascontiguousarray(E), f)
    if status == OPTIMAL:
        # multipliers of the dual are the primal point
        if ok:
            return LpOutcome("optimal", float(obj), x)
        diag = "simplex optimum failed verification; re-solved with HiGHS"
    elif status == UNBOUNDED:
        return LpOutcome("infeasible", diagnostic="dual unbounded")
    elif status == INFEASIBLE:
        # dual infeasible: primal is unbounded if it is feasible at all
        if probe == OPTIMAL:
            return LpOutcome("unbounded", diagnostic="dual infeasible, primal feasible")
        if probe == UNBOUNDED:
            return LpOutcome("infeasible", diagnostic="primal infeasible (Farkas certificate)")
        diag = "feasibility probe hit the iteration limit; re-solved with HiGHS"
    else:
        diag = "iteration limit; re-solved with HiGHS"
    log.warning("lp: %s", diag)
    st, val, x = _highs(c, G, h, E, f)
    return LpOutcome(st, val, x, diagnostic=diag)


def solve_lp(prob: LpProblem) -> LpOutcome:
    sgn = 1.0 if prob.sense == "max" else -1.0
    G = np.vstack([prob.A_le, -prob.A_ge])
    h = np.concatenate([prob.b_le, -prob.b_ge])
    out = maximize(sgn * prob.objective, G, h, prob.A_eq, prob.b_eq)
    if out.optimal:
        out.value = sgn * out.value + prob.offset
    return out
