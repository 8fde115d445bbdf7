"""Dominance-graph heuristic for any dimension.

t_i dominates t_j at level e when, everywhere inside t_j's Voronoi cell,
t_i scores at least (1 - e) of the top score.  The smallest such e is an LP
over the cell (walls taken from the IPDG neighbours of t_j).  A greedy
dominating set of the resulting digraph is an e-regret set.
"""

from __future__ import annotations

import json
import logging
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numba
import numpy as np

from .errors import ConfigError
from .extremes import ExtremeSet
from .geometry import as_points
from .ipdg import IpdgGraph, empty_ipdg, ipdg_approx, ipdg_exact_2d
from .lp import OPTIMAL, UNBOUNDED as LP_UNBOUNDED, _dual_solve, maximize

log = logging.getLogger(__name__)

UNBOUNDED = math.inf


def dominance_weight(ti, tj, nbrs) -> Optional[float]:
    """max 1 - <t_i, x>  s.t.  <t_j - t, x> >= 0 for t in nbrs, <t_j, x> = 1.

    Returns ``inf`` when the LP is unbounded and ``None`` when it is
    infeasible (the cell slice is empty).
    """
    ti = np.asarray(ti, dtype=float)
    tj = np.asarray(tj, dtype=float)
    nbrs = np.asarray(nbrs, dtype=float).reshape(-1, ti.size)
    out = maximize(-ti, nbrs - tj, np.zeros(nbrs.shape[0]), tj.reshape(1, -1), np.ones(1))
    if out.status == "unbounded":
        return UNBOUNDED
    if not out.optimal:
        return None
    return 1.0 + out.value


@numba.njit(cache=True)
def _dominance_lp(T, indptr, indices, i, j):
    """Dominance LP for the pair (t_i, t_j) with t_j's IPDG neighbours as walls."""
    d = T.shape[1]
    lo, hi = indptr[j], indptr[j + 1]
    G = np.empty((hi - lo, d))
    for r in range(hi - lo):
        t = indices[lo + r]
        for k in range(d):
            G[r, k] = T[t, k] - T[j, k]
    E = np.empty((1, d))
    c = np.empty(d)
    for k in range(d):
        E[0, k] = T[j, k]
        c[k] = -T[i, k]
    return _dual_solve(c, G, np.zeros(hi - lo), E, np.ones(1))


def _pair_weight(T, indptr, indices, i, j):
    """Dominance weight for positions (i, j); same conventions as :func:`dominance_weight`."""
    status, obj, _, ok, probe = _dominance_lp(T, indptr, indices, i, j)
    if status == OPTIMAL and ok:
        return 1.0 + obj
    if status == LP_UNBOUNDED:
        return None
    if status != OPTIMAL and probe == OPTIMAL:
        return UNBOUNDED
    if status != OPTIMAL and probe == LP_UNBOUNDED:
        return None
    # anything else goes through the checked solver (and its HiGHS fallback)
    return dominance_weight(T[i], T[j], T[indices[indptr[j]:indptr[j + 1]]])


@dataclass
class DomGraph:
    """Weighted dominance digraph on positions 0..len(X)-1 of an ExtremeSet.

    ``weights`` holds every computed edge with weight <= ``cap`` (the build
    threshold); :meth:`dom_matrix` filters it to any lower level.
    """

    vertices: np.ndarray
    weights: Dict[Tuple[int, int], float] = field(repr=False)
    cap: float
    delta_max_degree: int = 0
    lp_solves: int = 0
    infeasible: int = 0

    def __len__(self):
        return int(self.vertices.size)

    def edges(self, delta: Optional[float] = None):
        delta = self.cap if delta is None else delta
        return sorted((i, j, w) for (i, j), w in self.weights.items() if w <= delta)

    def dom_matrix(self, delta: Optional[float] = None) -> np.ndarray:
        """``D[i, j]`` is True when t_i dominates t_j at level ``delta`` (diagonal set)."""
        delta = self.cap if delta is None else delta
        n = len(self)
        D = np.eye(n, dtype=bool)
        for (i, j), w in self.weights.items():
            if w <= delta:
                D[i, j] = True
        return D

    def gamma(self, delta: Optional[float] = None) -> int:
        return int(self.dom_matrix(delta).sum(axis=1).max(initial=0))

    def header(self, delta: Optional[float] = None):
        delta = self.cap if delta is None else delta
        return {"threshold": delta, "delta_max": self.cap,
                "stats": {"Delta": self.delta_max_degree, "Gamma": self.gamma(delta)},
                "vertices": [int(v) for v in self.vertices]}

    def write(self, path, delta: Optional[float] = None):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# " + json.dumps(self.header(delta)) + "\n")
            for i, j, w in self.edges(delta):
                fh.write(f"{i} {j} {w:.17g}\n")

    @classmethod
    def read(cls, path):
        head, weights = None, {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                s = line.strip()
                if not s:
                    continue
                if s.startswith("#"):
                    head = json.loads(s[1:])
                    continue
                parts = s.split()
                if len(parts) != 3:
                    raise ConfigError(f"{path}: line {lineno} is not 'i j weight'")
                weights[(int(parts[0]), int(parts[1]))] = float(parts[2])
        if head is None:
            raise ConfigError(f"{path}: missing '# {{json}}' header")
        return cls(np.asarray(head["vertices"], dtype=np.int64), weights, float(head["threshold"]),
                   delta_max_degree=int(head.get("stats", {}).get("Delta", 0)))


def build_dom_graph(data, X: ExtremeSet, ipdg: IpdgGraph, eps: float) -> DomGraph:
    """BFS from every t_i over the IPDG, expanding only through dominated vertices."""
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"threshold must lie in (0, 1), got {eps}")
    if len(ipdg) != len(X):
        raise ConfigError("IPDG and ExtremeSet sizes differ")
    T = np.ascontiguousarray(X.points(data))
    indptr, indices = ipdg.csr()
    n = T.shape[0]
    weights = {}
    solves = skipped = 0
    for i in range(n):
        seen = {i}
        q = deque()
        for j in ipdg.neighbors(i):
            seen.add(int(j))
            q.append(int(j))
        while q:
            j = q.popleft()
            w = _pair_weight(T, indptr, indices, i, j)
            solves += 1
            if w is None:
                skipped += 1
                log.warning("empty cell slice for pair (%d, %d); no edge", i, j)
                continue
            if w > eps:
                continue
            weights[(i, j)] = max(w, 0.0)
            for v in ipdg.neighbors(j):
                v = int(v)
                if v not in seen:
                    seen.add(v)
                    q.append(v)
    return DomGraph(X.indices.copy(), weights, eps, ipdg.max_degree, solves, skipped)


def greedy_dominating_set(dg: DomGraph, delta: Optional[float] = None) -> List[int]:
    """Greedy set cover over Dom(t); returns positions in pick order.

    Ties on the number of newly covered vertices go to the smallest dataset
    row index.
    """
    D = dg.dom_matrix(delta)
    n = D.shape[0]
    rank = np.argsort(np.argsort(dg.vertices, kind="stable"), kind="stable")
    uncovered = np.ones(n, dtype=bool)
    picked = []
    while uncovered.any():
        gain = D[:, uncovered].sum(axis=1)
        best = gain.max()
        tied = np.flatnonzero(gain == best)
        i = int(tied[np.argmin(rank[tied])])
        picked.append(i)
        uncovered &= ~D[i]
    return picked


@dataclass
class HgrmrResult:
    epsilon: float
    indices: List[int]
    picks: List[int] = field(repr=False)
    graph: DomGraph = field(repr=False)
    delta: float = 0.0
    timings: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.indices)

    def to_dict(self):
        out = {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "size": self.size,
            "indices": [int(i) for i in self.indices],
            "wall_time_ms": 1000.0 * sum(self.timings.values()),
            "timings_ms": {k: 1000.0 * v for k, v in self.timings.items()},
            "lp_solves": self.graph.lp_solves,
            "dom_edges": len(self.graph.edges(self.delta)),
        }
        out.update(self.extra)
        return out


def default_ipdg(data, X: ExtremeSet, m: int = 1_000_000, k: int = 16, seed: int = 42) -> IpdgGraph:
    if as_points(data).shape[1] == 2 and X.ordered:
        return ipdg_exact_2d(X)
    return ipdg_approx(data, X, m=m, k=k, seed=seed)


def _rows(dg, picks):
    return sorted(int(dg.vertices[p]) for p in picks)


def hgrmr(data, X: ExtremeSet, ipdg: Optional[IpdgGraph] = None, eps: float = 0.1) -> HgrmrResult:
    """Greedy dominating set of the dominance graph at level ``eps``; always a subset of X."""
    timings = {}
    t0 = time.perf_counter()
    if ipdg is None:
        ipdg = default_ipdg(data, X)
        timings["ipdg"] = time.perf_counter() - t0
        t0 = time.perf_counter()
    dg = build_dom_graph(data, X, ipdg, eps)
    t1 = time.perf_counter()
    picks = greedy_dominating_set(dg)
    t2 = time.perf_counter()
    timings.update(domgraph=t1 - t0, greedy=t2 - t1)
    return HgrmrResult(eps, _rows(dg, picks), picks, dg, eps, timings)


def hgrmr_reuse(data, X: ExtremeSet, ipdg: Optional[IpdgGraph] = None, eps: float = 0.1,
                eta: Optional[float] = None, validate: str = "exact", m: int = 1_000_000,
                seed: int = 42, max_iter: int = 20) -> HgrmrResult:
    """Build the graph once at ``eta`` (default 3 eps), then bisect the level.

    A level delta is accepted when its greedy set has max regret <= eps
    (``validate="exact"`` uses the LP evaluator, ``"sampled"`` the sampled
    one).  The set of the largest accepted level is returned; delta = eps is
    accepted without a check since every stored weight is exact.
    """
    from .regret import estimate_max_regret, exact_max_regret

    if not 0.0 < eps < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {eps}")
    eta = min(3.0 * eps, 0.99) if eta is None else eta
    if eta < eps:
        raise ConfigError(f"eta ({eta}) must be at least epsilon ({eps})")
    if eta >= 1.0:
        raise ConfigError(f"eta must be below 1, got {eta}")
    timings = {}
    t0 = time.perf_counter()
    if ipdg is None:
        ipdg = default_ipdg(data, X)
        timings["ipdg"] = time.perf_counter() - t0
        t0 = time.perf_counter()
    dg = build_dom_graph(data, X, ipdg, eta)
    t1 = time.perf_counter()

    def ok(picks):
        rows = _rows(dg, picks)
        if validate == "exact":
            return exact_max_regret(data, rows, X, method="lp" if as_points(data).shape[1] > 2 else "auto",
                                    stop_above=eps).value <= eps + 1e-9
        if validate == "sampled":
            return estimate_max_regret(data, rows, m=m, seed=seed, X=X).value <= eps
        raise ConfigError(f"unknown validation mode {validate!r}")

    best_delta, best = eps, greedy_dominating_set(dg, eps)
    checks = 0
    if eta > eps:
        top = greedy_dominating_set(dg, eta)
        checks += 1
        if ok(top):
            best_delta, best = eta, top
        else:
            lo, hi = eps, eta
            for _ in range(max_iter):
                if hi - lo < eps / 100.0:
                    break
                mid = 0.5 * (lo + hi)
                picks = greedy_dominating_set(dg, mid)
                checks += 1
                if ok(picks):
                    lo, best_delta, best = mid, mid, picks
                else:
                    hi = mid
    t2 = time.perf_counter()
    timings.update(domgraph=t1 - t0, search=t2 - t1)
    return HgrmrResult(eps, _rows(dg, best), best, dg, best_delta, timings,
                       extra={"eta": eta, "validations": checks})


def dual_min_regret(data, X: ExtremeSet, ipdg: Optional[IpdgGraph] = None, r: int = 10,
                    cap: float = 0.99) -> HgrmrResult:
    """Smallest level delta whose greedy set has at most ``r`` points.

    The graph is built once at ``cap``; the filtered graph only changes at
    stored edge weights, so the search runs over those breakpoints.  The
    result carries ``delta`` and its exact max regret (at most delta).
    """
    from .regret import exact_max_regret

    pts = as_points(data)
    d = pts.shape[1]
    if r < d + 1:
        raise ConfigError(f"budget r={r} is below d+1={d + 1}: no such set has regret below 1")
    timings = {}
    t0 = time.perf_counter()
    if ipdg is None:
        ipdg = default_ipdg(data, X)
        timings["ipdg"] = time.perf_counter() - t0
        t0 = time.perf_counter()
    dg = build_dom_graph(data, X, ipdg, cap)
    t1 = time.perf_counter()
    levels = np.unique(np.array([0.0] + list(dg.weights.values())))
    feasible = True
    if len(greedy_dominating_set(dg, levels[-1])) > r:
        lo = hi = len(levels) - 1
        feasible = False
    else:
        lo, hi = 0, len(levels) - 1   # answer index in [lo, hi]
        while lo < hi:
            mid = (lo + hi) // 2
            if len(greedy_dominating_set(dg, levels[mid])) <= r:
                hi = mid
            else:
                lo = mid + 1
    delta = float(levels[hi])
    picks = greedy_dominating_set(dg, delta)
    rows = _rows(dg, picks)
    t2 = time.perf_counter()
    value = exact_max_regret(pts, rows, X).value
    timings.update(domgraph=t1 - t0, search=t2 - t1)
    return HgrmrResult(delta, rows, picks, dg, delta, timings,
                       extra={"r": r, "cap": cap, "feasible": feasible, "exact_max_regret": value})
