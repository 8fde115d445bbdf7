"""Exact minimum epsilon-regret sets in two dimensions.

Three steps: keep only points whose epsilon-approximate cell is non-empty,
link candidate pairs whose in-between extreme points cost at most epsilon
when dropped, and return the shortest directed cycle of that graph.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .errors import ConditionOneError, ConfigError
from .extremes import ExtremeSet, extreme_points_2d, order_by_angle
from .geometry import TOL, TWO_PI, angles, as_points, outward_normals


def _check_eps(eps):
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {eps}")


def boundary_vectors(hull_pts) -> np.ndarray:
    """Row i is the unit vector on which t_i and t_{i+1} tie with a positive score."""
    hull_pts = np.asarray(hull_pts, dtype=float)
    if hull_pts.shape[0] < 3:
        raise ConditionOneError("fewer than three extreme points: the origin cannot be interior")
    normals = outward_normals(hull_pts)
    if normals.shape[0] != hull_pts.shape[0]:
        raise ConfigError("extreme points contain repeated coordinates")
    s = np.einsum("ij,ij->i", hull_pts, normals)
    bad = np.flatnonzero(s <= TOL)
    if bad.size:
        k = int(bad[0])
        raise ConditionOneError(
            f"boundary vector {k} scores {s[k]:.3g} <= 0: origin not strictly inside the hull",
            direction=normals[k], omega=float(s[k]))
    return normals


@dataclass
class CandidateSet:
    indices: np.ndarray            # dataset rows, CCW
    extreme_pos: np.ndarray        # positions in ``indices`` that are extreme points
    boundary: np.ndarray = field(repr=False)

    def __len__(self):
        return int(self.indices.size)


def select_candidates(data, X: ExtremeSet, eps: float, search: str = "scan",
                      chunk: int = 200_000) -> CandidateSet:
    """Extreme points plus every point within (1 - eps) of the top score on some boundary vector.

    ``search="bisect"`` checks a single boundary vector per point: the normal
    of the hull edge crossed by the ray from the origin through the point,
    which is where ``<p, x> / omega(x, P)`` peaks.  ``"scan"`` checks them all.
    """
    _check_eps(eps)
    pts = as_points(data)
    if not X.ordered:
        X = ExtremeSet(order_by_angle(pts, X.indices), ordered=True, source=X.source)
    T = pts[X.indices]
    B = boundary_vectors(T)
    thresh = (1.0 - eps) * np.einsum("ij,ij->i", T, B) - 1e-12
    is_ext = np.zeros(pts.shape[0], dtype=bool)
    is_ext[X.indices] = True
    rest = np.flatnonzero(~is_ext)
    keep = []
    if search == "scan":
        for s in range(0, rest.size, chunk):
            idx = rest[s:s + chunk]
            hit = (pts[idx] @ B.T >= thresh).any(axis=1)
            keep.append(idx[hit])
    elif search == "bisect":
        theta_t = angles(T)
        for s in range(0, rest.size, chunk):
            idx = rest[s:s + chunk]
            p = pts[idx]
            nz = np.any(p != 0.0, axis=1)
            th = angles(p)
            # edge k joins t_k and t_{k+1}; the ray at angle th crosses the edge
            # whose start is the last vertex at or before th (cyclically)
            k = (np.searchsorted(theta_t, th, side="right") - 1) % T.shape[0]
            hit = np.einsum("ij,ij->i", p, B[k]) >= thresh[k]
            keep.append(idx[hit & nz])
    else:
        raise ConfigError(f"unknown search mode {search!r}")
    extra = np.concatenate(keep) if keep else np.zeros(0, dtype=np.int64)
    S = order_by_angle(pts, np.concatenate([X.indices, extra]))
    pos = np.flatnonzero(is_ext[S])
    return CandidateSet(S, pos, B)


def tie_vector(a, b, normalize: bool = True) -> np.ndarray:
    """x with <a, x> = <b, x> >= 0; unit length unless ``normalize`` is False,
    in which case it is the perpendicular of a - b with the same length."""
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    x = np.array([diff[1], -diff[0]])
    norm = math.hypot(x[0], x[1])
    if norm == 0.0:
        raise ValueError("tie vector of identical points is undefined")
    if normalize:
        x /= norm
    if float(np.dot(a, x)) < 0.0:
        x = -x
    return x


def compute_pair_regret(si, sj, between) -> float:
    """Regret of keeping only ``si``, ``sj`` over the extreme points strictly between them.

    ``between`` holds those extreme points (possibly none).  The caller is
    responsible for the angular span being below pi.
    """
    between = np.asarray(between, dtype=float).reshape(-1, 2)
    if between.shape[0] == 0:
        return 0.0
    x = tie_vector(si, sj)
    top = float((between @ x).max())
    if top <= 0.0:
        return math.inf
    return 1.0 - float(np.dot(si, x)) / top


@dataclass
class ArcGraph:
    """Directed graph over candidate positions, stored as CSR with sorted rows."""

    size: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_lists(cls, size, adj, weights=None):
        weights = weights or {}
        indptr = np.zeros(size + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        rows = [sorted(int(j) for j in a) for a in adj]
        indices = np.array([j for r in rows for j in r], dtype=np.int64)
        values = np.array([weights.get((i, j), 0.0) for i, r in enumerate(rows) for j in r], dtype=float)
        return cls(size, indptr, indices, values)

    @property
    def n_edges(self):
        return int(self.indices.size)

    @property
    def adj(self) -> List[np.ndarray]:
        return [self.indices[self.indptr[i]:self.indptr[i + 1]] for i in range(self.size)]

    def _slot(self, i, j):
        lo, hi = self.indptr[i], self.indptr[i + 1]
        k = lo + int(np.searchsorted(self.indices[lo:hi], j))
        return k if k < hi and self.indices[k] == j else -1

    def has_edge(self, i, j):
        return self._slot(i, j) >= 0

    def weight(self, i, j) -> float:
        k = self._slot(i, j)
        if k < 0:
            raise KeyError((i, j))
        return float(self.values[k])


@numba.njit(cache=True)
def _pair_regret(S, ext_pos, i, j, lo_a, hi_a, lo_b, hi_b):
    """Numba twin of compute_pair_regret over ext_pos[lo_a:hi_a] and ext_pos[lo_b:hi_b]."""
    if hi_a - lo_a + hi_b - lo_b == 0:
        return 0.0
    dx = S[i, 0] - S[j, 0]
    dy = S[i, 1] - S[j, 1]
    x0, x1 = dy, -dx
    norm = math.hypot(x0, x1)
    x0 /= norm
    x1 /= norm
    if S[i, 0] * x0 + S[i, 1] * x1 < 0.0:
        x0, x1 = -x0, -x1
    top = -np.inf
    for r in range(lo_a, hi_a):
        t = ext_pos[r]
        top = max(top, S[t, 0] * x0 + S[t, 1] * x1)
    for r in range(lo_b, hi_b):
        t = ext_pos[r]
        top = max(top, S[t, 0] * x0 + S[t, 1] * x1)
    if top <= 0.0:
        return np.inf
    return 1.0 - (S[i, 0] * x0 + S[i, 1] * x1) / top


@numba.njit(cache=True)
def _arc_edges(S, theta, ext_pos, eps):
    k = S.shape[0]
    ne = ext_pos.size
    cap = 8 * k + 16
    src = np.empty(cap, dtype=np.int64)
    dst = np.empty(cap, dtype=np.int64)
    val = np.empty(cap)
    m = 0
    for i in range(k):
        for off in range(1, k):
            j = (i + off) % k
            span = theta[j] - theta[i]
            if j <= i:
                span += 2.0 * np.pi
            if span >= np.pi - 1e-12:
                break
            # extreme points strictly between i and j, walking CCW
            if j > i:
                lo_a = np.searchsorted(ext_pos, i, side="right")
                hi_a = np.searchsorted(ext_pos, j, side="left")
                lo_b, hi_b = 0, 0
            else:
                lo_a = np.searchsorted(ext_pos, i, side="right")
                hi_a = ne
                lo_b = 0
                hi_b = np.searchsorted(ext_pos, j, side="left")
            l_ij = _pair_regret(S, ext_pos, i, j, lo_a, hi_a, lo_b, hi_b)
            if l_ij <= eps + 1e-12:
                if m == cap:
                    cap *= 2
                    src2 = np.empty(cap, dtype=np.int64)
                    dst2 = np.empty(cap, dtype=np.int64)
                    val2 = np.empty(cap)
                    src2[:m] = src[:m]
                    dst2[:m] = dst[:m]
                    val2[:m] = val[:m]
                    src, dst, val = src2, dst2, val2
                src[m] = i
                dst[m] = j
                val[m] = l_ij
                m += 1
    return src[:m], dst[:m], val[:m]


def build_arc_graph(data, cand: CandidateSet, eps: float) -> ArcGraph:
    """Edge (i -> j) between candidate positions when the CCW span is below pi
    and dropping everything strictly between costs at most ``eps``."""
    pts = as_points(data)
    S = np.ascontiguousarray(pts[cand.indices])
    k = S.shape[0]
    theta = angles(S)
    src, dst, val = _arc_edges(S, theta, np.ascontiguousarray(cand.extreme_pos, dtype=np.int64), float(eps))
    order = np.lexsort((dst, src))
    indptr = np.zeros(k + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(src, minlength=k))
    return ArcGraph(k, indptr, dst[order], val[order])


@numba.njit(cache=True)
def _expand(A, frontier, nf, seen, out):
    """OR the rows of ``frontier[:nf]``, keep the unseen bits, list them in ``out``."""
    W = A.shape[1]
    cnt = 0
    for w in range(W):
        acc = np.uint64(0)
        for q in range(nf):
            acc |= A[frontier[q], w]
        acc &= ~seen[w]
        if acc:
            seen[w] |= acc
            for b in range(64):
                if (acc >> np.uint64(b)) & np.uint64(1):
                    out[cnt] = w * 64 + b
                    cnt += 1
    return cnt


@numba.njit(cache=True)
def _shortest_cycle(indptr, indices, k):
    """(length, start) of a shortest directed cycle; start is the smallest vertex on one."""
    W = (k + 63) // 64
    A = np.zeros((k, W), dtype=np.uint64)
    indeg = np.zeros(k, dtype=np.int64)
    for u in range(k):
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            A[u, v // 64] |= np.uint64(1) << np.uint64(v % 64)
            indeg[v] += 1
    into = np.zeros(k, dtype=np.bool_)
    seen = np.zeros(W, dtype=np.uint64)
    frontier = np.empty(k, dtype=np.int64)
    nxt = np.empty(k, dtype=np.int64)
    best, best_s = k + 1, -1
    for s in range(k):
        if indeg[s] == 0:
            continue
        for e in range(k):
            into[e] = False
        for u in range(k):
            # u -> s ?
            lo, hi = indptr[u], indptr[u + 1]
            p = np.searchsorted(indices[lo:hi], s)
            if p < hi - lo and indices[lo + p] == s:
                into[u] = True
        seen[:] = 0
        seen[s // 64] |= np.uint64(1) << np.uint64(s % 64)
        frontier[0] = s
        nf = 1
        # frontier holds vertices at distance L - 2; a cycle of L vertices closes
        # from distance L - 1
        for L in range(2, best):
            nf = _expand(A, frontier, nf, seen, nxt)
            if nf == 0:
                break
            hit = False
            for q in range(nf):
                if into[nxt[q]]:
                    hit = True
                    break
            if hit:
                best, best_s = L, s
                break
            frontier[:nf] = nxt[:nf]
    return best, best_s


@numba.njit(cache=True)
def _cycle_from(indptr, indices, k, s):
    """BFS from s over sorted rows; path of the first vertex found with an edge back to s."""
    parent = np.full(k, -2, dtype=np.int64)
    queue = np.empty(k, dtype=np.int64)
    parent[s] = -1
    queue[0] = s
    head, tail = 0, 1
    closing = -1
    while head < tail and closing < 0:
        u = queue[head]
        head += 1
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if v == s:
                closing = u
                break
            if parent[v] == -2:
                parent[v] = u
                queue[tail] = v
                tail += 1
    n = 0
    u = closing
    while u != -1:
        queue[n] = u
        n += 1
        u = parent[u]
    return queue[:n][::-1].copy()


def shortest_cycle(g: ArcGraph) -> List[int]:
    """Directed cycle with the fewest vertices.

    Ties go to the smallest vertex lying on a shortest cycle, then to the path
    a BFS from it over sorted adjacency discovers first.  Lengths come from
    bitset reachability, so dense graphs cost O(k^2 * k/64) word operations
    in the worst case instead of a BFS over every edge per start vertex.
    """
    if g.n_edges == 0:
        raise ValueError("graph has no directed cycle")
    length, s = _shortest_cycle(g.indptr, g.indices, g.size)
    if s < 0:
        raise ValueError("graph has no directed cycle")
    path = [int(v) for v in _cycle_from(g.indptr, g.indices, g.size, s)]
    assert len(path) == length
    return path


@dataclass
class EgrmrResult:
    epsilon: float
    indices: List[int]
    candidates: CandidateSet = field(repr=False)
    graph: ArcGraph = field(repr=False)
    timings: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.indices)

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "size": self.size,
            "indices": [int(i) for i in self.indices],
            "wall_time_ms": 1000.0 * sum(self.timings.values()),
            "timings_ms": {k: 1000.0 * v for k, v in self.timings.items()},
            "candidates": len(self.candidates),
            "arcs": self.graph.n_edges,
        }


def egrmr(data, eps: float, X: Optional[ExtremeSet] = None, search: str = "scan") -> EgrmrResult:
    """Minimum-size eps-regret set of a 2-d dataset."""
    _check_eps(eps)
    pts = as_points(data)
    if pts.shape[1] != 2:
        raise ConfigError(f"E-GRMR needs 2-d data, got d={pts.shape[1]}")
    timings = {}
    t0 = time.perf_counter()
    if X is None:
        X = extreme_points_2d(pts)
        timings["extremes"] = time.perf_counter() - t0
        t0 = time.perf_counter()
    cand = select_candidates(pts, X, eps, search=search)
    t1 = time.perf_counter()
    g = build_arc_graph(pts, cand, eps)
    t2 = time.perf_counter()
    cycle = shortest_cycle(g)
    t3 = time.perf_counter()
    timings.update(candidates=t1 - t0, graph=t2 - t1, cycle=t3 - t2)
    rows = sorted(int(cand.indices[p]) for p in cycle)
    return EgrmrResult(eps, rows, cand, g, timings)


def dual_min_regret_2d(data, r: int, X: Optional[ExtremeSet] = None, iters: int = 40):
    """Smallest epsilon whose optimal 2-d solution has at most ``r`` points.

    Optimal sizes are non-increasing in epsilon, so bisection applies; the
    returned epsilon is the exact max regret of the set found.
    """
    from .regret import exact_max_regret

    pts = as_points(data)
    if X is None:
        X = extreme_points_2d(pts)
    if r < 3:
        raise ConfigError("in 2-d no set of fewer than 3 points has regret below 1")
    if len(X) <= r:
        return 0.0, sorted(int(i) for i in X.indices)
    # r extreme points spread evenly around the hull give a cheap upper bound;
    # starting near 1 instead makes every point a candidate
    nx = len(X)
    hi = 1.0 - 1e-12
    for shift in range(min(r, 8)):
        pos = (np.floor(np.arange(r) * nx / r).astype(np.int64) + shift) % nx
        v = exact_max_regret(pts, X.indices[pos], X).value
        if v < hi:
            hi = v + 1e-12
    lo = 0.0
    best = egrmr(pts, min(hi, 1.0 - 1e-12), X)
    if best.size > r:
        raise ConfigError(f"no eps-regret set with eps < 1 has at most {r} points")
    for _ in range(iters):
        if hi - lo < 1e-10:
            break
        mid = 0.5 * (lo + hi)
        res = egrmr(pts, mid, X)
        if res.size <= r:
            hi, best = mid, res
        else:
            lo = mid
    value = exact_max_regret(pts, best.indices, X).value
    return value, best.indices
