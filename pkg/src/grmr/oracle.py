"""Brute-force minimum epsilon-regret sets for small instances.

Subsets are tried in increasing size, each size in colex order, and the
first one within epsilon wins.  In 2-d the universe is every point whose
epsilon-approximate cell is non-empty (an optimal set never needs anything
else) and regret is evaluated exactly over a finite direction set; in
higher dimensions the universe is the extreme points and each subset goes
through the LP evaluator, so the answer is optimal over X only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.spatial import ConvexHull

from .errors import ConditionOneError, ConfigError
from .geometry import as_points

SLACK = 1e-12


@dataclass
class OracleResult:
    size: Optional[int]
    subset: List[int]
    regret: Optional[float]
    evaluated: int
    universe: List[int] = field(repr=False, default_factory=list)
    scope: str = "optimal"
    cap_reached: bool = False

    def to_dict(self):
        return {"size": self.size, "subset": self.subset, "regret": self.regret,
                "evaluated": self.evaluated, "universe_size": len(self.universe),
                "scope": self.scope, "cap_reached": self.cap_reached}


def colex(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """k-subsets of range(n) in colexicographic order."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, n):
        for rest in colex(top, k - 1):
            yield rest + (top,)


def _hull_2d(pts):
    """Outward unit normals and offsets of the facets of CH(pts), via qhull."""
    try:
        hull = ConvexHull(pts)
    except Exception as exc:   # qhull raises its own error type on flat input
        raise ConditionOneError(f"degenerate hull: {exc}") from None
    A = hull.equations[:, :-1]
    b = -hull.equations[:, -1]
    if np.any(b <= 0.0):
        raise ConditionOneError("origin is not strictly inside the convex hull")
    return hull.vertices, A, b


def _universe_2d(pts, eps):
    verts, A, b = _hull_2d(pts)
    # <p, x> / omega(x, P) peaks on a hull facet normal
    ratio = (pts @ A.T / b).max(axis=1)
    keep = ratio >= 1.0 - eps - SLACK
    keep[verts] = True
    return np.flatnonzero(keep), A, b


def _directions_2d(U, A):
    """Every breakpoint of a support function over subsets of U, plus P's."""
    dirs = [A]
    if U.shape[0] >= 2:
        i, j = np.triu_indices(U.shape[0], k=1)
        e = U[j] - U[i]
        nrm = np.column_stack([e[:, 1], -e[:, 0]])
        lens = np.linalg.norm(nrm, axis=1)
        nrm = nrm[lens > 0] / lens[lens > 0, None]
        dirs += [nrm, -nrm]
    return np.vstack(dirs)


def brute_force_grmr(data, eps: float, size_cap: Optional[int] = None,
                     batch: int = 20000) -> OracleResult:
    """Smallest eps-regret set by exhaustive search (see module docstring)."""
    if not 0.0 < eps < 1.0:
        raise ConfigError(f"epsilon must lie in (0, 1), got {eps}")
    pts = as_points(data)
    d = pts.shape[1]
    if d == 2:
        return _brute_2d(pts, eps, size_cap, batch)
    return _brute_hd(pts, eps, size_cap)


def _brute_2d(pts, eps, size_cap, batch):
    uni, A, b = _universe_2d(pts, eps)
    U = pts[uni]
    D = _directions_2d(U, A)
    top = (D @ pts.T).max(axis=1)
    if np.any(top <= 0.0):
        raise ConditionOneError("omega(x, P) <= 0 for some direction")
    S = D @ U.T                                   # |D| x |U|
    n = uni.size
    cap = n if size_cap is None else min(size_cap, n)
    evaluated = 0
    for k in range(3, cap + 1):
        gen = colex(n, k)
        while True:
            chunk = list(itertools.islice(gen, batch))
            if not chunk:
                break
            idx = np.asarray(chunk, dtype=np.int64)          # B x k
            best = S[:, idx].max(axis=2)                     # |D| x B
            reg = (1.0 - best / top[:, None]).max(axis=0)    # B
            evaluated += idx.shape[0]
            ok = np.flatnonzero(reg <= eps + SLACK)
            if ok.size:
                w = int(ok[0])
                subset = sorted(int(uni[t]) for t in idx[w])
                return OracleResult(k, subset, float(reg[w]), evaluated, uni.tolist(), "optimal")
    return OracleResult(None, [], None, evaluated, uni.tolist(), "optimal", cap_reached=cap < n)


def _brute_hd(pts, eps, size_cap):
    from .extremes import ExtremeSet
    from .regret import exact_max_regret

    d = pts.shape[1]
    try:
        verts = np.sort(ConvexHull(pts).vertices)
    except Exception as exc:
        raise ConditionOneError(f"degenerate hull: {exc}") from None
    X = ExtremeSet(verts)
    n = verts.size
    cap = n if size_cap is None else min(size_cap, n)
    evaluated = 0
    for k in range(d + 1, cap + 1):
        for comb in colex(n, k):
            rows = verts[list(comb)]
            evaluated += 1
            rep = exact_max_regret(pts, rows, X, method="lp", stop_above=eps + SLACK)
            if rep.value <= eps + SLACK:
                return OracleResult(k, sorted(int(r) for r in rows), rep.value, evaluated,
                                    verts.tolist(), "optimal over X")
    return OracleResult(None, [], None, evaluated, verts.tolist(), "optimal over X",
                        cap_reached=cap < n)
