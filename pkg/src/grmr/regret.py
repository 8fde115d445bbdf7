"""Regret ratios of a subset: pointwise, sampled, and exact."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConditionOneError, ConfigError
from .extremes import ExtremeSet, extreme_points
from .geometry import as_points, convex_hull_2d, outward_normals, sphere_directions
from .lp import maximize

CELL_TRIGGER = 1.0 - 1e-9


@dataclass
class RegretReport:
    value: float
    witness: np.ndarray = field(repr=False)
    method: str
    samples: int = 0
    complete: bool = True

    @property
    def exceeds_one(self) -> bool:
        return self.value > 1.0

    def to_dict(self):
        value = self.value if math.isfinite(self.value) else ">1"
        return {
            "value": value,
            "witness": [float(v) for v in self.witness],
            "method": self.method,
            "samples": int(self.samples),
        }


def _subset(pts, Q):
    Q = np.asarray(list(Q) if not isinstance(Q, np.ndarray) else Q, dtype=np.int64).ravel()
    if Q.size == 0:
        raise ConfigError("Q must be non-empty")
    if Q.min() < 0 or Q.max() >= pts.shape[0]:
        raise ConfigError("Q contains an out-of-range index")
    return Q


def _reference(pts, X):
    return pts if X is None else pts[X.indices]


def regret_ratio(data, Q, x, X: Optional[ExtremeSet] = None) -> float:
    """``1 - omega(x, Q) / omega(x, P)``; values above 1 mean Q's best score is negative."""
    pts = as_points(data)
    Q = _subset(pts, Q)
    x = np.asarray(x, dtype=float)
    top = float((_reference(pts, X) @ x).max())
    if top <= 0.0:
        raise ConditionOneError(f"omega(x, P) = {top:.3g} <= 0 at direction {x.tolist()}",
                                direction=x, omega=top)
    return 1.0 - float((pts[Q] @ x).max()) / top


def _ratios(ref, sub, dirs):
    top = (dirs @ ref.T).max(axis=1)
    bad = np.flatnonzero(top <= 0.0)
    if bad.size:
        k = int(bad[0])
        raise ConditionOneError(f"omega(x, P) = {top[k]:.3g} <= 0 at direction {dirs[k].tolist()}",
                                direction=dirs[k], omega=float(top[k]))
    return 1.0 - (dirs @ sub.T).max(axis=1) / top


def estimate_max_regret(data, Q, m: int = 1_000_000, seed: int = 42,
                        X: Optional[ExtremeSet] = None) -> RegretReport:
    """Largest regret ratio over ``m`` uniform directions (fixed stream per seed)."""
    if m < 1:
        raise ConfigError("sample count m must be >= 1")
    pts = as_points(data)
    Q = _subset(pts, Q)
    ref = _reference(pts, X)
    sub = pts[Q]
    rng = np.random.default_rng(seed)
    best, witness = -math.inf, None
    batch = max(256, min(65536, 4_000_000 // max(1, ref.shape[0] + sub.shape[0])))
    for dirs in sphere_directions(rng, m, pts.shape[1], batch=batch):
        r = _ratios(ref, sub, dirs)
        k = int(np.argmax(r))
        if r[k] > best:
            best, witness = float(r[k]), dirs[k].copy()
    return RegretReport(best, witness, "sampled", samples=m)


def _exact_2d(pts, Q, X):
    ref = pts[X.indices]
    sub = pts[Q]
    hull_x = ref if X.ordered else ref[convex_hull_2d(ref)]
    hull_q = sub[convex_hull_2d(sub)]
    # on every arc between consecutive breakpoints of either support function
    # the ratio of two sinusoids is monotone, so the maximum sits on a breakpoint
    dirs = np.vstack([outward_normals(hull_x), outward_normals(hull_q)])
    r = _ratios(ref, sub, dirs)
    k = int(np.argmax(r))
    return RegretReport(float(r[k]), dirs[k].copy(), "exact-2d")


def _cell_lp(t, sub, walls=None):
    """max 1 - y  s.t.  <q, x> <= y for q in sub, <t, x> = 1, optional cell walls."""
    d = t.size
    G = np.hstack([sub, -np.ones((sub.shape[0], 1))])
    h = np.zeros(sub.shape[0])
    if walls is not None and walls.shape[0]:
        G = np.vstack([G, np.hstack([walls - t, np.zeros((walls.shape[0], 1))])])
        h = np.zeros(G.shape[0])
    c = np.zeros(d + 1)
    c[d] = -1.0
    E = np.append(t, 0.0).reshape(1, -1)
    out = maximize(c, G, h, E, np.ones(1))
    if out.status == "unbounded":
        return math.inf, None
    if not out.optimal:
        return None, None
    return 1.0 + out.value, out.solution[:d]


def _exact_lp(pts, Q, X, stop_above=None):
    ref = pts[X.indices]
    sub = pts[Q]
    inq = set(Q.tolist())
    best, witness, complete = 0.0, None, True
    for j, row in enumerate(X.indices.tolist()):
        if row in inq:
            continue
        t = ref[j]
        # without walls the LP bounds the regret over the whole half-space
        # <t, x> > 0; that bound is exact whenever it stays below 1
        val, x = _cell_lp(t, sub)
        if val is None or val >= CELL_TRIGGER:
            walls = np.delete(ref, j, axis=0)
            val, x = _cell_lp(t, sub, walls)
            if val is None:
                continue
        if val > best or witness is None:
            best = val
            witness = x if x is not None else t
        if stop_above is not None and best > stop_above:
            complete = False
            break
    if witness is None:
        witness = ref[0]
    norm = np.linalg.norm(witness)
    witness = witness / norm if norm > 0 else witness
    return RegretReport(float(best), witness, "exact-lp", complete=complete)


def exact_max_regret(data, Q, X: Optional[ExtremeSet] = None, method: str = "auto",
                     stop_above: Optional[float] = None) -> RegretReport:
    """Exact maximum regret ratio of ``Q``.

    ``method``: ``"arc"`` (2-d breakpoint sweep), ``"lp"`` (one LP per extreme
    point's Voronoi cell) or ``"auto"`` (arc in 2-d, LP otherwise).  With
    ``stop_above`` the LP route returns as soon as the running maximum passes
    the threshold; the report is then marked incomplete.
    """
    pts = as_points(data)
    Q = _subset(pts, Q)
    if X is None:
        X = extreme_points(pts)
    d = pts.shape[1]
    if method == "auto":
        method = "arc" if d == 2 else "lp"
    if method == "arc":
        if d != 2:
            raise ConfigError("the arc sweep only applies to 2-d data")
        return _exact_2d(pts, Q, X)
    if method == "lp":
        return _exact_lp(pts, Q, X, stop_above)
    raise ConfigError(f"unknown method {method!r}")
