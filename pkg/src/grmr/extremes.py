"""Extreme points (convex-hull vertices) of a dataset."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .geometry import TOL, angles, as_points, convex_hull_2d, sphere_directions
from .lp import is_feasible_standard

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtremeSet:
    """Row indices of the hull vertices.

    In 2-d ``indices`` is in counterclockwise order of polar angle, starting
    from the smallest angle; otherwise it is ascending.
    """

    indices: np.ndarray
    ordered: bool = False
    source: str = field(default="computed", compare=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return int(self.indices.size)

    def __iter__(self):
        return iter(self.indices.tolist())

    def points(self, data) -> np.ndarray:
        return as_points(data)[self.indices]

    def position(self) -> dict:
        """Map from dataset row index to position in this set."""
        return {int(i): k for k, i in enumerate(self.indices)}


def order_by_angle(pts, idx) -> np.ndarray:
    """Sort ``idx`` CCW by angle; equal angles by decreasing norm, then index."""
    idx = np.asarray(idx, dtype=np.int64)
    sub = pts[idx]
    theta = angles(sub)
    norm = np.hypot(sub[:, 0], sub[:, 1])
    return idx[np.lexsort((idx, -norm, theta))]


def extreme_points_2d(data) -> ExtremeSet:
    pts = as_points(data)
    if pts.shape[1] != 2:
        raise ConfigError(f"extreme_points_2d needs 2-d data, got d={pts.shape[1]}")
    hull = convex_hull_2d(pts)
    return ExtremeSet(order_by_angle(pts, hull), ordered=True)


def _dedup(pts) -> np.ndarray:
    """Lowest row index of every distinct coordinate vector, ascending."""
    _, first = np.unique(pts, axis=0, return_index=True)
    return np.sort(first)


def is_extreme(pts, i, others) -> bool:
    """True iff no convex combination of ``pts[others]`` reproduces ``pts[i]``."""
    Q = pts[others]
    A = np.vstack([Q.T, np.ones(Q.shape[0])])
    b = np.append(pts[i], 1.0)
    return not is_feasible_standard(A, b)


def extreme_points_hd(data, seed: int = 0, probe: int = 2048) -> ExtremeSet:
    """Per-point LP vertex test.

    Points that are the unique maximiser of a random direction are vertices
    outright.  Every other point is first tested against the hull of those
    certified vertices (membership there proves it interior) and only then
    against all points not yet ruled out; dropping a known non-vertex never
    changes the answer for the remaining points.
    """
    pts = as_points(data)
    n, d = pts.shape
    uniq = _dedup(pts)
    if uniq.size <= d:
        return ExtremeSet(uniq, ordered=False)
    U = pts[uniq]
    certified = np.zeros(uniq.size, dtype=bool)
    rng = np.random.default_rng(seed)
    for dirs in sphere_directions(rng, probe, d, batch=max(1, 1_000_000 // uniq.size)):
        s = dirs @ U.T
        top = np.argmax(s, axis=1)
        part = np.partition(s, -2, axis=1)
        margin = part[:, -1] - part[:, -2]
        certified[top[margin > 1e-9]] = True
    alive = np.ones(uniq.size, dtype=bool)
    cert_idx = np.flatnonzero(certified)
    for k in range(uniq.size):
        if certified[k]:
            continue
        if cert_idx.size > d and not is_extreme(U, k, cert_idx):
            alive[k] = False
            continue
        others = np.flatnonzero(alive)
        others = others[others != k]
        if not is_extreme(U, k, others):
            alive[k] = False
    return ExtremeSet(uniq[alive], ordered=False)


def extreme_points(data) -> ExtremeSet:
    pts = as_points(data)
    return extreme_points_2d(pts) if pts.shape[1] == 2 else extreme_points_hd(pts)


def write_extremes(path, ext: ExtremeSet):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in ext.indices:
            fh.write(f"{int(i)}\n")


def load_extremes(path, data, spot_check: int = 10, seed: int = 0) -> ExtremeSet:
    """Read one 0-based row index per line and spot-check the vertex property."""
    pts = as_points(data)
    idx = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                i = int(s)
            except ValueError:
                raise ConfigError(f"{path}: line {lineno} is not an integer index") from None
            if not 0 <= i < pts.shape[0]:
                raise ConfigError(f"{path}: index {i} on line {lineno} is out of range")
            idx.append(i)
    if not idx:
        raise ConfigError(f"{path}: no extreme-point indices")
    idx = np.asarray(idx, dtype=np.int64)
    if np.unique(idx).size != idx.size:
        raise ConfigError(f"{path}: duplicate indices")
    rng = np.random.default_rng(seed)
    picks = rng.choice(idx.size, size=min(spot_check, idx.size), replace=False)
    everyone = np.arange(pts.shape[0])
    for k in picks:
        i = int(idx[k])
        others = everyone[np.any(np.abs(pts - pts[i]) > 0, axis=1)]
        if others.size and not is_extreme(pts, i, others):
            raise ConfigError(f"{path}: row {i} is not a vertex of the convex hull")
    if pts.shape[1] == 2:
        return ExtremeSet(order_by_angle(pts, idx), ordered=True, source="loaded")
    return ExtremeSet(np.sort(idx), ordered=False, source="loaded")
