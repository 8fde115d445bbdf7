"""Points, directions, scores and the interior-origin check.

Every solver works on a :class:`Dataset`, an ``n x d`` matrix whose
coordinates lie in ``[-1, 1]``.  Utility vectors are unit directions and a
point's score under a direction is the plain inner product.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ConfigError

TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    names: Optional[tuple] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ConfigError(f"dataset must be a non-empty n x d matrix, got shape {pts.shape}")
        _require_finite(pts)
        if np.any(np.abs(pts) > 1.0 + TOL):
            raise ConfigError("dataset coordinates must lie in [-1, 1]; use normalize_dataset first")
        if self.names is not None and len(self.names) != pts.shape[1]:
            raise ConfigError("number of column names does not match dimension")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class ScoredTop:
    score: float
    index: int


@dataclass(frozen=True)
class InteriorReport:
    ok: bool
    worst_direction: np.ndarray = field(repr=False)
    worst_omega: float
    method: str
    samples: int = 0

    def to_dict(self):
        return {
            "ok": bool(self.ok),
            "worst_direction": [float(v) for v in self.worst_direction],
            "worst_omega": float(self.worst_omega),
            "method": self.method,
            "samples": int(self.samples),
        }


def _require_finite(raw):
    bad = np.argwhere(~np.isfinite(raw))
    if bad.size:
        r, c = bad[0]
        raise ConfigError(f"non-finite value at row {r}, column {c}")


def normalize_dataset(raw, names=None) -> Dataset:
    """Min-max map every column onto ``[-1, 1]``; constant columns become 0."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw.reshape(-1, 1)
    if raw.ndim != 2 or raw.shape[0] < 1 or raw.shape[1] < 1:
        raise ConfigError(f"expected a non-empty n x d matrix, got shape {raw.shape}")
    _require_finite(raw)
    lo = raw.min(axis=0)
    span = raw.max(axis=0) - lo
    out = np.zeros_like(raw)
    live = span > 0
    out[:, live] = 2.0 * (raw[:, live] - lo[live]) / span[live] - 1.0
    np.clip(out, -1.0, 1.0, out=out)
    return Dataset(out, names=names)


def as_points(data) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.points
    pts = np.asarray(data, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    return pts


def unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    norm = np.linalg.norm(x)
    if norm == 0.0:
        raise ValueError("the zero vector has no direction")
    return x / norm


def score(p, x) -> float:
    p = np.asarray(p, dtype=float)
    x = np.asarray(x, dtype=float)
    if p.shape != x.shape:
        raise ValueError(f"dimension mismatch: point {p.shape} vs direction {x.shape}")
    return float(p @ x)


def top_score(points, x, subset: Optional[Sequence[int]] = None) -> ScoredTop:
    """Best score over ``subset`` (all rows if None); ties go to the smallest index."""
    pts = as_points(points)
    idx = np.arange(pts.shape[0]) if subset is None else np.asarray(subset, dtype=np.int64)
    if idx.size == 0:
        raise ValueError("top_score needs a non-empty subset")
    x = np.asarray(x, dtype=float)
    if x.shape != (pts.shape[1],):
        raise ValueError(f"dimension mismatch: points are {pts.shape[1]}-d, direction is {x.shape}")
    s = pts[idx] @ x
    best = s.max()
    tied = idx[s >= best - TOL]
    return ScoredTop(float(best), int(tied.min()))


def angle(v) -> float:
    """Counterclockwise polar angle in ``[0, 2*pi)``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (2,):
        raise ValueError("angle is only defined for 2-d vectors")
    if v[0] == 0.0 and v[1] == 0.0:
        raise ValueError("the zero vector has no angle")
    a = math.atan2(v[1], v[0])
    if a < 0.0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


def angles(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    a = np.arctan2(pts[:, 1], pts[:, 0])
    a = np.where(a < 0.0, a + TWO_PI, a)
    return np.where(a >= TWO_PI, 0.0, a)


def in_arc(theta: float, start: float, end: float) -> bool:
    """Membership of ``theta`` in the closed arc from ``start`` CCW to ``end``."""
    if start <= end:
        return start <= theta <= end
    return theta >= start or theta <= end


def sphere_directions(rng: np.random.Generator, m: int, d: int, batch: int = 65536) -> Iterator[np.ndarray]:
    """Yield ``m`` uniform unit vectors in batches.

    Batches are consecutive draws from one stream, so the first ``m'``
    directions are the same for any ``m >= m'`` and any batch size.
    """
    done = 0
    while done < m:
        b = min(batch, m - done)
        g = rng.standard_normal((b, d))
        norms = np.linalg.norm(g, axis=1)
        # a zero draw has probability zero; keep it well-defined anyway
        norms[norms == 0.0] = 1.0
        g /= norms[:, None]
        yield g
        done += b


def convex_hull_2d(pts, collinear_tol: float = 1e-12) -> np.ndarray:
    """Monotone-chain hull: vertex indices in CCW order, collinear points dropped.

    Exact duplicate coordinates collapse onto their lowest index.
    """
    pts = np.asarray(pts, dtype=float)
    n = pts.shape[0]
    order = np.lexsort((np.arange(n), pts[:, 1], pts[:, 0]))
    keep = [order[0]]
    for i in order[1:]:
        if pts[i, 0] != pts[keep[-1], 0] or pts[i, 1] != pts[keep[-1], 1]:
            keep.append(i)
    if len(keep) <= 2:
        return np.asarray(keep, dtype=np.int64)
    xs = pts[keep, 0].tolist()
    ys = pts[keep, 1].tolist()

    def chain(seq):
        out = []
        for k in seq:
            while len(out) >= 2:
                a, b = out[-2], out[-1]
                cross = (xs[b] - xs[a]) * (ys[k] - ys[a]) - (ys[b] - ys[a]) * (xs[k] - xs[a])
                if cross <= collinear_tol:
                    out.pop()
                else:
                    break
            out.append(k)
        return out

    m = len(keep)
    lower = chain(range(m))
    upper = chain(range(m - 1, -1, -1))
    hull = lower[:-1] + upper[:-1]
    return np.asarray([keep[k] for k in hull], dtype=np.int64)


def outward_normals(poly) -> np.ndarray:
    """Unit outward normals of the edges of a CCW polygon (row i: edge i -> i+1).

    A two-vertex "polygon" is a segment and gets both of its normals.
    """
    poly = np.asarray(poly, dtype=float)
    if poly.shape[0] < 2:
        return np.zeros((0, 2))
    edge = np.roll(poly, -1, axis=0) - poly
    if poly.shape[0] == 2:
        edge = edge[:1]
    normals = np.column_stack([edge[:, 1], -edge[:, 0]])
    lens = np.linalg.norm(normals, axis=1)
    normals = normals[lens > 0] / lens[lens > 0, None]
    if poly.shape[0] == 2:
        normals = np.vstack([normals, -normals])
    return normals


def _interior_report_2d(pts) -> InteriorReport:
    hull = convex_hull_2d(pts)
    v = pts[hull]
    cands = [outward_normals(v)]
    norms = np.linalg.norm(v, axis=1)
    nz = norms > 0
    if np.any(nz):
        cands.append(-v[nz] / norms[nz, None])
    if sum(len(c) for c in cands) == 0:
        cands.append(np.array([[1.0, 0.0]]))
    dirs = np.vstack(cands)
    omega = (dirs @ v.T).max(axis=1)
    k = int(np.argmin(omega))
    # strict interiority: every hull edge must keep the origin on its inner side
    ok = len(hull) >= 3 and bool(omega[k] > TOL)
    return InteriorReport(ok, dirs[k], float(omega[k]), "exact-2d")


def check_interior_origin(data, m: int = 100_000, seed: int = 42) -> InteriorReport:
    """Is the origin strictly inside the convex hull of the data?

    Exact in 2-d (the minimum of the support function sits at an edge normal or
    at a direction opposite a vertex).  In higher dimensions the minimum top
    score is estimated over ``m`` random directions.
    """
    pts = as_points(data)
    d = pts.shape[1]
    if m < 1:
        raise ConfigError("sample count m must be >= 1")
    if d == 1:
        lo, hi = pts[:, 0].min(), pts[:, 0].max()
        if -lo <= hi:
            return InteriorReport(bool(lo < -TOL and hi > TOL), np.array([-1.0]), float(-lo), "exact-1d")
        return InteriorReport(bool(lo < -TOL and hi > TOL), np.array([1.0]), float(hi), "exact-1d")
    if d == 2:
        return _interior_report_2d(pts)
    rng = np.random.default_rng(seed)
    worst, worst_dir = math.inf, None
    for dirs in sphere_directions(rng, m, d, batch=max(1, min(65536, 2_000_000 // max(1, pts.shape[0])))):
        omega = (dirs @ pts.T).max(axis=1)
        k = int(np.argmin(omega))
        if omega[k] < worst:
            worst, worst_dir = float(omega[k]), dirs[k].copy()
    return InteriorReport(bool(worst > TOL), worst_dir, worst, "sampled", samples=m)


def _numeric(field):
    try:
        float(field)
    except ValueError:
        return False
    return True


def read_csv(path, header: Optional[bool] = None, columns: Optional[Sequence] = None,
             normalize: bool = True) -> Dataset:
    """Load a row-major point file; lines starting with ``#`` are comments.

    ``header=None`` treats the first row as column names when any of its
    fields is non-numeric.  ``columns`` selects attributes by header name or 0-based position.  Rows
    whose field count differs from the first row are rejected.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.lstrip().startswith("#")]
    rows = [r for r in csv.reader(lines) if r and any(c.strip() for c in r)]
    if header is None:
        header = bool(rows) and not all(_numeric(c) for c in rows[0])
    if header:
        if not rows:
            raise ConfigError(f"{path}: empty file")
        names, rows = [c.strip() for c in rows[0]], rows[1:]
    else:
        names = None
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    width = len(names) if names is not None else len(rows[0])
    for lineno, r in enumerate(rows, start=2 if header else 1):
        if len(r) != width:
            raise ConfigError(f"{path}: line {lineno} has {len(r)} fields, expected {width}")
    if columns:
        sel = []
        for c in columns:
            if isinstance(c, str) and not c.lstrip("-").isdigit():
                if names is None or c not in names:
                    raise ConfigError(f"{path}: unknown column {c!r}")
                sel.append(names.index(c))
            else:
                ci = int(c)
                if not 0 <= ci < width:
                    raise ConfigError(f"{path}: column index {ci} out of range")
                sel.append(ci)
    else:
        sel = list(range(width))
    try:
        raw = np.array([[float(r[c]) for c in sel] for r in rows], dtype=float)
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric field ({exc})") from None
    picked = None if names is None else tuple(names[c] for c in sel)
    if normalize:
        return normalize_dataset(raw, names=picked)
    return Dataset(raw, names=picked)


def write_csv(path, data, names=None, comment: Optional[str] = None):
    pts = as_points(data)
    if names is None and isinstance(data, Dataset) and data.names is not None:
        names = data.names
    if names is None:
        names = [f"a{i}" for i in range(pts.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in pts:
            w.writerow([repr(float(v)) for v in row])
