"""Inner-product Delaunay graph over the extreme points.

Two extreme points are adjacent when their Voronoi cells (the directions on
which each one scores highest) share a boundary.  In 2-d this is the hull
cycle.  In higher dimensions it is approximated by sampling directions and
linking the top-ranked point to the rest of the top-k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

from .errors import ConfigError
from .extremes import ExtremeSet
from .geometry import as_points, sphere_directions


@dataclass
class IpdgGraph:
    """Undirected graph on positions 0..len(X)-1 of an ExtremeSet."""

    vertices: np.ndarray                 # dataset rows of the extreme points
    adj: List[np.ndarray] = field(repr=False)
    exact: bool = False
    m: Optional[int] = None
    k: Optional[int] = None
    seed: Optional[int] = None

    @classmethod
    def from_edges(cls, vertices, edges, **meta):
        vertices = np.asarray(vertices, dtype=np.int64)
        nv = vertices.size
        nbrs = [set() for _ in range(nv)]
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                continue
            if not (0 <= a < nv and 0 <= b < nv):
                raise ConfigError(f"edge ({a}, {b}) references a missing vertex")
            nbrs[a].add(b)
            nbrs[b].add(a)
        adj = [np.array(sorted(s), dtype=np.int64) for s in nbrs]
        return cls(vertices, adj, **meta)

    def __len__(self):
        return int(self.vertices.size)

    def neighbors(self, i) -> np.ndarray:
        return self.adj[i]

    def csr(self):
        """(indptr, indices) arrays of the adjacency lists."""
        indptr = np.zeros(len(self.adj) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in self.adj])
        indices = np.concatenate(self.adj) if self.adj else np.zeros(0, dtype=np.int64)
        return indptr, indices.astype(np.int64)

    def edges(self):
        """Sorted (i, j) pairs with i < j."""
        return [(i, int(j)) for i, a in enumerate(self.adj) for j in a if j > i]

    @property
    def n_edges(self):
        return sum(len(a) for a in self.adj) // 2

    @property
    def max_degree(self):
        return max((len(a) for a in self.adj), default=0)

    def header(self):
        return {"exact": self.exact, "m": self.m, "k": self.k, "seed": self.seed,
                "vertices": [int(v) for v in self.vertices]}

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# " + json.dumps(self.header()) + "\n")
            for i, j in self.edges():
                fh.write(f"{i} {j}\n")

    @classmethod
    def read(cls, path):
        head, edges = None, []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                s = line.strip()
                if not s:
                    continue
                if s.startswith("#"):
                    head = json.loads(s[1:])
                    continue
                parts = s.split()
                if len(parts) != 2:
                    raise ConfigError(f"{path}: line {lineno} is not 'i j'")
                edges.append((int(parts[0]), int(parts[1])))
        if head is None:
            raise ConfigError(f"{path}: missing '# {{json}}' header")
        return cls.from_edges(head["vertices"], edges, exact=head.get("exact", False),
                              m=head.get("m"), k=head.get("k"), seed=head.get("seed"))


@numba.njit(cache=True)
def _mark_topk(S, k, mark):
    """Per row of scores ``S``: link the top point to the others of the top-k.

    Ties keep the smaller column index, so the top point and the top-k set
    follow the global smallest-index rule.
    """
    rows, n = S.shape
    best = np.empty(k)
    who = np.empty(k, dtype=np.int64)
    for r in range(rows):
        filled = 0
        for c in range(n):
            v = S[r, c]
            if filled < k:
                pos = filled
                filled += 1
            elif v > best[k - 1]:
                pos = k - 1
            else:
                continue
            while pos > 0 and best[pos - 1] < v:
                best[pos] = best[pos - 1]
                who[pos] = who[pos - 1]
                pos -= 1
            best[pos] = v
            who[pos] = c
        top = who[0]
        for q in range(1, k):
            o = who[q]
            if o < top:
                mark[o, top] = True
            else:
                mark[top, o] = True


def ipdg_exact_2d(X: ExtremeSet) -> IpdgGraph:
    """Cycle over the counterclockwise hull order."""
    if not X.ordered:
        raise ConfigError("the exact 2-d graph needs an angularly ordered ExtremeSet")
    n = len(X)
    if n < 3:
        raise ConfigError(f"need at least 3 extreme points, got {n}")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return IpdgGraph.from_edges(X.indices, edges, exact=True)


def ipdg_approx(data, X: ExtremeSet, m: int = 1_000_000, k: int = 16, seed: int = 42,
                batch: int = 0) -> IpdgGraph:
    """Sampled graph: per direction, link the top point to the others of the top-k.

    ``k`` is clipped to ``len(X)``.  The direction stream is the same for any
    ``batch`` size, so the result depends only on (m, k, seed).
    """
    if m < 0:
        raise ConfigError("sample count m must be >= 0")
    if k < 2:
        raise ConfigError("k must be at least 2")
    T = X.points(data)
    nx, d = T.shape
    k = min(k, nx)
    if m == 0 or nx < 2:
        return IpdgGraph.from_edges(X.indices, [], exact=False, m=m, k=k, seed=seed)
    if batch <= 0:
        batch = max(1024, min(65536, 8_000_000 // nx))
    rng = np.random.default_rng(seed)
    mark = np.zeros((nx, nx), dtype=np.bool_)
    for dirs in sphere_directions(rng, m, d, batch=batch):
        _mark_topk(dirs @ T.T, k, mark)
    edges = np.argwhere(mark)
    return IpdgGraph.from_edges(X.indices, edges, exact=False, m=m, k=k, seed=seed)


def empty_ipdg(X: ExtremeSet) -> IpdgGraph:
    return IpdgGraph.from_edges(X.indices, [], exact=False, m=0)
