"""Small hand-checkable datasets shared by tests, docs and the CLI."""

from __future__ import annotations

import math

import numpy as np

from .hgrmr import DomGraph


def hexagon() -> np.ndarray:
    """Regular hexagon v_k = (cos 60k, sin 60k), k = 0..5."""
    k = np.arange(6)
    return np.column_stack([np.cos(k * math.pi / 3), np.sin(k * math.pi / 3)])


def square() -> np.ndarray:
    """The four unit axis points (1,0), (0,1), (-1,0), (0,-1)."""
    return np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])


# Ten candidates s1..s10 in counterclockwise order followed by six interior
# points.  Rows 3 and 5 are the two non-extreme candidates at eps = 0.1,
# s1 - s3 = (0.97, -0.34), so the raw tie normal of (s1, s3) is (0.34, 0.97),
# and dropping s3 next to s1 costs about 0.3 (witnessed by s2).
WORKED_2D = np.array([
    [0.71, 0.35], [0.59, 0.65], [-0.26, 0.69], [-0.67, 0.65], [-0.95, 0.69],
    [-0.82, -0.32], [-0.82, -0.42], [0.46, -0.87], [0.67, -0.45], [0.84, -0.01],
    [0.20, 0.25], [-0.35, 0.30], [-0.40, -0.20], [0.15, -0.35], [0.45, 0.05], [-0.10, 0.00],
])

WORKED_2D_EXTREMES = (0, 1, 2, 4, 6, 7, 8, 9)     # t1..t8
WORKED_2D_OPTIMUM_01 = (1, 4, 6, 7, 9)            # s2, s5, s7, s8, s10


def worked_2d() -> np.ndarray:
    return WORKED_2D.copy()


# Weighted dominance graph on t1..t8 (0-based here).  Four edges survive at
# 0.2: t2->t1, t4->t3, t8->t7, t8->t1; t8 then has the unique largest
# dominated set and greedy picks t8, t4, t2, t5, t6.
WORKED_DOM_WEIGHTS = {
    (0, 1): 0.25, (1, 0): 0.15, (1, 2): 0.28, (2, 1): 0.30,
    (3, 2): 0.12, (2, 3): 0.35, (3, 4): 0.40, (4, 3): 0.22,
    (4, 5): 0.31, (5, 4): 0.26, (5, 6): 0.45, (6, 5): 0.33,
    (7, 6): 0.18, (6, 7): 0.24, (7, 0): 0.16, (0, 7): 0.29,
}


def worked_domgraph(cap: float = 0.5) -> DomGraph:
    w = {k: v for k, v in WORKED_DOM_WEIGHTS.items() if v <= cap}
    return DomGraph(np.arange(8), w, cap, delta_max_degree=2)
