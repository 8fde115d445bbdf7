import itertools

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from grmr.errors import ConfigError
from grmr.extremes import extreme_points
from grmr.fixtures import hexagon
from grmr.ipdg import IpdgGraph, empty_ipdg, ipdg_approx, ipdg_exact_2d

from conftest import random_instance


def hull_edges(pts, X):
    """Edges of the hull polytope (general position: all facets are simplices)."""
    pos = X.position()
    out = set()
    for simplex in ConvexHull(pts).simplices:
        for a, b in itertools.combinations(simplex, 2):
            a, b = pos[int(a)], pos[int(b)]
            out.add((min(a, b), max(a, b)))
    return out


def test_exact_2d_is_the_hull_cycle():
    X = extreme_points(hexagon())
    g = ipdg_exact_2d(X)
    assert g.exact and g.n_edges == 6 and g.max_degree == 2
    assert sorted(g.edges()) == [(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)]


def test_sampled_top2_edges_are_hull_edges_2d(rng):
    pts = random_instance(rng, 300)
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=50_000, k=2, seed=1)
    cycle = set(ipdg_exact_2d(X).edges())
    assert set(g.edges()) == cycle


@pytest.mark.parametrize("d", [3, 4])
def test_sampled_top2_edges_are_hull_edges_hd(rng, d):
    pts = random_instance(rng, 200, d=d)
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=50_000, k=2, seed=3)
    assert set(g.edges()) <= hull_edges(pts, X)


def test_larger_k_adds_edges(rng):
    pts = random_instance(rng, 500, d=3)
    X = extreme_points(pts)
    sizes = [ipdg_approx(pts, X, m=20_000, k=k, seed=0).n_edges for k in (2, 4, 8)]
    assert sizes[0] <= sizes[1] <= sizes[2]


def test_batch_size_does_not_change_the_graph(rng):
    pts = random_instance(rng, 300, d=3)
    X = extreme_points(pts)
    a = ipdg_approx(pts, X, m=10_000, k=6, seed=9, batch=1000)
    b = ipdg_approx(pts, X, m=10_000, k=6, seed=9, batch=4096)
    assert a.edges() == b.edges()


def test_symmetric_adjacency(rng):
    pts = random_instance(rng, 300, d=3)
    g = ipdg_approx(pts, extreme_points(pts), m=5000, k=5, seed=0)
    for i, nb in enumerate(g.adj):
        for j in nb:
            assert i in g.adj[j]


def test_file_roundtrip(tmp_path, rng):
    pts = random_instance(rng, 200, d=3)
    X = extreme_points(pts)
    g = ipdg_approx(pts, X, m=5000, k=4, seed=2)
    p = tmp_path / "g.txt"
    g.write(p)
    h = IpdgGraph.read(p)
    assert h.edges() == g.edges() and h.k == 4 and h.m == 5000
    assert h.vertices.tolist() == g.vertices.tolist()


def test_read_rejects_bad_files(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n")
    with pytest.raises(ConfigError):
        IpdgGraph.read(p)
    p.write_text('# {"vertices": [3, 4]}\n0 5\n')
    with pytest.raises(ConfigError):
        IpdgGraph.read(p)


def test_empty_and_parameter_errors():
    X = extreme_points(hexagon())
    assert empty_ipdg(X).n_edges == 0
    assert ipdg_approx(hexagon(), X, m=0).n_edges == 0
    with pytest.raises(ConfigError):
        ipdg_approx(hexagon(), X, m=100, k=1)
    with pytest.raises(ConfigError):
        ipdg_approx(hexagon(), X, m=-1)
