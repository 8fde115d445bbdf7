import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from grmr.errors import ConfigError
from grmr.fixtures import hexagon, square
from grmr.geometry import (Dataset, angle, angles, as_points, check_interior_origin, convex_hull_2d,
                           in_arc, normalize_dataset, outward_normals, read_csv, sphere_directions,
                           top_score, write_csv)


def test_normalize_maps_columns_to_unit_box():
    raw = np.array([[0.0, 10.0, 5.0], [2.0, 20.0, 5.0], [1.0, 15.0, 5.0]])
    ds = normalize_dataset(raw)
    np.testing.assert_allclose(ds.points[:, 0], [-1.0, 1.0, 0.0])
    np.testing.assert_allclose(ds.points[:, 1], [-1.0, 1.0, 0.0])
    # a constant column carries no ranking information
    np.testing.assert_array_equal(ds.points[:, 2], 0.0)


def test_dataset_rejects_out_of_range_and_nan():
    with pytest.raises(ConfigError):
        Dataset(np.array([[2.0, 0.0]]))
    with pytest.raises(ConfigError):
        Dataset(np.array([[np.nan, 0.0]]))


def test_dataset_is_read_only():
    ds = Dataset(square())
    with pytest.raises(ValueError):
        ds.points[0, 0] = 0.5


def test_angle_and_arc():
    assert angle([1.0, 0.0]) == 0.0
    assert angle([0.0, -1.0]) == pytest.approx(1.5 * math.pi)
    np.testing.assert_allclose(angles(hexagon()), np.arange(6) * math.pi / 3, atol=1e-12)
    assert in_arc(0.1, 6.0, 0.5)
    assert not in_arc(3.0, 6.0, 0.5)
    with pytest.raises(ValueError):
        angle([0.0, 0.0])


def test_top_score_breaks_ties_on_smallest_index():
    pts = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
    t = top_score(pts, [1.0, 0.0])
    assert t.index == 0 and t.score == 1.0


def test_sphere_directions_unit_and_batch_independent():
    a = np.vstack(list(sphere_directions(np.random.default_rng(3), 1000, 4, batch=1000)))
    b = np.vstack(list(sphere_directions(np.random.default_rng(3), 1000, 4, batch=1000)))
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(np.linalg.norm(a, axis=1), 1.0)
    assert abs(a.mean(axis=0)).max() < 0.1


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=4, max_value=80))
def test_convex_hull_matches_qhull(seed, n):
    pts = np.random.default_rng(seed).uniform(-1, 1, size=(n, 2))
    ours = convex_hull_2d(pts)
    ref = ConvexHull(pts).vertices
    assert sorted(ours.tolist()) == sorted(ref.tolist())
    # CCW: every turn is a left turn
    P = pts[ours]
    e = np.roll(P, -1, axis=0) - P
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    assert np.all(cross > 0)


def test_outward_normals_of_square():
    n = outward_normals(square())
    r = 1 / math.sqrt(2)
    np.testing.assert_allclose(n, [[r, r], [-r, r], [-r, -r], [r, -r]], atol=1e-12)


def test_interior_check():
    assert check_interior_origin(hexagon()).ok
    shifted = hexagon() * 0.4 + 0.5
    rep = check_interior_origin(shifted)
    assert not rep.ok and rep.worst_omega <= 0
    # 3-d: a tetrahedron around the origin, then one not containing it
    tet = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) * 0.5
    assert check_interior_origin(tet, m=20_000).ok
    assert not check_interior_origin(tet * 0.3 + 0.6, m=20_000).ok


def test_csv_roundtrip_and_header_detection(tmp_path):
    raw = np.array([[1.0, 4.0], [3.0, 8.0], [2.0, 6.0]])
    p = tmp_path / "d.csv"
    write_csv(p, Dataset(raw / 8.0), names=["x", "y"], comment='{"k": 1}')
    text = p.read_text().splitlines()
    assert text[0] == '# {"k": 1}' and text[1] == "x,y"
    ds = read_csv(p, normalize=False)
    assert ds.names == ("x", "y")
    np.testing.assert_allclose(ds.points, raw / 8.0)
    sel = read_csv(p, columns=["y"], normalize=True)
    np.testing.assert_allclose(sel.points[:, 0], [-1.0, 1.0, 0.0])
    q = tmp_path / "plain.csv"
    q.write_text("1,2\n3,4\n")
    assert read_csv(q).n == 2


def test_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3\n")
    with pytest.raises(ConfigError):
        read_csv(p)
    p.write_text("1,2\n3,x\n")
    with pytest.raises(ConfigError):
        read_csv(p, header=False)
    p.write_text("a,b\n")
    with pytest.raises(ConfigError):
        read_csv(p)


def test_as_points_accepts_arrays_and_datasets():
    assert as_points(square()).shape == (4, 2)
    assert as_points(Dataset(square())).shape == (4, 2)
