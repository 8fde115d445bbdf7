import numpy as np
import pytest

from grmr.geometry import check_interior_origin

# criterion number -> (ok, detail), filled by test_acceptance
ACCEPTANCE = {}


def random_instance(rng, n, d=2, dist="uniform"):
    """Random points in [-1, 1]^d with the origin strictly inside their hull."""
    while True:
        if dist == "uniform":
            pts = rng.uniform(-1.0, 1.0, size=(n, d))
        else:
            pts = np.clip(rng.normal(0.0, 0.4, size=(n, d)), -1.0, 1.0)
        if check_interior_origin(pts, m=20_000, seed=0).ok:
            return pts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
