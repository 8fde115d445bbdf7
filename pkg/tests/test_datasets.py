import numpy as np
import pytest

from grmr.datasets import generate
from grmr.errors import ConfigError


@pytest.mark.parametrize("dist", ["normal", "uniform"])
def test_generated_data_is_normalized_and_seeded(dist):
    a = generate(dist, 1000, 3, seed=4)
    b = generate(dist, 1000, 3, seed=4)
    np.testing.assert_array_equal(a.points, b.points)
    np.testing.assert_allclose(a.points.min(axis=0), -1.0)
    np.testing.assert_allclose(a.points.max(axis=0), 1.0)
    assert not np.array_equal(a.points, generate(dist, 1000, 3, seed=5).points)


def test_bad_arguments():
    with pytest.raises(ConfigError):
        generate("cauchy", 10, 2)
    with pytest.raises(ConfigError):
        generate("normal", 0, 2)
