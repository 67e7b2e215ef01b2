"""Test psiss.sampling."""

import numpy as np
import pytest

from . import UnitTest

from psiss.exceptions import DomainError
from psiss.sampling import evaluate_samples, sample_box


class TestSampleBox(UnitTest):
    def test_shape_and_bounds(self):
        points = sample_box([[-2.0, 3.0], [10.0, 11.0]], 50, seed=4)

        assert points.shape == (50, 2)
        assert np.all(points[:, 0] >= -2.0) and np.all(points[:, 0] <= 3.0)
        assert np.all(points[:, 1] >= 10.0) and np.all(points[:, 1] <= 11.0)

    def test_deterministic(self):
        box = [[-1.0, 1.0], [-1.0, 1.0], [0.0, 5.0]]
        assert np.array_equal(sample_box(box, 20, seed=7), sample_box(box, 20, seed=7))

    def test_seed_changes_random_half(self):
        box = [[0.0, 1.0]]
        first = sample_box(box, 10, seed=1)
        second = sample_box(box, 10, seed=2)

        assert np.array_equal(first[:5], second[:5])
        assert not np.array_equal(first[5:], second[5:])

    def test_degenerate_side(self):
        points = sample_box([[0.0, 1.0], [2.0, 2.0]], 9)
        assert np.all(points[:, 1] == 2.0)

    def test_single_sample(self):
        assert sample_box([[1.0, 2.0]], 1).shape == (1, 1)

    @pytest.mark.parametrize(
        "box", [[], [[1.0, 0.0]], [[0.0, float("inf")]], [[0.0, 1.0, 2.0]], "box"]
    )
    def test_invalid_box(self, box):
        with pytest.raises(ValueError):
            sample_box(box, 10)

    @pytest.mark.parametrize("n_samples", [0, -1, 1.5, True])
    def test_invalid_count(self, n_samples):
        with pytest.raises(ValueError):
            sample_box([[0.0, 1.0]], n_samples)


class TestEvaluateSamples(UnitTest):
    def test_vectorized(self):
        points = np.array([[1.0, 2.0], [3.0, 4.0]])
        values, causes = evaluate_samples(lambda xs: xs[0] + xs[1], points)

        assert list(values) == [3.0, 7.0]
        assert causes == {}

    def test_failing_points_reported(self):
        def func(xs):
            if np.any(xs[0] < 0):
                raise DomainError("ln of a negative number")
            return xs[0]

        points = np.array([[1.0], [-1.0], [2.0], [-3.0]])
        values, causes = evaluate_samples(func, points)

        assert values[0] == 1.0 and values[2] == 2.0
        assert np.isnan(values[1]) and np.isnan(values[3])
        assert set(causes) == {1, 3}
        assert "negative" in causes[1]
