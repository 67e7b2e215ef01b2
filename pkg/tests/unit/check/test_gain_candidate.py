"""Test psiss.check.gain_candidate."""

import pytest

from .. import UnitTest, scalar_family

from psiss.check.gain_candidate import GainCandidate


class TestGainCandidate(UnitTest):
    def test_quadratic_gain(self):
        result = GainCandidate(self.scalar)

        assert result.at_zero == 0.0
        assert result.zero_at_zero
        assert result.increasing
        assert result.passed

    def test_offset_gain(self):
        result = GainCandidate(scalar_family(gamma="r + 1"))

        assert result.at_zero == 1.0
        assert result.increasing
        assert not result.passed

    def test_zero_gain(self):
        result = GainCandidate(scalar_family(gamma="0"))

        assert result.zero_at_zero
        assert not result.increasing
        assert not result.passed

    def test_samples(self):
        result = GainCandidate(self.scalar, r_max=2.0, n_samples=3)
        assert list(result.samples) == [0.0, 1.0, 2.0]
        assert list(result.values) == [0.0, 0.5, 2.0]

    @pytest.mark.parametrize("r_max, n_samples", [(0.0, 10), (1.0, 1), (1.0, 2.5)])
    def test_invalid(self, r_max, n_samples):
        with pytest.raises(ValueError):
            GainCandidate(self.scalar, r_max=r_max, n_samples=n_samples)
