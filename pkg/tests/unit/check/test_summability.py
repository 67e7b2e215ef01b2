"""Test psiss.check.summability."""

import math

import numpy as np
import pytest

from .. import UnitTest

from psiss.check.summability import Summability
from psiss.ratefn import (
    RateFunction,
    RateTerm,
    affine_summability_bound,
    three_halves_summability_bound,
)
from psiss.signal import SwitchingSignal

GAPS = [0.5, 1.0, 2.0]
SLOPES_OFFSETS = [(1.0, 0.0), (0.5, 1.0)]


def equispaced(d, t_end=1e3):
    taus = np.arange(0.0, t_end + d / 2, d)
    return SwitchingSignal(taus, [1 + k % 2 for k in range(taus.size)])


UNIT_SPACED = SwitchingSignal(
    [float(k) for k in range(101)], [1 if k % 2 == 0 else 2 for k in range(101)]
)


class TestSummability(UnitTest):
    def test_single_instant(self):
        result = Summability(
            RateFunction.linear(1.0), SwitchingSignal([0.0], [1]), range(1, 41)
        )

        assert result.c2 == pytest.approx(math.exp(-1.0))
        assert result.sums[-1] == pytest.approx(math.exp(-40.0))
        assert not result.nondecreasing
        assert result.converged

    def test_geometric_series(self):
        result = Summability(RateFunction.linear(1.0), UNIT_SPACED, range(1, 101))

        # the tau_0 = 0 term plus the geometric tail 1/(e - 1)
        assert result.c2 == pytest.approx(1.0 + 1.0 / (math.e - 1.0), rel=1e-12)
        assert result.nondecreasing
        assert result.converged
        assert result.dominated_by(math.e / (math.e - 1.0) + 1e-12)
        assert not result.dominated_by(1.5)

    def test_terms(self):
        result = Summability(RateFunction.linear(1.0), UNIT_SPACED, [3.0])

        terms = result.terms(3.0)
        assert len(terms) == 4
        assert terms[-1] == 1.0
        assert list(result.partial_sums(3.0))[0] == 1.0
        assert result.partial_sums(3.0)[-1] == pytest.approx(result.sums[0])

    def test_slow_rate_not_converged(self):
        result = Summability(
            RateFunction.linear(1e-3), SwitchingSignal([0.0], [1]), range(1, 11)
        )
        assert not result.converged

    def test_single_horizon_not_converged(self):
        result = Summability(RateFunction.linear(1.0), UNIT_SPACED, [5.0])
        assert not result.converged

    @pytest.mark.parametrize("d", GAPS)
    @pytest.mark.parametrize("k1, k2", SLOPES_OFFSETS)
    def test_affine_bound(self, d, k1, k2):
        signal = equispaced(d)
        result = Summability(RateFunction.linear(k1, k2), signal, signal.taus[1:])

        assert result.nondecreasing
        assert result.converged
        bound = affine_summability_bound(k1, k2, d, 0.0)
        assert result.dominated_by(bound * (1.0 + 1e-12))
        assert result.c2 == pytest.approx(bound, rel=1e-9)

    @pytest.mark.parametrize("d", GAPS)
    @pytest.mark.parametrize("k1, k2", SLOPES_OFFSETS)
    def test_three_halves_bound(self, d, k1, k2):
        signal = equispaced(d)
        rho = RateFunction((RateTerm(k1, 1.5),), k2)
        result = Summability(rho, signal, signal.taus[1:])

        assert result.nondecreasing
        assert result.converged
        assert result.dominated_by(three_halves_summability_bound(k1, k2, d, 0.0))

    @pytest.mark.parametrize("horizons", [[], [-1.0, 2.0]])
    def test_invalid_horizons(self, horizons):
        with pytest.raises(ValueError):
            Summability(RateFunction.linear(1.0), UNIT_SPACED, horizons)
