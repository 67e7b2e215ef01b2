"""Test psiss.check.condition_c1."""

import numpy as np
import pytest

from .. import UnitTest

from psiss.check.condition_c1 import ConditionC1
from psiss.exceptions import PreconditionError
from psiss.ratefn import RateFunction, RateTerm

SEC4_RHO = RateFunction((RateTerm(1e-5, 1.5),))


class TestConditionC1(UnitTest):
    def test_sec4_recomputed_coefficients(self):
        result = ConditionC1(self.family, self.bounds, SEC4_RHO)

        assert result.lhs_coefficients[1.0] == pytest.approx(4.94e-5, abs=1e-7)
        assert result.lhs_coefficients[1.5] == pytest.approx(1.5579e-3, abs=1e-7)
        assert result.exact is False
        assert not result.passed
        assert not result.grid_passed
        assert result.worst_s == 100.0

    def test_sec4_stated_mismatch(self):
        result = ConditionC1(
            self.family, self.bounds, SEC4_RHO, stated_lhs={1.5: -1.725e-5}
        )

        assert result.stated_lhs == {1.5: -1.725e-5}
        assert result.stated_mismatch is True

    def test_no_stated_lhs(self):
        result = ConditionC1(self.family, self.bounds, SEC4_RHO)
        assert result.stated_mismatch is None

    def test_scalar_tight(self):
        result = ConditionC1(
            self.scalar,
            self.scalar_bounds,
            RateFunction.linear(1.0),
            stated_lhs={1.0: -1.0},
        )

        assert result.lhs_coefficients == {1.0: -1.0}
        assert result.exact is True
        assert result.grid_passed
        assert result.passed
        assert result.stated_mismatch is False

    def test_scalar_strict(self):
        result = ConditionC1(
            self.scalar, self.scalar_bounds, RateFunction.linear(0.5), c1=1.0
        )

        assert result.coefficients == {0.0: -1.0, 1.0: -0.5}
        assert result.exact is True
        assert result.worst_slack == -1.0

    def test_negative_c1_fails_at_zero(self):
        result = ConditionC1(
            self.scalar, self.scalar_bounds, RateFunction.linear(1.0), c1=-1.0
        )

        assert result.exact is False
        assert result.worst_slack == pytest.approx(1.0)

    def test_mixed_signs_decided_on_grid(self):
        result = ConditionC1.from_weighted_rates(
            [
                (-1.0, RateFunction.linear(1.0)),
                (1.0, RateFunction((RateTerm(1.0, 0.5),))),
            ],
            RateFunction(),
        )

        assert result.exact is None
        assert not result.grid_passed
        assert not result.passed
        assert 0.0 < result.worst_s < 1.0

    def test_exact_agrees_with_grid(self):
        rng = np.random.default_rng(21)
        s = np.linspace(0.0, 100.0, 500)

        for _ in range(200):
            a1, a15 = rng.choice([-1.0, 1.0], size=2) * rng.uniform(0.05, 0.4, size=2)
            r1 = rng.uniform(0.1, 1.0)
            c1 = rng.uniform(0.0, 1.0)
            result = ConditionC1.from_weighted_rates(
                [
                    (a1 - r1, RateFunction.linear(1.0)),
                    (a15, RateFunction((RateTerm(1.0, 1.5),))),
                ],
                RateFunction.linear(r1),
                c1=c1,
            )

            rhs = c1 - r1 * s
            slack = (a1 - r1) * s + a15 * s**1.5 - rhs
            brute = bool(np.all(slack <= 1e-12 * (1.0 + np.abs(rhs))))
            if result.exact is not None:
                assert result.exact == brute
            assert result.passed == brute

    def test_lhs_at(self):
        result = ConditionC1(self.scalar, self.scalar_bounds, RateFunction.linear(1.0))
        assert result.lhs_at(3.0) == -3.0

    def test_rho_with_offset(self):
        with pytest.raises(PreconditionError):
            ConditionC1(self.scalar, self.scalar_bounds, RateFunction.linear(1.0, 1.0))

    @pytest.mark.parametrize("s_max, n_points", [(0.0, 10), (10.0, 0)])
    def test_invalid_grid(self, s_max, n_points):
        with pytest.raises(ValueError):
            ConditionC1(
                self.scalar,
                self.scalar_bounds,
                RateFunction.linear(1.0),
                s_max=s_max,
                n_points=n_points,
            )
