"""Test psiss.check.signal_bounds."""

import pytest

from .. import UnitTest

from psiss.check.signal_bounds import SignalBounds
from psiss.ratefn import RateFunction
from psiss.signal import RateBound, RateBoundSet, SwitchingSignal


class TestSignalBounds(UnitTest):
    def test_scalar_no_switch(self):
        result = SignalBounds(self.scalar_bounds, SwitchingSignal([0.0], [1]), 10.0)

        assert result.passed
        assert result.violation is None
        assert result.n_points == 1001

    def test_stuck_in_unstable_mode(self):
        result = SignalBounds(self.bounds, SwitchingSignal([0.0], [2]), 10.0)

        assert not result.passed
        assert result.violation.condition == "stable"
        assert result.violation.key == 1
        assert result.violation.end == pytest.approx(0.05)

        (unstable,) = [v for v in result if v.condition == "unstable"]
        assert unstable.key == 2
        assert unstable.start == 0.0
        assert unstable.end == pytest.approx(2.87)
        assert unstable.value > unstable.bound

    def test_conditions_subset(self):
        result = SignalBounds(
            self.bounds,
            SwitchingSignal([0.0], [2]),
            10.0,
            conditions=("switches",),
        )
        assert result.passed

    def test_switch_burst(self):
        bounds = RateBoundSet(
            switches={
                (1, 2): RateBound(RateFunction.linear(0.5), 1.0),
                (2, 1): RateBound(RateFunction.linear(0.5), 1.0),
            }
        )
        sig = SwitchingSignal([0.0, 0.1, 0.2, 0.3, 0.4], [1, 2, 1, 2, 1])
        result = SignalBounds(bounds, sig, 1.0)

        assert not result.passed
        assert {v.key for v in result} == {(1, 2), (2, 1)}
        assert result.violation.value == 2.0

    def test_aggregate(self):
        bounds = RateBoundSet(
            switches={
                (1, 2): RateBound(RateFunction.linear(0.5), 1.0),
                (2, 1): RateBound(RateFunction.linear(0.5), 2.0),
            }
        )
        sig = SwitchingSignal([0.0, 0.1, 0.2, 0.3], [1, 2, 1, 2])

        assert not SignalBounds(bounds, sig, 1.0).passed
        result = SignalBounds(bounds, sig, 1.0, aggregate=True)
        assert result.passed

    def test_interval_opening_just_before_switch(self):
        bounds = RateBoundSet(
            switches={
                (1, 2): RateBound(RateFunction.linear(0.5), 0.5),
                (2, 1): RateBound(RateFunction.linear(0.5), 0.5),
            }
        )
        sig = SwitchingSignal([0.0, 0.505, 1.5], [1, 2, 1])
        result = SignalBounds(
            bounds, sig, 3.0, grid_step=0.01, aggregate=True, conditions=("switches",)
        )

        assert not result.passed
        assert result.violation.start == 0.505
        assert result.violation.end == pytest.approx(1.5)
        assert result.violation.value == 2.0
        assert result.violation.bound == pytest.approx(1.995)

    def test_anchored_ignores_early_intervals(self):
        bounds = RateBoundSet(
            switches={
                (1, 2): RateBound(RateFunction.linear(1.0), 0.5),
                (2, 1): RateBound(RateFunction.linear(1.0), 0.5),
            }
        )
        sig = SwitchingSignal([0.0, 0.1, 0.2], [1, 2, 1])

        assert not SignalBounds(bounds, sig, 5.0).passed
        assert SignalBounds(bounds, sig, 5.0, anchored=True).passed

    @pytest.mark.parametrize(
        "horizon, grid_step, conditions",
        [(0.0, 0.01, ("stable",)), (1.0, 0.0, ("stable",)), (1.0, 0.1, ("dwell",))],
    )
    def test_invalid(self, horizon, grid_step, conditions):
        with pytest.raises(ValueError):
            SignalBounds(
                self.bounds,
                self.signal,
                horizon,
                grid_step=grid_step,
                conditions=conditions,
            )
