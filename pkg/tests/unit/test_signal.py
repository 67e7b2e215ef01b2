"""Test psiss.signal."""

import numpy as np
import pytest

from . import UnitTest

from psiss.exceptions import InvalidSignalError, OrderingError, PreconditionError
from psiss.ratefn import RateFunction
from psiss.signal import (
    RateBound,
    RateBoundSet,
    SwitchingSignal,
    activation_duration,
    holding_times,
    switch_count,
    total_switch_count,
)


def random_signal(rng, n_switches, modes=(1, 2, 3)):
    gaps = rng.uniform(0.01, 2.0, size=n_switches)
    taus = np.concatenate([[0.0], np.cumsum(gaps)])
    sequence = [modes[0]]
    for _ in range(n_switches):
        sequence.append(rng.choice([m for m in modes if m != sequence[-1]]))
    return SwitchingSignal(taus, [int(m) for m in sequence])


class TestSwitchingSignal(UnitTest):
    def test__init__(self):
        assert self.signal.taus == (0.0, 1.0, 3.0)
        assert self.signal.modes == (1, 2, 1)
        assert self.signal.initial_mode == 1
        assert self.signal.switches == [(1.0, 1, 2), (3.0, 2, 1)]
        assert len(self.signal) == 3
        assert list(self.signal) == [(0.0, 1), (1.0, 2), (3.0, 1)]

    @pytest.mark.parametrize(
        "taus, modes",
        [
            ([], []),
            ([0.0, 1.0], [1]),
            ([0.5], [1]),
            ([0.0, 1.0, 1.0], [1, 2, 1]),
            ([0.0, 2.0, 1.0], [1, 2, 1]),
            ([0.0, 1.0], [1, 1]),
            ([0.0, float("inf")], [1, 2]),
        ],
    )
    def test_invalid(self, taus, modes):
        with pytest.raises(InvalidSignalError):
            SwitchingSignal(taus, modes)

    def test_sigma_right_continuous(self):
        assert self.signal.sigma(0.0) == 1
        assert self.signal.sigma(0.999) == 1
        assert self.signal.sigma(1.0) == 2
        assert self.signal.sigma(3.0) == 1
        assert self.signal.sigma(100.0) == 1
        assert list(self.signal.sigma(np.array([0.5, 2.0, 4.0]))) == [1, 2, 1]

    def test_check_transitions(self):
        self.signal.check_transitions([(1, 2), (2, 1)])
        with pytest.raises(InvalidSignalError):
            self.signal.check_transitions([(1, 2)])

    def test_equality(self):
        assert self.signal == SwitchingSignal([0, 1, 3], [1, 2, 1])
        assert self.signal != SwitchingSignal([0, 1, 3], [1, 2, 3])
        assert self.signal != "signal"

    def test_switch_times(self):
        assert list(self.signal.switch_times()) == [1.0, 3.0]
        assert list(self.signal.switch_times((2, 1))) == [3.0]
        assert list(self.signal.switch_times((1, 3))) == []

    def test_evaluation_points(self):
        sig = SwitchingSignal([0.0, 0.25, 0.55], [1, 2, 1])
        points = sig.evaluation_points(1.0, 0.5)
        assert list(points) == [0.0, 0.25, 0.5, 0.55, 1.0]

    def test_evaluation_points_invalid(self):
        with pytest.raises(ValueError):
            self.signal.evaluation_points(0.0, 0.1)

    def test_csv(self):
        text = self.signal.to_csv()
        assert text == "tau,mode\n0.0,1\n1.0,2\n3.0,1\n"
        assert SwitchingSignal.from_csv(text) == self.signal

    def test_csv_preserves_decimal_text(self):
        sig = SwitchingSignal([0.0, 0.1, 0.30000000000000004], [1, 2, 1])
        assert SwitchingSignal.from_csv(sig.to_csv()).to_csv() == sig.to_csv()

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "time,mode\n0,1\n",
            "tau,mode\n0,one\n",
            "tau,mode\n0\n",
            "tau,mode\n1,1\n",
        ],
    )
    def test_csv_invalid(self, text):
        with pytest.raises(InvalidSignalError):
            SwitchingSignal.from_csv(text)


class TestHoldingTimes(UnitTest):
    def test_holding_times(self):
        assert holding_times(self.signal) == [1.0, 2.0]

    def test_no_switch(self):
        assert holding_times(SwitchingSignal([0.0], [1])) == []

    def test_tiny_holding_time(self):
        times = holding_times(SwitchingSignal([0.0, 0.5, 0.5 + 1e-9], [1, 2, 1]))
        assert times[0] == 0.5
        assert times[1] == pytest.approx(1e-9, rel=1e-6)


class TestActivationDuration(UnitTest):
    def test_stable_mode(self):
        assert activation_duration(self.signal, 1, 0.0, 5.0) == 3.0

    def test_unstable_mode(self):
        assert activation_duration(self.signal, 2, 0.0, 5.0) == 2.0

    def test_absent_mode(self):
        assert activation_duration(self.signal, 3, 0.0, 5.0) == 0.0

    def test_inner_interval(self):
        assert activation_duration(self.signal, 2, 0.5, 2.0) == 1.0

    def test_ordering(self):
        with pytest.raises(OrderingError):
            activation_duration(self.signal, 1, 2.0, 2.0)
        with pytest.raises(OrderingError):
            activation_duration(self.signal, 1, 3.0, 2.0)

    def test_negative_start(self):
        with pytest.raises(ValueError):
            activation_duration(self.signal, 1, -1.0, 2.0)

    def test_partition_identity(self):
        rng = np.random.default_rng(1)

        for _ in range(1000):
            sig = random_signal(rng, rng.integers(0, 20))
            s, t = np.sort(rng.uniform(0, 30, size=2))
            total = sum(activation_duration(sig, mode, s, t) for mode in (1, 2, 3))
            assert abs(total - (t - s)) <= 1e-12 * max(1.0, t)

    def test_additivity(self):
        rng = np.random.default_rng(2)

        for _ in range(1000):
            sig = random_signal(rng, 10)
            s, u, t = np.sort(rng.uniform(0, 25, size=3))
            for mode in (1, 2, 3):
                split = activation_duration(sig, mode, s, u) + activation_duration(
                    sig, mode, u, t
                )
                assert split == pytest.approx(
                    activation_duration(sig, mode, s, t), abs=1e-12
                )


class TestSwitchCount(UnitTest):
    def test_whole_signal(self):
        assert switch_count(self.signal, (1, 2), 0.0, 5.0) == 1
        assert switch_count(self.signal, (2, 1), 0.0, 5.0) == 1

    def test_half_open_boundary(self):
        assert switch_count(self.signal, (1, 2), 1.0, 3.0) == 0
        assert switch_count(self.signal, (2, 1), 1.0, 3.0) == 1

    def test_no_switch_signal(self):
        sig = SwitchingSignal([0.0], [1])
        assert switch_count(sig, (1, 2), 0.0, 10.0) == 0
        assert total_switch_count(sig, 0.0, 10.0) == 0

    def test_ordering(self):
        with pytest.raises(OrderingError):
            switch_count(self.signal, (1, 2), 1.0, 1.0)

    def test_count_identity(self):
        rng = np.random.default_rng(3)
        pairs = [(m, n) for m in (1, 2, 3) for n in (1, 2, 3) if m != n]

        for _ in range(1000):
            sig = random_signal(rng, rng.integers(0, 20))
            t = rng.uniform(0.1, 40)
            assert total_switch_count(sig, 0.0, t) == sum(
                switch_count(sig, pair, 0.0, t) for pair in pairs
            )


class TestRateBoundSet(UnitTest):
    def test__init__(self):
        assert set(self.bounds.stable) == {1}
        assert set(self.bounds.unstable) == {2}
        assert set(self.bounds.switches) == {(1, 2), (2, 1)}
        assert self.bounds.unstable[2] == RateBound(RateFunction.linear(0.1), 2.58)

    def test_iter(self):
        conditions = [(condition, key) for condition, key, _ in self.bounds]
        assert conditions == [
            ("stable", 1),
            ("unstable", 2),
            ("switches", (1, 2)),
            ("switches", (2, 1)),
        ]

    def test_total_offset(self):
        assert self.bounds.total_offset == pytest.approx(0.01 + 2.58 + 1.0 + 1.0)

    def test_aggregate_switches(self):
        assert self.bounds.aggregate_switch_offset == 2.0
        rate = self.bounds.aggregate_switch_rate
        assert rate(0.0, 1.0) == pytest.approx(0.1 + 0.05 + 0.2 + 0.0025)

    @pytest.mark.parametrize("offset", [0.0, -1.0, "x"])
    def test_invalid_offset(self, offset):
        with pytest.raises(ValueError):
            RateBoundSet(stable={1: RateBound(RateFunction.linear(1.0), offset)})

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            RateBoundSet(stable={1: RateBound("s", 1.0)})

    def test_validate_against(self):
        self.bounds.validate_against(self.family)

    def test_validate_against_mismatch(self):
        bounds = RateBoundSet(
            stable={1: self.bounds.stable[1], 3: self.bounds.stable[1]},
            unstable=self.bounds.unstable,
        )
        with pytest.raises(PreconditionError) as info:
            bounds.validate_against(self.family)
        message = str(info.value)
        assert "missing switches bound for (1, 2)" in message
        assert "unexpected stable bound for 3" in message
