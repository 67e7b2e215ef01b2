"""Test psiss.sim."""

import math

import numpy as np
import pytest

from . import UnitTest

from psiss.exceptions import InvalidSignalError
from psiss.family import SubsystemSpec, SwitchedFamily
from psiss.generators import generate_admissible_signal
from psiss.sim import (
    Trajectory,
    batch_seeds,
    batch_simulate,
    integrate,
    parse_inputs,
    time_grid,
)
from psiss.signal import SwitchingSignal

NO_SWITCH = SwitchingSignal([0.0], [1])


def scalar_modes(*fields):
    """Scalar modes ``x' = fields[k]``; decay rates are placeholders."""

    subsystems = [
        SubsystemSpec.parse(k + 1, [text], "0.5*x1^2", 1.0 if k == 0 else -1.0, 1, 1)
        for k, text in enumerate(fields)
    ]
    transitions = {(1, 2): 1.0, (2, 1): 1.0} if len(fields) == 2 else {}
    return SwitchedFamily(subsystems, state_dim=1, input_dim=1, transitions=transitions)


class TestTimeGrid(UnitTest):
    def test_switch_aligned(self):
        sig = SwitchingSignal([0.0, 0.25], [1, 2])
        grid = time_grid(sig, 0.5, 0.1)
        assert np.allclose(grid, [0.0, 0.1, 0.2, 0.25, 0.35, 0.45, 0.5])

    def test_contains_every_instant(self):
        grid = time_grid(self.signal, 5.0, 0.3)
        for tau in self.signal.taus:
            assert tau in grid
        assert grid[-1] == 5.0
        assert np.all(np.diff(grid) > 0)
        assert np.max(np.diff(grid)) <= 0.3 + 1e-12

    def test_instants_after_end_ignored(self):
        grid = time_grid(self.signal, 2.0, 0.5)
        assert np.allclose(grid, [0.0, 0.5, 1.0, 1.5, 2.0])

    @pytest.mark.parametrize("t_end, dt", [(0.0, 0.1), (1.0, 0.0), (1.0, -0.1)])
    def test_invalid(self, t_end, dt):
        with pytest.raises(ValueError):
            time_grid(self.signal, t_end, dt)


class TestParseInputs(UnitTest):
    def test_parse(self):
        inputs = parse_inputs(["1", "sin(t)"], 2)
        assert len(inputs) == 2
        assert inputs[1].variables == frozenset({"t"})

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            parse_inputs(["1", "2"], 1)


class TestIntegrate(UnitTest):
    def test_exponential_decay(self):
        traj = integrate(self.scalar, NO_SWITCH, ["0"], [1.0], t_end=1.0, dt=1e-3)

        assert traj.times[-1] == 1.0
        assert traj.states[-1, 0] == pytest.approx(math.exp(-1.0), abs=1e-6)
        assert not traj.diverged
        assert traj.error is None

    def test_switch_back_and_forth(self):
        fam = scalar_modes("-x1", "x1")
        sig = SwitchingSignal([0.0, 1.0], [1, 2])
        traj = integrate(fam, sig, ["0"], [1.0], t_end=2.0, dt=1e-3)

        assert traj.states[-1, 0] == pytest.approx(1.0, abs=1e-5)

    def test_mode_sequence_matches_signal(self):
        fam = scalar_modes("-x1", "x1")
        sig = SwitchingSignal([0.0, 0.33, 1.07, 1.5], [1, 2, 1, 2])
        traj = integrate(fam, sig, ["0"], [1.0], t_end=2.0, dt=0.1)

        for tau in sig.taus:
            assert tau in traj.times
        assert list(traj.modes) == list(sig.sigma(traj.times))

    def test_convergence_order(self):
        exact = math.exp(-1.0)
        errors = []
        for dt in (0.1, 0.05):
            traj = integrate(self.scalar, NO_SWITCH, ["0"], [1.0], t_end=1.0, dt=dt)
            errors.append(abs(traj.states[-1, 0] - exact))

        assert math.log2(errors[0] / errors[1]) >= 3.5

    def test_deterministic(self):
        first = integrate(self.family, self.signal, ["1"], [1.0, -2.0], 4.0, 0.01)
        second = integrate(self.family, self.signal, ["1"], [1.0, -2.0], 4.0, 0.01)
        assert np.array_equal(first.states, second.states)

    def test_time_varying_input(self):
        traj = integrate(self.scalar, NO_SWITCH, ["sin(t)"], [0.0], 1.0, 0.1)
        assert np.allclose(traj.inputs[:, 0], np.sin(traj.times))

    def test_divergence(self):
        fam = scalar_modes("x1")
        traj = integrate(fam, NO_SWITCH, ["0"], [1e11], t_end=5.0, dt=0.01)

        assert traj.diverged
        assert traj.error is None
        assert traj.stop_time == pytest.approx(math.log(10.0), abs=0.02)
        assert traj.times[-1] == traj.stop_time

    def test_domain_error_aborts(self):
        fam = scalar_modes("-1 + 0*ln(x1)")
        traj = integrate(fam, NO_SWITCH, ["0"], [0.5], t_end=2.0, dt=0.01)

        assert not traj.diverged
        assert traj.error is not None
        assert traj.stop_time == pytest.approx(0.5, abs=0.02)

    def test_undefined_input_aborts(self):
        traj = integrate(self.scalar, NO_SWITCH, ["1/t"], [1.0], t_end=1.0, dt=0.1)

        assert not traj.diverged
        assert traj.error is not None
        assert traj.stop_time == 0.0
        assert len(traj) == 1

    def test_input_undefined_later(self):
        traj = integrate(self.scalar, NO_SWITCH, ["ln(1 - t)"], [1.0], 2.0, 0.1)

        assert traj.error is not None
        assert traj.stop_time == pytest.approx(0.9)
        assert np.all(np.isfinite(traj.inputs))

    def test_sec4_trajectory_bounded(self):
        sig = generate_admissible_signal(self.bounds, 40.0, mode_cycle=[1, 2])
        traj = integrate(self.family, sig, ["1"], [100.0, 100.0], t_end=40.0, dt=0.01)

        assert not traj.diverged
        assert np.isfinite(traj.sup_norm)
        assert traj.final_norm < np.linalg.norm([100.0, 100.0])

    def test_transition_outside_family(self):
        with pytest.raises(InvalidSignalError):
            sig = SwitchingSignal([0.0, 1.0], [1, 3])
            integrate(self.family, sig, ["1"], [0.0, 0.0], 2.0)

    def test_wrong_initial_state(self):
        with pytest.raises(ValueError):
            integrate(self.family, self.signal, ["1"], [1.0], 2.0)


class TestTrajectory(UnitTest):
    def test_properties(self):
        traj = Trajectory([0.0, 1.0], [[3.0, 4.0], [0.0, 1.0]], [1, 2], [[1.0], [2.0]])

        assert len(traj) == 2
        assert list(traj.norms) == [5.0, 1.0]
        assert traj.sup_norm == 5.0
        assert traj.final_norm == 1.0
        assert list(traj.x0) == [3.0, 4.0]
        assert list(traj.input_norms) == [1.0, 2.0]

    def test_summary(self):
        traj = Trajectory([0.0, 1.0], [[3.0, 4.0], [0.0, 1.0]], [1, 2], [[1.0], [2.0]])
        summary = traj.summary(run=4)

        assert summary.run == 4
        assert summary.time == 1.0
        assert summary.trajectory is None
        assert traj.summary(keep=True).trajectory is traj

    def test_csv(self):
        traj = integrate(self.scalar, NO_SWITCH, ["1"], [2.0], 0.2, 0.1)
        lines = traj.to_csv().splitlines()

        assert lines[0] == "t,mode,x1,v1,normx"
        assert len(lines) == len(traj) + 1
        assert lines[1] == "0,1,2,1,2"


class TestBatchSimulate(UnitTest):
    def test_same_seed_identical(self):
        box = [[-10.0, 10.0], [-10.0, 10.0]]
        first = batch_simulate(self.family, self.signal, ["1"], box, 5, 3, 2.0, 0.01)
        second = batch_simulate(self.family, self.signal, ["1"], box, 5, 3, 2.0, 0.01)

        for a, b in zip(first, second):
            assert np.array_equal(a.x0, b.x0)
            assert a.final_norm == b.final_norm

    def test_runs_independent_of_batch_size(self):
        box = [[-10.0, 10.0], [-10.0, 10.0]]
        small = batch_simulate(self.family, self.signal, ["1"], box, 2, 3, 1.0, 0.01)
        large = batch_simulate(self.family, self.signal, ["1"], box, 4, 3, 1.0, 0.01)

        for a, b in zip(small, large):
            assert np.array_equal(a.x0, b.x0)
        assert batch_seeds(3, 2) == batch_seeds(3, 4)[:2]

    def test_samples_inside_box(self):
        box = [[-1000.0, 1000.0], [5.0, 6.0]]
        summaries = batch_simulate(
            self.family, self.signal, ["1"], box, 20, 0, 0.1, 0.01
        )

        assert [summary.run for summary in summaries] == list(range(20))
        for summary in summaries:
            assert -1000.0 <= summary.x0[0] <= 1000.0
            assert 5.0 <= summary.x0[1] <= 6.0

    def test_degenerate_box_matches_integrate(self):
        (summary,) = batch_simulate(
            self.scalar,
            NO_SWITCH,
            ["1"],
            [[0.5, 0.5]],
            1,
            0,
            2.0,
            0.01,
            keep_trajectories=True,
        )
        traj = integrate(self.scalar, NO_SWITCH, ["1"], [0.5], 2.0, 0.01)

        assert np.array_equal(summary.trajectory.states, traj.states)

    def test_pinned_initial_state(self):
        summaries = batch_simulate(
            self.family, self.signal, ["1"], None, 3, 0, 1.0, 0.01, x0=[1.0, 2.0]
        )
        for summary in summaries:
            assert list(summary.x0) == [1.0, 2.0]

    def test_undefined_input_flags_every_run(self):
        summaries = batch_simulate(
            self.scalar, NO_SWITCH, ["1/t"], [[-1.0, 1.0]], 3, 0, 1.0, 0.1
        )

        assert len(summaries) == 3
        assert all(summary.error is not None for summary in summaries)
        assert all(summary.time == 0.0 for summary in summaries)

    def test_divergent_runs_flagged(self):
        fam = scalar_modes("x1")
        box = [[2e11, 3e11]]
        summaries = batch_simulate(fam, NO_SWITCH, ["0"], box, 4, 0, 5.0, 0.01)

        assert len(summaries) == 4
        assert all(summary.diverged for summary in summaries)

    @pytest.mark.parametrize(
        "box, n_runs", [([[-1.0, 1.0]], 2), ([[-1.0, 1.0], [1.0, -1.0]], 2), (None, 2)]
    )
    def test_invalid_box(self, box, n_runs):
        with pytest.raises(ValueError):
            batch_simulate(self.family, self.signal, ["1"], box, n_runs, 0, 1.0)

    def test_invalid_runs(self):
        with pytest.raises(ValueError):
            batch_simulate(self.family, self.signal, ["1"], [[0, 1], [0, 1]], 0, 0, 1.0)
