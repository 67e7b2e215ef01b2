"""Provides the switching-signal rate bound check."""

from collections import namedtuple
from typing import Iterable

import numpy as np

from psiss.check import SIGNAL_TOL
from psiss.ratefn import eval_rate
from psiss.validators import Validators

CONDITIONS = ("stable", "unstable", "switches")


class SignalBounds:
    """
    Check a switching signal against a :class:`~psiss.signal.RateBoundSet`.

    Every interval ``]r, r+u]`` whose endpoints lie on the grid
    ``{0, h, 2h, ..., horizon}`` or on a switching instant is checked for

    * ``T_j(r, r+u) >= -offset + rho_j(r, u)`` for each ISS mode ``j``,
    * ``T_k(r, r+u) <= offset + rho_k(r, u)`` for each non-ISS mode ``k``,
    * ``N_mn(r, r+u) <= offset + rho_mn(r, u)`` for each transition ``(m, n)``.

    Switch counts on an interval starting at a switching instant use the left
    limit there, so the switch at the start counts.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``passed``          **True** when no interval violates a bound
    ``violation``       The first violation found, or None
    ``violations``      **List** with the first violation of every violated bound
    ``n_points``        Number of grid points and switching instants used
    ==================  ===============================================================

    .. code-block:: python

        import psiss

        iss = psiss.SwitchedISS(family, bounds)
        result = iss.signal_bounds(signal, horizon=40.0, grid_step=0.01)

        if not result.passed:
            # Violation(
            #   condition='unstable', key=2, start=0.0, end=5.0,
            #   value=5.0, bound=3.08
            # )

            print(result.violation)

    :param anchored: Only check intervals ending at ``horizon``.
    :param aggregate: Check the total switch count against the summed
        transition bounds instead of each transition on its own.
    :param conditions: Subset of ``("stable", "unstable", "switches")``.
    """

    Violation = namedtuple(
        "Violation", ["condition", "key", "start", "end", "value", "bound"]
    )

    def __init__(
        self,
        bounds,
        signal,
        horizon: float,
        grid_step: float = 0.01,
        anchored: bool = False,
        aggregate: bool = False,
        conditions: Iterable[str] = CONDITIONS,
    ):
        """Initialize and check the requested bounds on the evaluation grid."""
        if not Validators._validate_positive(horizon):
            raise ValueError("horizon expected to be > 0")
        if not Validators._validate_positive(grid_step):
            raise ValueError("grid_step expected to be > 0")
        conditions = tuple(conditions)
        if not set(conditions) <= set(CONDITIONS):
            raise ValueError(f"conditions expected to be a subset of {CONDITIONS}")

        self.horizon = float(horizon)
        self.grid_step = float(grid_step)
        self.anchored = anchored
        self.aggregate = aggregate

        self._points = signal.evaluation_points(self.horizon, self.grid_step)
        self._violations = []

        for profile in self._profiles(bounds, signal, conditions):
            violation = self._first_violation(*profile)
            if violation is not None:
                self._violations.append(violation)

    def _profiles(self, bounds, signal, conditions):
        """Yield ``(condition, key, rate, offset, profile, start profile)`` per bound.

        The start profile is the cumulative value subtracted at interval starts:
        the profile itself for durations, its left limit for switch counts.
        """

        points = self._points
        if "stable" in conditions:
            for mode, bound in bounds.stable.items():
                profile = signal.activation_profile(mode, points)
                yield "stable", mode, bound.rate, bound.offset, profile, profile
        if "unstable" in conditions:
            for mode, bound in bounds.unstable.items():
                profile = signal.activation_profile(mode, points)
                yield "unstable", mode, bound.rate, bound.offset, profile, profile
        if "switches" in conditions:
            if self.aggregate:
                yield (
                    "switches",
                    None,
                    bounds.aggregate_switch_rate,
                    bounds.aggregate_switch_offset,
                    signal.count_profile(None, points).astype(float),
                    signal.count_profile(None, points, left=True).astype(float),
                )
            else:
                for pair, bound in bounds.switches.items():
                    profile = signal.count_profile(pair, points).astype(float)
                    left = signal.count_profile(pair, points, left=True).astype(float)
                    yield "switches", pair, bound.rate, bound.offset, profile, left

    def _first_violation(self, condition, key, rate, offset, profile, start_profile):
        points = self._points
        rows = [len(points) - 1] if self.anchored else range(len(points))

        for end_index in rows:
            starts = points[:end_index]
            if not starts.size:
                continue
            end = points[end_index]
            values = profile[end_index] - start_profile[:end_index]
            levels = eval_rate(rate, starts, end - starts)

            if condition == "stable":
                bound = levels - offset
                failed = values < bound - SIGNAL_TOL
            else:
                bound = levels + offset
                failed = values > bound + SIGNAL_TOL

            if np.any(failed):
                k = int(np.argmax(failed))
                return SignalBounds.Violation(
                    condition=condition,
                    key=key,
                    start=float(starts[k]),
                    end=float(end),
                    value=float(values[k]),
                    bound=float(bound[k]),
                )

        return None

    def __getitem__(self, index):
        """Get a specific violation."""
        return self._violations[index]

    def __iter__(self):
        """Iterate over the first violation of each failing bound."""
        for violation in self._violations:
            yield violation

    def __len__(self):
        """Number of failing bounds."""
        return len(self._violations)

    @property
    def n_points(self) -> int:
        """Number of evaluation points."""
        return len(self._points)

    @property
    def passed(self) -> bool:
        """**True** when every bound holds."""
        return not self._violations

    @property
    def violation(self):
        """First violation found, in the order stable, unstable, switches."""
        return self._violations[0] if self._violations else None

    @property
    def violations(self) -> list:
        """**List** of violations."""
        return list(self._violations)
