"""Provides the average dwell time check."""

from collections import namedtuple

import numpy as np

from psiss.check import SIGNAL_TOL
from psiss.validators import Validators


class AverageDwellTime:
    """
    Check ``N(s, t) <= n0 + (t - s) / tau_a`` on grid and switching-instant intervals.

    An interval starting at a switching instant is taken as its left limit,
    so the switch at the start counts. A violation's ``start`` is then that
    instant.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``passed``          **True** when no interval has too many switches
    ``violation``       First violating interval as ``(start, end, count, bound)``
    ==================  ===============================================================

    .. code-block:: python

        from psiss.check.average_dwell_time import AverageDwellTime
        from psiss.signal import SwitchingSignal

        sig = SwitchingSignal([0, 1, 2, 3, 4, 5], [1, 2, 1, 2, 1, 2])
        AverageDwellTime(sig, tau_a=1.0, n0=1.0, horizon=5.0).passed   # True
    """

    Violation = namedtuple("Violation", ["start", "end", "count", "bound"])

    def __init__(
        self, signal, tau_a: float, n0: float, horizon: float, grid_step: float = 0.01
    ):
        """Initialize and check the dwell time inequality on every interval."""
        if not Validators._validate_positive(tau_a):
            raise ValueError("tau_a expected to be > 0")
        if not Validators._validate_nonnegative(n0):
            raise ValueError("n0 expected to be >= 0")

        self.tau_a = float(tau_a)
        self.n0 = float(n0)

        points = signal.evaluation_points(horizon, grid_step)
        counts = signal.count_profile(None, points)
        left_counts = signal.count_profile(None, points, left=True)
        self._violation = None

        for end_index in range(1, len(points)):
            starts = points[:end_index]
            end = points[end_index]
            values = counts[end_index] - left_counts[:end_index]
            bound = self.n0 + (end - starts) / self.tau_a
            failed = values > bound + SIGNAL_TOL
            if np.any(failed):
                k = int(np.argmax(failed))
                self._violation = AverageDwellTime.Violation(
                    float(starts[k]), float(end), int(values[k]), float(bound[k])
                )
                break

    @property
    def passed(self) -> bool:
        """**True** when no interval violates the inequality."""
        return self._violation is None

    @property
    def violation(self):
        """First violating interval, or None."""
        return self._violation
