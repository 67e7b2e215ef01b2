"""Provides the ISS envelope check along a trajectory."""

from collections import namedtuple

import numpy as np

# relative slack: violation iff margin > ENVELOPE_TOL * (1 + bound)
ENVELOPE_TOL = 1e-9


class Envelope:
    """
    Check ``|x(t_k)| <= beta(|x0|, t_k) + chi(v_sup)`` at every grid point.

    ``v_sup`` defaults to the running sup of the sampled input norm, so each
    grid point uses ``|v|_[0, t_k]``.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``passed``          **True** when no grid point leaves the envelope
    ``violations``      **List** of ``(time, value, bound, margin)``
    ``worst_margin``    Largest ``|x(t_k)| - bound`` along the trajectory
    ==================  ===============================================================
    """

    Violation = namedtuple("Violation", ["time", "value", "bound", "margin"])

    def __init__(self, trajectory, certificate, v_sup: float = None):
        """Initialize and compare the trajectory with the certified envelope."""
        times = trajectory.times
        values = certificate.alpha(trajectory.norms)

        if v_sup is None:
            input_sup = np.maximum.accumulate(trajectory.input_norms)
        else:
            input_sup = np.full(times.shape, float(v_sup))

        x0_norm = float(np.linalg.norm(trajectory.x0))
        gains = np.broadcast_to(certificate.chi(input_sup), times.shape)
        self.bounds = certificate.beta(x0_norm, times) + gains
        self.margins = values - self.bounds

        failed = self.margins > ENVELOPE_TOL * (1.0 + np.abs(self.bounds))
        self._violations = [
            Envelope.Violation(
                float(times[k]),
                float(values[k]),
                float(self.bounds[k]),
                float(self.margins[k]),
            )
            for k in np.flatnonzero(failed)
        ]

    def __getitem__(self, index):
        """Get a specific violation."""
        return self._violations[index]

    def __iter__(self):
        """Iterate over the grid points above the envelope."""
        for violation in self._violations:
            yield violation

    def __len__(self):
        """Number of violating grid points."""
        return len(self._violations)

    @property
    def passed(self) -> bool:
        """**True** when the trajectory stays below the envelope."""
        return not self._violations

    @property
    def violations(self) -> list:
        """**List** of violations."""
        return list(self._violations)

    @property
    def worst_margin(self) -> float:
        """Largest ``alpha(|x|) - bound`` over the grid."""
        return float(np.max(self.margins))
