"""Provides the Lyapunov cascade check along a trajectory."""

from collections import namedtuple

import numpy as np

from psiss.certificate import cascade_profile
from psiss.check.lyapunov_decay import LyapunovDecay
from psiss.check.mu_compatibility import MuCompatibility
from psiss.signal import SwitchingSignal

# relative slack: violation iff margin > CASCADE_TOL * (1 + bound)
CASCADE_TOL = 1e-9

PASS = "pass"
FAIL = "fail"
UNVERIFIED = "assumption-unverified"


class Cascade:
    """
    Check ``V_sigma(t)(x(t)) <= psi1(t) V_sigma(0)(x0) + gamma(|v|) psi2(t)`` along a trajectory.

    The bound only holds when the decay and compatibility inequalities hold
    where the trajectory goes, so those are first sampled on the trajectory's
    bounding box. When they fail the report is labeled
    ``assumption-unverified`` and makes no pass/fail claim.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``label``           ``pass``, ``fail`` or ``assumption-unverified``
    ``passed``          **True**/**False**, or None when unverified
    ``violations``      **List** of ``(time, value, bound, margin)``
    ``assumptions``     **List** of the sampled decay/compatibility reports
    ==================  ===============================================================
    """

    Violation = namedtuple("Violation", ["time", "value", "bound", "margin"])

    def __init__(
        self,
        trajectory,
        family,
        signal: SwitchingSignal,
        v_sup_gain: float = None,
        n_samples: int = 500,
        seed: int = 0,
    ):
        """
        Initialize and check the cascade bound at every grid point.

        :param v_sup_gain: Constant ``gamma(|v|)``; by default ``gamma`` of the
            running sup of the sampled input norm.
        """

        self.assumptions = self._sample_assumptions(
            trajectory, family, signal, n_samples, seed
        )

        times = trajectory.times
        values = np.empty(times.shape)
        for mode in set(trajectory.modes.tolist()):
            mask = trajectory.modes == mode
            values[mask] = family.lyapunov(mode, trajectory.states[mask].T)

        if v_sup_gain is None:
            running_sup = np.maximum.accumulate(trajectory.input_norms)
            gains = np.broadcast_to(family.gain(running_sup), times.shape)
        else:
            gains = np.full(times.shape, float(v_sup_gain))

        psi1, psi2 = cascade_profile(family, signal, times)
        v0 = float(family.lyapunov(signal.initial_mode, trajectory.x0))
        self.bounds = psi1 * v0 + gains * psi2
        self.margins = values - self.bounds

        failed = self.margins > CASCADE_TOL * (1.0 + np.abs(self.bounds))
        self._violations = [
            Cascade.Violation(
                float(times[k]),
                float(values[k]),
                float(self.bounds[k]),
                float(self.margins[k]),
            )
            for k in np.flatnonzero(failed)
        ]

    @staticmethod
    def _sample_assumptions(trajectory, family, signal, n_samples, seed):
        states, inputs = trajectory.states, trajectory.inputs
        state_box = list(zip(states.min(axis=0), states.max(axis=0)))
        input_box = list(zip(inputs.min(axis=0), inputs.max(axis=0)))

        reports = []
        for mode in sorted(set(trajectory.modes.tolist())):
            reports.append(
                LyapunovDecay(
                    family, mode, state_box, input_box, n_samples=n_samples, seed=seed
                )
            )
        pairs = {(m, n) for _, m, n in signal.switches if (m, n) in family.transitions}
        for pair in sorted(pairs):
            reports.append(
                MuCompatibility(family, pair, state_box, n_samples=n_samples, seed=seed)
            )

        return reports

    def __getitem__(self, index):
        """Get a specific violation."""
        return self._violations[index]

    def __iter__(self):
        """Iterate over the grid points where the bound fails."""
        for violation in self._violations:
            yield violation

    def __len__(self):
        """Number of violating grid points."""
        return len(self._violations)

    @property
    def assumptions_verified(self) -> bool:
        """**True** when every sampled decay and mu check passed."""
        return all(report.passed for report in self.assumptions)

    @property
    def label(self) -> str:
        """``pass``, ``fail`` or ``unverified``."""
        if not self.assumptions_verified:
            return UNVERIFIED
        return PASS if not self._violations else FAIL

    @property
    def passed(self):
        """Outcome of the bound, or None when the assumptions did not verify."""
        if not self.assumptions_verified:
            return None
        return not self._violations

    @property
    def violations(self) -> list:
        """**List** of violations."""
        return list(self._violations)
