"""Provides the Lyapunov sandwich check."""

from collections import namedtuple

import numpy as np

from psiss.check import SAMPLE_TOL
from psiss.sampling import evaluate_samples, sample_box
from psiss.validators import Validators


class LyapunovSandwich:
    """
    Check ``alpha_lower(|x|) <= V_i(x) <= alpha_upper(|x|)`` at sampled states.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``passed``          **True** when no sampled state violates either inequality
    ``violations``      **List** of violating samples
    ``worst_margin``    Largest ``max(lower - V, V - upper)`` over all samples
    ``n_samples``       Number of sampled states
    ==================  ===============================================================

    .. code-block:: python

        import psiss

        iss = psiss.SwitchedISS(family)
        result = iss.lyapunov_sandwich(1, [(-10, 10), (-10, 10)], n_samples=1000)

        for violation in result:
            # Violation(
            #   state=array([3.2, -1.5]),
            #   value=5.12,
            #   lower=5.5,
            #   upper=6.9,
            #   margin=0.38,
            #   cause=None
            # )

            print(violation.state, violation.margin)
    """

    Violation = namedtuple(
        "Violation", ["state", "value", "lower", "upper", "margin", "cause"]
    )

    def __init__(self, family, mode, box, n_samples: int = 1000, seed: int = 0):
        """
        Initialize and sample the sandwich inequalities of one mode.

        :param mode: Mode index whose Lyapunov function is checked.
        :param box: State box as ``(low, high)`` pairs, one per coordinate.
        :param n_samples: Number of sampled states.
        :param seed: Seed of the random part of the sample.
        """

        if not Validators._validate_mode(mode, family.modes):
            raise ValueError(f"mode {mode!r} is not a mode of the family")
        if not Validators._validate_box(box, family.state_dim):
            raise ValueError("box expected to be (low, high) pairs, one per state")

        self.mode = mode
        self._states = sample_box(box, n_samples, seed)

        values, causes = evaluate_samples(
            lambda x: family.lyapunov(mode, x), self._states
        )
        norms = np.linalg.norm(self._states, axis=1)
        lower = family.alpha_lower(norms)
        upper = family.alpha_upper(norms)

        self._margins = np.maximum(lower - values, values - upper)
        slack = SAMPLE_TOL * (1.0 + np.maximum(np.abs(lower), np.abs(upper)))

        self._violations = []
        for i in range(len(self._states)):
            if i in causes or self._margins[i] > slack[i]:
                self._violations.append(
                    LyapunovSandwich.Violation(
                        state=self._states[i],
                        value=values[i],
                        lower=lower[i],
                        upper=upper[i],
                        margin=self._margins[i],
                        cause=causes.get(i),
                    )
                )

    def __getitem__(self, index):
        """Get a specific violation."""
        return self._violations[index]

    def __iter__(self):
        """Iterate over the violating samples."""
        for violation in self._violations:
            yield violation

    def __len__(self):
        """Get the number of violating samples."""
        return len(self._violations)

    @property
    def n_samples(self) -> int:
        """Number of sampled states."""
        return len(self._states)

    @property
    def passed(self) -> bool:
        """True when no sampled state violates the sandwich (pass at sampled points)."""
        return not self._violations

    @property
    def violations(self) -> list:
        """**List** of violations."""
        return list(self._violations)

    @property
    def worst_margin(self) -> float:
        """Largest finite margin, or nan."""
        if not np.any(np.isfinite(self._margins)):
            return float("nan")
        return float(np.nanmax(self._margins))
