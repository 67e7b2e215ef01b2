"""Provides the multiple-Lyapunov compatibility check."""

from collections import namedtuple

import numpy as np

from psiss.check import SAMPLE_TOL
from psiss.exceptions import DegenerateLyapunovError
from psiss.sampling import evaluate_samples, sample_box
from psiss.validators import Validators


class MuCompatibility:
    """
    Check ``V_j(x) <= mu_ij V_i(x)`` at sampled nonzero states for a transition.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``mu``              The declared ``mu_ij``
    ``mu_hat``          Smallest feasible ``mu_ij`` over the samples, ``max V_j/V_i``
    ``witness``         Sampled state attaining ``mu_hat``
    ``passed``          **True** when ``mu_hat <= mu`` (up to 1e-12)
    ``violations``      **List** of samples with ``V_j/V_i > mu`` or where
                        ``V_i`` or ``V_j`` cannot be evaluated
    ==================  ===============================================================

    .. code-block:: python

        import psiss

        iss = psiss.SwitchedISS(family)
        result = iss.mu_compatibility((2, 1), [(-10, 10), (-10, 10)])

        print(result.mu_hat, result.mu, result.passed)   # 1.2499... 2.0 True
    """

    Violation = namedtuple("Violation", ["state", "ratio", "cause"])

    def __init__(self, family, pair, box, n_samples: int = 1000, seed: int = 0):
        """
        Initialize and sample the compatibility ratio of one transition.

        :param pair: Admissible transition ``(i, j)``.
        :param box: State box as ``(low, high)`` pairs.

        :raises DegenerateLyapunovError: when ``V_i`` is not positive at a
            sampled nonzero state.
        """

        pair = tuple(pair)
        if pair not in family.transitions:
            raise ValueError(f"pair {pair!r} is not an admissible transition")
        if not Validators._validate_box(box, family.state_dim):
            raise ValueError("box expected to be (low, high) pairs, one per state")

        i, j = pair
        self.pair = pair
        self.mu = family.mu(i, j)

        states = sample_box(box, n_samples, seed)
        states = states[np.linalg.norm(states, axis=1) > 0]
        self.n_samples = len(states)

        v_i, causes_i = evaluate_samples(lambda x: family.lyapunov(i, x), states)
        v_j, causes_j = evaluate_samples(lambda x: family.lyapunov(j, x), states)
        causes = {**causes_j, **causes_i}
        degenerate = np.flatnonzero(v_i <= 0)
        if degenerate.size:
            state = states[degenerate[0]].tolist()
            raise DegenerateLyapunovError(
                f"V_{i} is not positive at nonzero state {state!r}"
            )

        # nan where either function failed
        ratios = v_j / v_i
        if np.any(np.isfinite(ratios)):
            best = int(np.nanargmax(ratios))
            self._mu_hat = float(ratios[best])
            self._witness = states[best]
        else:
            self._mu_hat, self._witness = float("nan"), None

        limit = self.mu + SAMPLE_TOL
        self._violations = [
            MuCompatibility.Violation(state, ratio, causes.get(k))
            for k, (state, ratio) in enumerate(zip(states, ratios))
            if k in causes or ratio > limit
        ]

    def __getitem__(self, index):
        """Get a specific violation."""
        return self._violations[index]

    def __iter__(self):
        """Iterate over the samples where ``V_j > mu V_i`` or evaluation failed."""
        for violation in self._violations:
            yield violation

    def __len__(self):
        """Number of violating samples."""
        return len(self._violations)

    @property
    def mu_hat(self) -> float:
        """Largest sampled ratio ``V_j / V_i``."""
        return self._mu_hat

    @property
    def witness(self):
        """State attaining ``mu_hat``."""
        return self._witness

    @property
    def passed(self) -> bool:
        """**True** when ``mu`` dominates every sampled ratio."""
        return not self._violations

    @property
    def violations(self) -> list:
        """**List** of violations."""
        return list(self._violations)
