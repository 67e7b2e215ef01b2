"""Provides the Lyapunov decay check."""

from collections import namedtuple

import numpy as np

from psiss.check import SAMPLE_TOL
from psiss.expr import differentiate, evaluate
from psiss.sampling import evaluate_samples, sample_box
from psiss.validators import Validators


class LyapunovDecay:
    """
    Check ``<grad V_i(x), f_i(x, v)> <= -lam_i V_i(x) + gamma(|v|)`` at samples.

    The gradient is obtained by symbolic differentiation of ``V_i``. Samples
    are drawn jointly from the state and input boxes, or given explicitly.

    ==================  ===============================================================
    Property            Description
    ==================  ===============================================================
    ``passed``          **True** when no sample violates the decay inequality
    ``violations``      **List** of violating samples
    ``worst_margin``    Largest ``lhs - rhs`` over all samples
    ``worst``           The sample attaining ``worst_margin``
    ==================  ===============================================================

    .. code-block:: python

        import psiss

        iss = psiss.SwitchedISS(family)
        result = iss.lyapunov_decay(1, states=[[1.0, 0.0]], inputs=[[0.0]])

        print(result.passed, result.worst_margin)   # False 0.7164...
    """

    Sample = namedtuple("Sample", ["state", "input", "lhs", "rhs", "margin", "cause"])

    def __init__(
        self,
        family,
        mode,
        state_box=None,
        input_box=None,
        n_samples: int = 1000,
        seed: int = 0,
        states=None,
        inputs=None,
    ):
        """
        Initialize and sample the decay inequality of one mode.

        :param state_box: State box as ``(low, high)`` pairs.
        :param input_box: Input box as ``(low, high)`` pairs (omit when the
            family has no inputs).
        :param states: Explicit sample states of shape ``(n, d)``; replaces the boxes.
        :param inputs: Explicit sample inputs of shape ``(n, m)``; zero when omitted.
        """

        if not Validators._validate_mode(mode, family.modes):
            raise ValueError(f"mode {mode!r} is not a mode of the family")

        d, m = family.state_dim, family.input_dim

        if states is not None:
            states = np.atleast_2d(np.asarray(states, dtype=float))
            if states.shape[1] != d:
                raise ValueError(f"states expected to have {d} columns")
            if inputs is None:
                inputs = np.zeros((len(states), m))
            inputs = np.asarray(inputs, dtype=float).reshape(len(states), m)
        else:
            if not Validators._validate_box(state_box, d):
                raise ValueError(
                    "state_box expected to be (low, high) pairs, one per state"
                )
            if m and not Validators._validate_box(input_box, m):
                raise ValueError(
                    "input_box expected to be (low, high) pairs, one per input"
                )
            box = list(state_box) + (list(input_box) if m else [])
            points = sample_box(box, n_samples, seed)
            states, inputs = points[:, :d], points[:, d:]

        self.mode = mode
        sub = family[mode]
        gradient = [differentiate(sub.V, name) for name in family.state_variables]

        def lhs(columns):
            xs, vs = columns[:d], columns[d:]
            values = family.bindings(xs, vs)
            field = family.vector_field(mode, xs, vs)
            return sum(evaluate(g, values) * f for g, f in zip(gradient, field))

        def rhs(columns):
            xs, vs = columns[:d], columns[d:]
            input_norm = np.linalg.norm(vs, axis=0) if m else np.zeros(xs.shape[1:])
            return -sub.lam * family.lyapunov(mode, xs) + family.gain(input_norm)

        points = np.hstack([states, inputs])
        lhs_values, lhs_causes = evaluate_samples(lhs, points)
        rhs_values, rhs_causes = evaluate_samples(rhs, points)
        causes = {**rhs_causes, **lhs_causes}

        self._margins = lhs_values - rhs_values
        slack = SAMPLE_TOL * (1.0 + np.abs(rhs_values))

        self._samples = [
            LyapunovDecay.Sample(
                state=states[i],
                input=inputs[i],
                lhs=lhs_values[i],
                rhs=rhs_values[i],
                margin=self._margins[i],
                cause=causes.get(i),
            )
            for i in range(len(points))
        ]
        self._violations = [
            sample
            for i, sample in enumerate(self._samples)
            if i in causes or self._margins[i] > slack[i]
        ]

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
        """Number of sampled ``(x, v)`` points."""
        return len(self._samples)

    @property
    def passed(self) -> bool:
        """**True** when no sample violates the decay inequality."""
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

    @property
    def worst(self):
        """Sample with the largest finite margin, or None."""
        if not np.any(np.isfinite(self._margins)):
            return None
        return self._samples[int(np.nanargmax(self._margins))]
