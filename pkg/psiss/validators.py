"""Provides validators for init arguments in checks and generators."""

import math

import numpy as np


class Validators:
    """Validators used for validating arguments in initializers for checks."""

    def _validate_positive(value) -> bool:
        """Validate argument is a finite real strictly greater than zero."""

        try:
            value = float(value)
        except (TypeError, ValueError):
            return False

        return math.isfinite(value) and value > 0

    def _validate_nonnegative(value) -> bool:
        """Validate argument is a finite real greater than or equal to zero."""

        try:
            value = float(value)
        except (TypeError, ValueError):
            return False

        return math.isfinite(value) and value >= 0

    def _validate_count(value) -> bool:
        """Validate argument is an integer of at least one."""

        if isinstance(value, bool):
            return False

        return isinstance(value, (int, np.integer)) and value >= 1

    def _validate_box(box, dim=None) -> bool:
        """
        Validate argument is a hyper-rectangle given as (low, high) pairs.

        Degenerate sides (low == high) are allowed.
        """

        try:
            bounds = np.asarray(box, dtype=float)
        except (TypeError, ValueError):
            return False

        if bounds.ndim != 2 or bounds.shape[1] != 2 or bounds.shape[0] == 0:
            return False
        if dim is not None and bounds.shape[0] != dim:
            return False
        if not np.all(np.isfinite(bounds)):
            return False

        return bool(np.all(bounds[:, 0] <= bounds[:, 1]))

    def _validate_mode(mode, modes) -> bool:
        """Validate argument is one of the declared mode indices."""

        return not isinstance(mode, bool) and mode in modes
