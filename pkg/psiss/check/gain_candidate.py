"""Provides the class-K-infinity candidacy check of the gain."""

import numpy as np

from psiss.validators import Validators


class GainCandidate:
    """
    Check that ``gamma(0) = 0`` and that ``gamma`` increases strictly on samples.

    ===================  ===============================================================
    Property             Description
    ===================  ===============================================================
    ``at_zero``          Value of ``gamma(0)``
    ``zero_at_zero``     **True** when ``|gamma(0)| <= 1e-12``
    ``increasing``       **True** when ``gamma`` strictly increases over the samples
    ``passed``           Both of the above
    ===================  ===============================================================
    """

    def __init__(self, family, r_max: float = 1000.0, n_samples: int = 1000):
        """Initialize and sample ``gamma`` on ``[0, r_max]``."""
        if not Validators._validate_positive(r_max):
            raise ValueError("r_max expected to be > 0")
        if not Validators._validate_count(n_samples) or n_samples < 2:
            raise ValueError("n_samples expected to be an integer >= 2")

        self.samples = np.linspace(0.0, r_max, n_samples)
        self.values = np.broadcast_to(family.gain(self.samples), self.samples.shape)
        self.at_zero = float(family.gain(0.0))

    @property
    def zero_at_zero(self) -> bool:
        """**True** when ``gamma(0)`` vanishes."""
        return abs(self.at_zero) <= 1e-12

    @property
    def increasing(self) -> bool:
        """**True** when ``gamma`` is strictly increasing on the samples."""
        return bool(np.all(np.diff(self.values) > 0))

    @property
    def passed(self) -> bool:
        """**True** when ``gamma`` is a class-K candidate."""
        return self.zero_at_zero and self.increasing
