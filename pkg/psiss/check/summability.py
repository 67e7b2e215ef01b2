"""Provides the switch series summability estimate."""

import math
from typing import Iterable

import numpy as np

from psiss.ratefn import eval_rate

# last share of successive horizon changes that must be below PLATEAU_TOL
PLATEAU_SHARE = 0.2
PLATEAU_TOL = 1e-9


class Summability:
    """
    Partial sums ``sum_{tau_i <= t} exp(-rho(tau_i, t - tau_i))`` over horizons.

    The sum includes ``tau_0 = 0``. The series is declared numerically
    summable when the sums stop moving over the last fifth of the horizons;
    ``c2`` is then the largest sum observed. This is an empirical value for
    this signal, never a universal bound.

    ================  ===================================================================
    Property          Description
    ================  ===================================================================
    ``horizons``      **Array** of horizons ``t``
    ``sums``          **Array** of partial sums, one per horizon
    ``c2``            Largest partial sum
    ``nondecreasing`` **True** when the sums never decrease along the horizons
    ``converged``     **True** when the sums plateau (changes below 1e-9)
    ================  ===================================================================

    .. code-block:: python

        from psiss.check.summability import Summability
        from psiss.ratefn import RateFunction

        result = Summability(RateFunction.linear(1.0), signal, range(1, 1001))
        print(result.converged, result.c2)
    """

    def __init__(self, rho, signal, horizons: Iterable[float]):
        """Initialize and compute the partial sums at each horizon."""
        horizons = np.asarray(sorted(float(t) for t in horizons))
        if not horizons.size or horizons[0] < 0:
            raise ValueError("horizons expected to be a nonempty list of reals >= 0")

        self.rho = rho
        self.signal = signal
        self.horizons = horizons
        # correctly rounded, so adding a nonnegative term never lowers a sum
        self.sums = np.array([math.fsum(self.terms(t)) for t in horizons])

    def terms(self, t: float) -> np.ndarray:
        """Series terms ``exp(-rho(tau_i, t - tau_i))`` for every ``tau_i <= t``."""

        taus = np.asarray(self.signal.taus)
        taus = taus[taus <= t]
        return np.exp(-eval_rate(self.rho, taus, t - taus))

    def partial_sums(self, t: float) -> np.ndarray:
        """Running sums over the retained terms, most recent switch first."""
        return np.cumsum(self.terms(t)[::-1])

    @property
    def c2(self) -> float:
        """Largest partial sum, the estimate of the series bound."""
        return float(np.max(self.sums))

    @property
    def nondecreasing(self) -> bool:
        """**True** when the partial sums never decrease."""
        return bool(np.all(np.diff(self.sums) >= 0))

    @property
    def converged(self) -> bool:
        """**True** when the last partial sums have plateaued."""
        changes = np.abs(np.diff(self.sums))
        if not changes.size:
            return False

        tail = max(1, math.ceil(PLATEAU_SHARE * changes.size))
        return bool(np.all(changes[-tail:] < PLATEAU_TOL))

    def dominated_by(self, bound: float) -> bool:
        """True when every partial sum is at most ``bound``."""
        return bool(np.all(self.sums <= bound))
