"""Provides the rate growth condition check."""

import math
from collections import namedtuple
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from psiss.exceptions import PreconditionError
from psiss.ratefn import RateFunction, eval_rate
from psiss.validators import Validators

# coefficients within this distance of zero count as zero
COEFFICIENT_TOL = 1e-12

WeightedRate = namedtuple("WeightedRate", ["weight", "rate", "label"])


class ConditionC1:
    """
    Check the growth condition

    ``-sum_S |lam_j| rho_j(r,s) + sum_U |lam_k| rho_k(r,s) + sum_E ln(mu_mn) rho_mn(r,s)
    <= c1 - rho(r,s)``

    on a grid of ``s`` and, exactly, power by power of ``s``. The implemented
    rate functions do not depend on ``r`` so the grid runs over ``s`` only.

    ====================  =============================================================
    Property              Description
    ====================  =============================================================
    ``passed``            Exact verdict when decidable, the grid verdict otherwise
    ``grid_passed``       **True** when no grid point violates the condition
    ``exact``             **True**/**False** from the coefficients, None if mixed
    ``worst_slack``       Largest ``lhs - (c1 - rho)`` on the grid
    ``worst_s``           Grid point attaining ``worst_slack``
    ``lhs_coefficients``  **Dict** power -> coefficient of the left-hand side
    ``coefficients``      **Dict** power -> coefficient of ``lhs + rho - c1``
    ``stated_mismatch``   **True** when given ``stated_lhs`` disagrees with the
                          recomputed left-hand side
    ====================  =============================================================

    .. code-block:: python

        import psiss

        iss = psiss.SwitchedISS(family, bounds)
        result = iss.condition_c1(rho, c1=0.0)

        print(result.lhs_coefficients)   # {1.0: 4.9e-05, 1.5: 0.001558}
        print(result.passed)             # False
    """

    def __init__(
        self,
        family,
        bounds,
        rho: RateFunction,
        c1: float = 0.0,
        s_max: float = 100.0,
        n_points: int = 500,
        stated_lhs: Optional[Dict[float, float]] = None,
    ):
        """
        Initialize and evaluate the growth condition of a family and its bounds.

        :param rho: Certificate rate function, ``rho(0, 0)`` must be 0.
        :param c1: Constant on the right-hand side.
        :param s_max: Upper end of the ``s`` grid ``[0, s_max]``.
        :param n_points: Number of grid points.
        :param stated_lhs: Claimed left-hand side coefficients (power -> coef)
            to compare with the recomputed ones.
        """

        weighted = []
        for mode, bound in bounds.stable.items():
            weight = -abs(family.lam(mode))
            weighted.append(WeightedRate(weight, bound.rate, f"stable {mode}"))
        for mode, bound in bounds.unstable.items():
            weight = abs(family.lam(mode))
            weighted.append(WeightedRate(weight, bound.rate, f"unstable {mode}"))
        for (m, n), bound in bounds.switches.items():
            weight = math.log(family.mu(m, n))
            weighted.append(WeightedRate(weight, bound.rate, f"switches {m}->{n}"))

        self._evaluate(weighted, rho, c1, s_max, n_points, stated_lhs)

    @classmethod
    def from_weighted_rates(
        cls,
        weighted: Iterable[Tuple[float, RateFunction]],
        rho: RateFunction,
        c1: float = 0.0,
        s_max: float = 100.0,
        n_points: int = 500,
        stated_lhs: Optional[Dict[float, float]] = None,
    ) -> "ConditionC1":
        """Evaluate the condition for an explicit left-hand side ``sum(weight * rate)``."""

        report = cls.__new__(cls)
        weighted = [
            WeightedRate(float(weight), rate, f"term {k}")
            for k, (weight, rate) in enumerate(weighted)
        ]
        report._evaluate(weighted, rho, c1, s_max, n_points, stated_lhs)

        return report

    def _evaluate(self, weighted, rho, c1, s_max, n_points, stated_lhs):
        if rho.offset != 0:
            raise PreconditionError("rho(0, 0) expected to be 0")
        if not Validators._validate_positive(s_max):
            raise ValueError("s_max expected to be > 0")
        if not Validators._validate_count(n_points):
            raise ValueError("n_points expected to be an integer >= 1")

        self.weighted = list(weighted)
        self.rho = rho
        self.c1 = float(c1)
        self.stated_lhs = dict(stated_lhs) if stated_lhs else None

        self.s = np.linspace(0.0, s_max, n_points)
        self.lhs = self.lhs_at(self.s)
        self.rhs = self.c1 - eval_rate(rho, 0.0, self.s)
        self.slack = self.lhs - self.rhs

        lhs_coefficients = {}
        for weight, rate, _ in self.weighted:
            for power, coef in rate.coefficients().items():
                previous = lhs_coefficients.get(power, 0.0)
                lhs_coefficients[power] = previous + weight * coef
        self.lhs_coefficients = dict(sorted(lhs_coefficients.items()))

        coefficients = dict(self.lhs_coefficients)
        for power, coef in rho.coefficients().items():
            coefficients[power] = coefficients.get(power, 0.0) + coef
        coefficients[0.0] = coefficients.get(0.0, 0.0) - self.c1
        self.coefficients = dict(sorted(coefficients.items()))

    def lhs_at(self, s):
        """Left-hand side at ``s`` (scalar or array)."""

        total = np.zeros(np.shape(s))
        for weight, rate, _ in self.weighted:
            total = total + weight * eval_rate(rate, 0.0, s)

        return total

    @property
    def grid_passed(self) -> bool:
        """**True** when the inequality holds at every grid point."""
        tolerance = COEFFICIENT_TOL * (1.0 + np.abs(self.rhs))
        return bool(np.all(self.slack <= tolerance))

    @property
    def worst_slack(self) -> float:
        """Largest ``lhs - rhs`` on the grid."""
        return float(np.max(self.slack))

    @property
    def worst_s(self) -> float:
        """Grid point of the largest slack."""
        return float(self.s[int(np.argmax(self.slack))])

    @property
    def exact(self) -> Optional[bool]:
        """
        Decide the condition from the coefficients of ``lhs + rho - c1``.

        All coefficients nonpositive means it holds for every ``s >= 0``. A
        positive leading coefficient (growth for large ``s``) or a positive
        constant (failure at ``s = 0``) means it fails. Otherwise None.
        """

        significant = {
            p: c for p, c in self.coefficients.items() if abs(c) > COEFFICIENT_TOL
        }
        if all(c < 0 for c in significant.values()):
            return True
        if significant[max(significant)] > 0 or significant.get(0.0, 0.0) > 0:
            return False

        return None

    @property
    def passed(self) -> bool:
        """Exact verdict when available, grid verdict otherwise."""
        exact = self.exact
        return self.grid_passed if exact is None else exact

    @property
    def stated_mismatch(self) -> Optional[bool]:
        """Whether stated and recomputed coefficients differ; None without stated ones."""
        if self.stated_lhs is None:
            return None

        computed_powers = {
            p for p, c in self.lhs_coefficients.items() if abs(c) > COEFFICIENT_TOL
        }
        powers = set(self.stated_lhs) | computed_powers
        for power in powers:
            stated = self.stated_lhs.get(power, 0.0)
            computed = self.lhs_coefficients.get(power, 0.0)
            if abs(stated - computed) > COEFFICIENT_TOL * (1.0 + abs(stated)):
                return True

        return False
