"""
Provides class FK-infinity rate functions.

A rate function is ``rho(r, s) = offset + sum(coef * s**power)`` with
nonnegative coefficients and positive powers. The first argument is accepted
everywhere for interface compatibility but the implemented forms do not depend
on it.

.. code-block:: python

    from psiss.ratefn import RateFunction, RateTerm, eval_rate, invert_rate

    rho = RateFunction([RateTerm(0.2030, 1.0), RateTerm(0.0001, 1.5)])
    eval_rate(rho, 0.0, 1.0)        # 0.2031
    invert_rate(rho, 10.0, 0.2031)  # ~1.0

"""

import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Dict, Iterable, Tuple

import numpy as np

from scipy.integrate import quad
from scipy.optimize import bisect
from scipy.special import gamma as gamma_function

from .exceptions import DomainError, InversionError
from .validators import Validators

BISECTION_MAX_ITER = 200
BISECTION_LEVEL_TOL = 1e-10
BRACKET_MAX_DOUBLINGS = 1000
QUAD_TOL = 1e-10

RateTerm = namedtuple("RateTerm", ["coef", "power"])


@dataclass(frozen=True)
class RateFunction:
    """
    Nonnegative combination of powers of ``s`` plus a constant offset.

    ===================     ========================================================
    Attribute               Description
    ===================     ========================================================
    ``terms``               **Tuple** of :class:`RateTerm` ``(coef, power)``
    ``offset``              Constant ``k2 >= 0``, the value at ``s = 0``
    ===================     ========================================================
    """

    terms: Tuple[RateTerm, ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        """Normalize the terms and validate coefficients and powers."""
        terms = tuple(RateTerm(float(coef), float(power)) for coef, power in self.terms)
        for term in terms:
            if not Validators._validate_nonnegative(term.coef):
                raise ValueError("rate term coefficient expected to be >= 0")
            if not Validators._validate_positive(term.power):
                raise ValueError("rate term power expected to be > 0")
        if not Validators._validate_nonnegative(self.offset):
            raise ValueError("rate offset expected to be >= 0")

        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def linear(cls, slope: float, offset: float = 0.0) -> "RateFunction":
        """``rho(r, s) = slope * s + offset``."""
        return cls((RateTerm(slope, 1.0),), offset)

    @property
    def is_increasing(self) -> bool:
        """True when some term has a positive coefficient."""
        return any(term.coef > 0 for term in self.terms)

    def __call__(self, r, s):
        """Evaluate at ``(r, s)``; see :func:`eval_rate`."""
        return eval_rate(self, r, s)

    def __add__(self, other: "RateFunction") -> "RateFunction":
        """Sum of two rate functions."""
        if not isinstance(other, RateFunction):
            return NotImplemented
        return RateFunction(self.terms + other.terms, self.offset + other.offset)

    def scaled(self, factor: float) -> "RateFunction":
        """Multiply every coefficient and the offset by ``factor >= 0``."""

        if not Validators._validate_nonnegative(factor):
            raise ValueError("factor expected to be >= 0")

        return RateFunction(
            tuple(RateTerm(term.coef * factor, term.power) for term in self.terms),
            self.offset * factor,
        )

    def coefficients(self) -> Dict[float, float]:
        """Combined coefficient per power of ``s``; power ``0.0`` is the offset."""

        coefficients = {0.0: self.offset} if self.offset else {}
        for coef, power in self.terms:
            coefficients[power] = coefficients.get(power, 0.0) + coef

        return coefficients

    def __str__(self):
        """Readable polynomial form."""
        parts = [f"{coef!r}*s^{power!r}" for coef, power in self.terms]
        if self.offset or not parts:
            parts.append(repr(self.offset))
        return " + ".join(parts)


def eval_rate(rho: RateFunction, r, s):
    """
    Evaluate ``rho(r, s)``; ``s`` may be a numpy array.

    :raises DomainError: when ``s`` is negative.
    """

    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise DomainError("rate functions are defined for s >= 0 only")

    value = np.full(s_arr.shape, rho.offset)
    for coef, power in rho.terms:
        value = value + coef * np.power(s_arr, power)

    if value.ndim == 0:
        return float(value)

    return value


def invert_rate(rho: RateFunction, t: float, level: float) -> float:
    """
    Solve ``rho(t - s, s) = level`` for ``s`` by bisection.

    The upper end of the bracket starts at 1 and is doubled until it brackets
    the level.

    :raises InversionError: when the level lies below ``rho(., 0)`` or cannot
        be bracketed.
    """

    level = float(level)

    def residual(s):
        return eval_rate(rho, t - s, s) - level

    at_zero = residual(0.0)
    if at_zero > BISECTION_LEVEL_TOL * max(1.0, abs(level)):
        raise InversionError(f"level {level!r} lies below rho(., 0) = {rho.offset!r}")
    if at_zero >= 0:
        return 0.0
    if not rho.is_increasing:
        raise InversionError(f"constant rate function never reaches level {level!r}")

    upper = 1.0
    for _ in range(BRACKET_MAX_DOUBLINGS):
        if residual(upper) >= 0:
            break
        upper *= 2.0
    else:
        raise InversionError(f"level {level!r} could not be bracketed")

    if residual(upper) == 0:
        return upper

    try:
        root = bisect(residual, 0.0, upper, xtol=1e-15, maxiter=BISECTION_MAX_ITER)
    except (RuntimeError, ValueError) as e:
        raise InversionError(str(e)) from None

    if abs(residual(root)) > BISECTION_LEVEL_TOL * max(1.0, abs(level)):
        raise InversionError(f"bisection did not reach level {level!r}")

    return root


def affine_summability_bound(k1: float, k2: float, d: float, n0: float) -> float:
    """
    Bound the switch series for ``rho(r, s) = k1*s + k2`` under spacing ``d``.

    Returns ``exp(-k2) * (1 + n0 + 1/(exp(k1*d) - 1))``, the geometric series
    bound for switches placed ``d`` apart plus ``n0`` extra switches.
    """

    if not (Validators._validate_positive(k1) and Validators._validate_positive(d)):
        raise DomainError("k1 and d expected to be > 0")

    return math.exp(-k2) * (1.0 + n0 + 1.0 / math.expm1(k1 * d))


def three_halves_integral(k1: float, d: float) -> float:
    """Integral of ``exp(-k1 * d**1.5 * x**1.5)`` over ``[0, inf[`` by quadrature."""

    if not (Validators._validate_positive(k1) and Validators._validate_positive(d)):
        raise DomainError("k1 and d expected to be > 0")

    a = k1 * d**1.5
    value, _ = quad(
        lambda x: math.exp(-a * x**1.5),
        0.0,
        math.inf,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
    )

    return value


def three_halves_integral_closed_form(k1: float, d: float) -> float:
    """Gamma-function value ``Gamma(5/3) / (k1 * d**1.5)**(2/3)`` of the same integral."""

    if not (Validators._validate_positive(k1) and Validators._validate_positive(d)):
        raise DomainError("k1 and d expected to be > 0")

    return float(gamma_function(5.0 / 3.0)) / (k1 * d**1.5) ** (2.0 / 3.0)


def three_halves_summability_bound(k1: float, k2: float, d: float, n0: float) -> float:
    """
    Bound the switch series for ``rho(r, s) = k1*s**1.5 + k2`` under spacing ``d``.

    Returns ``exp(-k2) * (1 + n0 + I)`` where ``I`` is
    :func:`three_halves_integral` (integral test).
    """

    return math.exp(-k2) * (1.0 + n0 + three_halves_integral(k1, d))


def sum_rates(rates: Iterable[RateFunction]) -> RateFunction:
    """Pointwise sum of rate functions; the empty sum is zero."""
    return sum(rates, RateFunction())
