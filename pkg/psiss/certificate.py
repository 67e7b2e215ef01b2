"""
Provides the ISS certificate of a switched family under rate-bounded switching.

The certificate bounds every admissible trajectory by

``|x(t)| <= beta(|x0|, t) + chi(|v|_[0,t])`` with
``beta(r, s) = alpha_upper(r) * exp(c + c1 - rho(0, s))`` and
``chi(r) = gamma(r) * psi2_bar``.

.. code-block:: python

    from psiss.certificate import assemble_certificate

    result = assemble_certificate(family, bounds, rho, c1=0.0,
                                  horizons=range(1, 101), signals=[signal])

    if result.issued:
        print(result.beta(2.0, 5.0), result.chi(1.0))
    else:
        for reason in result.reasons:
            print(reason.condition, reason.witness)

"""

import logging
import math
from collections import namedtuple
from typing import Iterable, Sequence

import numpy as np

from .check.condition_c1 import ConditionC1
from .check.summability import Summability
from .exceptions import DomainError, PreconditionError
from .ratefn import RateFunction, eval_rate
from .report import Report
from .signal import SwitchingSignal, activation_duration, switch_count
from .validators import Validators

logger = logging.getLogger(__name__)

GROWTH_CONDITION = "growth-condition"
SUMMABILITY_CONDITION = "summability"

Reason = namedtuple("Reason", ["condition", "witness"])
AdtVerdict = namedtuple("AdtVerdict", ["holds", "threshold", "rho", "condition"])
AdtParameters = namedtuple("AdtParameters", ["n0", "tau_a"])
UniformRates = namedtuple("UniformRates", ["lam_stable", "lam_unstable", "mu"])


def _segments(family, signal: SwitchingSignal, t: float):
    """List ``(lam, length, ln mu of the entering switch)`` per holding interval up to ``t``."""

    if not Validators._validate_positive(t):
        raise ValueError("t expected to be > 0")
    signal.check_transitions(family.transitions)

    taus, modes = signal.taus, signal.modes
    segments = []
    for i, (tau, mode) in enumerate(zip(taus, modes)):
        if tau > t:
            break
        end = taus[i + 1] if i + 1 < len(taus) and taus[i + 1] <= t else t
        log_mu = math.log(family.mu(modes[i - 1], mode)) if i > 0 else 0.0
        segments.append((family.lam(mode), end - tau, log_mu))

    return segments


def compute_psi1(family, signal: SwitchingSignal, t: float) -> float:
    """
    ``exp(-sum lam_{sigma(tau_i)} S_{i+1} + sum ln mu)`` over holding times and switches up to ``t``.

    The last holding time is truncated at ``t``; a switch at ``t`` itself counts.
    """

    segments = _segments(family, signal, t)
    return math.exp(sum(-lam * length + log_mu for lam, length, log_mu in segments))


def compute_psi1_durations(family, signal: SwitchingSignal, t: float) -> float:
    """:func:`compute_psi1` evaluated from activation durations and switch counts."""

    if not Validators._validate_positive(t):
        raise ValueError("t expected to be > 0")
    signal.check_transitions(family.transitions)

    exponent = 0.0
    for mode in family.modes:
        exponent -= family.lam(mode) * activation_duration(signal, mode, 0.0, t)
    for (m, n), mu in family.transitions.items():
        exponent += math.log(mu) * switch_count(signal, (m, n), 0.0, t)

    return math.exp(exponent)


def compute_psi2(family, signal: SwitchingSignal, t: float) -> float:
    """
    Input weight of the Lyapunov cascade at ``t``.

    Each holding interval ``i`` contributes ``(1 - exp(-lam S)) / lam`` times
    the downstream factor: the ``mu`` of every later switch ``tau_{i+1} ..
    tau_N`` and the decay ``exp(-lam S)`` of every later interval. The last
    interval ``]tau_N, t]`` has factor 1.
    """

    total = 0.0
    for lam, length, log_mu in _segments(family, signal, t):
        # a switch multiplies everything accumulated so far by its mu
        total = math.exp(log_mu) * total
        decay = math.exp(-lam * length)
        total = decay * total + (1.0 - decay) / lam

    return total


def cascade_profile(family, signal: SwitchingSignal, times):
    """
    Vectorized ``(psi1, psi2)`` at each time in ``times``.

    Uses the interval recursion of :func:`compute_psi2`; at a switching instant
    the post-switch values are returned.
    """

    times = np.asarray(times, dtype=float)
    signal.check_transitions(family.transitions)
    taus, modes = np.asarray(signal.taus), signal.modes

    # values right after each switching instant
    log_psi1 = np.zeros(len(taus))
    psi2 = np.zeros(len(taus))
    for i in range(1, len(taus)):
        lam = family.lam(modes[i - 1])
        length = taus[i] - taus[i - 1]
        log_mu = math.log(family.mu(modes[i - 1], modes[i]))
        decay = math.exp(-lam * length)
        log_psi1[i] = log_psi1[i - 1] - lam * length + log_mu
        psi2[i] = math.exp(log_mu) * (decay * psi2[i - 1] + (1.0 - decay) / lam)

    index = np.clip(np.searchsorted(taus, times, side="right") - 1, 0, len(taus) - 1)
    lams = np.array([family.lam(mode) for mode in modes])[index]
    elapsed = times - taus[index]
    decay = np.exp(-lams * elapsed)

    psi1 = np.exp(log_psi1[index] - lams * elapsed)
    return psi1, decay * psi2[index] + (1.0 - decay) / lams


def lyapunov_cascade_bound(
    family, signal: SwitchingSignal, x0, v_sup_gain: float, t: float
) -> float:
    """
    Certified bound ``psi1(t) V_{sigma(0)}(x0) + v_sup_gain * psi2(t)`` on ``V_{sigma(t)}(x(t))``.

    :param v_sup_gain: ``gamma`` of the input sup norm on ``[0, t]``.
    """

    v0 = float(family.lyapunov(signal.initial_mode, np.asarray(x0, dtype=float)))
    psi1 = compute_psi1(family, signal, t)
    return psi1 * v0 + v_sup_gain * compute_psi2(family, signal, t)


def psi2_bar(
    family, rho: RateFunction, c: float, c1: float, signals, horizons
) -> float:
    """
    Input weight of ``chi``.

    ``sum_S 1/|lam_j| * sup_t sum_i exp(c + c1 - rho(t - tau_{i+1}))
    + sum_U 1/|lam_k| * sup_t sum_i exp(c + c1 - rho(t - tau_i))`` with
    ``tau_{N+1} := t``. Each sum takes its own supremum over signals and
    horizons.
    """

    stable_weight = sum(1.0 / abs(family.lam(j)) for j in family.stable)
    unstable_weight = sum(1.0 / abs(family.lam(k)) for k in family.unstable)

    best_after, best_before = 0.0, 0.0
    for signal in signals:
        taus = np.asarray(signal.taus)
        for t in horizons:
            current = taus[taus <= t]
            upcoming = np.append(current[1:], t)
            after = np.exp(c + c1 - eval_rate(rho, upcoming, t - upcoming)).sum()
            before = np.exp(c + c1 - eval_rate(rho, current, t - current)).sum()
            best_after = max(best_after, after)
            best_before = max(best_before, before)

    return float(stable_weight * best_after + unstable_weight * best_before)


class ISSCertificate:
    """
    Issued certificate: ``alpha(|x(t)|) <= beta(|x0|, t) + chi(|v|)`` with ``alpha`` the identity.

    ===================  ==============================================================
    Attribute            Description
    ===================  ==============================================================
    ``c``                Sum of every rate bound offset
    ``c1``               Constant of the growth condition
    ``c2``               Empirical bound of the switch series
    ``rho``              Certificate rate function, ``rho(0, 0) = 0``
    ``psi2_bar``         Input weight of ``chi``
    ``condition``        The :class:`~psiss.check.condition_c1.ConditionC1` report
    ===================  ==============================================================
    """

    issued = True

    def __init__(self, family, rho, c, c1, c2, psi2_bar, condition, summability):
        """Initialize the certificate from its assembled constants."""
        self.family = family
        self.rho = rho
        self.c = float(c)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.psi2_bar = float(psi2_bar)
        self.condition = condition
        self.summability = list(summability)

    def alpha(self, r):
        """Lower comparison function of the certificate, the identity."""
        return r

    def beta(self, r, s):
        """``alpha_upper(r) * exp(c + c1 - rho(0, s))``."""
        exponent = self.c + self.c1 - eval_rate(self.rho, 0.0, s)
        return self.family.alpha_upper(r) * np.exp(exponent)

    def chi(self, r):
        """``gamma(r) * psi2_bar``."""
        return self.family.gain(r) * self.psi2_bar

    def to_report(self) -> Report:
        """Render the certificate constants as a report document."""
        report = Report("iss certificate")
        report["status"] = "certified"
        report["c"] = self.c
        report["c1"] = self.c1
        report["c2"] = self.c2
        report["psi2_bar"] = self.psi2_bar
        report["rho"] = str(self.rho)
        _condition_lines(report, self.condition)
        report["summability"] = "pass"
        return report


class Refusal:
    """Structured refusal naming every failed condition and its witness."""

    issued = False

    def __init__(self, reasons, condition=None, summability=()):
        """Initialize the refusal with its failing conditions."""
        self.reasons = list(reasons)
        self.condition = condition
        self.summability = list(summability)

    def to_report(self) -> Report:
        """Render the refusal reasons as a report document."""
        report = Report("iss certificate")
        report["status"] = "refused"
        for k, reason in enumerate(self.reasons):
            report[f"refusal.{k}.condition"] = reason.condition
            report[f"refusal.{k}.witness"] = reason.witness
        if self.condition is not None:
            _condition_lines(report, self.condition)
        return report


def _condition_lines(report: Report, condition: ConditionC1):
    report["growth_condition"] = "pass" if condition.passed else "fail"
    report["growth_condition.worst_slack"] = condition.worst_slack
    report["growth_condition.worst_s"] = condition.worst_s
    for power, coef in condition.lhs_coefficients.items():
        report[f"growth_condition.lhs_coefficient.s^{power!r}"] = coef
    if condition.stated_lhs is not None:
        for power, coef in sorted(condition.stated_lhs.items()):
            report[f"growth_condition.stated_coefficient.s^{power!r}"] = coef
        mismatch = "yes" if condition.stated_mismatch else "no"
        report["growth_condition.stated_mismatch"] = mismatch


def assemble_certificate(
    family,
    bounds,
    rho: RateFunction,
    c1: float,
    horizons: Sequence[float],
    signals: Iterable[SwitchingSignal],
    stated_lhs=None,
    s_max: float = 100.0,
):
    """
    Run the growth and summability conditions and assemble the certificate.

    :return: :class:`ISSCertificate` when both conditions pass, otherwise a
        :class:`Refusal` naming the failed conditions.
    :raises PreconditionError: when ``rho(0, 0) != 0`` or the bounds do not
        cover the family.
    """

    if rho.offset != 0 or eval_rate(rho, 0.0, 0.0) != 0:
        raise PreconditionError("rho(0, 0) expected to be 0")
    bounds.validate_against(family)

    signals = list(signals)
    horizons = sorted(float(t) for t in horizons)

    condition = ConditionC1(
        family, bounds, rho, c1, s_max=s_max, stated_lhs=stated_lhs
    )
    logger.info(
        "growth condition %s (worst slack %g)",
        "holds" if condition.passed else "fails",
        condition.worst_slack,
    )

    series = [Summability(rho, signal, horizons) for signal in signals]

    reasons = []
    if not condition.passed:
        witness = f"s={condition.worst_s!r} slack={condition.worst_slack!r}"
        if condition.exact is False:
            coefficients = condition.coefficients.items()
            witness += " coefficients=" + ",".join(
                f"s^{p!r}:{c!r}" for p, c in coefficients
            )
        reasons.append(Reason(GROWTH_CONDITION, witness))
    for k, summability in enumerate(series):
        if not summability.converged:
            witness = f"signal {k} partial sums did not plateau"
            reasons.append(Reason(SUMMABILITY_CONDITION, witness))

    if reasons:
        failed = ", ".join(reason.condition for reason in reasons)
        logger.info("certificate refused: %s", failed)
        return Refusal(reasons, condition, series)

    c = bounds.total_offset
    c2 = max((summability.c2 for summability in series), default=0.0)
    weight = psi2_bar(family, rho, c, c1, signals, horizons)
    logger.info("certificate issued: c=%g c1=%g c2=%g psi2_bar=%g", c, c1, c2, weight)

    return ISSCertificate(family, rho, c, c1, c2, weight, condition, series)


def adt_mixed_verdict(
    lam_stable: float, lam_unstable: float, mu: float, rho_bar: float, tau_a: float
) -> AdtVerdict:
    """
    Average dwell time embedding for families with ISS and non-ISS modes.

    The embedding holds iff ``tau_a > ln(mu) / (lam_stable*(1 - rho_bar) - lam_unstable*rho_bar)``.
    When it holds, the induced linear rates (ISS activation ``(1 - rho_bar) s``,
    non-ISS activation ``rho_bar s``, switches ``s / tau_a``) are checked with
    ``c1 = 0`` and the tight ``rho(r, s) = (D - ln(mu)/tau_a) s``.

    :param lam_unstable: Magnitude of the non-ISS decay rate.
    :raises DomainError: when ``rho_bar`` is outside ``]0, lam_s/(lam_s + lam_u)[``.
    """

    lam_stable, lam_unstable = abs(lam_stable), abs(lam_unstable)
    if not (
        Validators._validate_positive(lam_stable)
        and Validators._validate_positive(lam_unstable)
    ):
        raise ValueError("decay rates expected to be nonzero")
    if not (Validators._validate_positive(mu) and Validators._validate_positive(tau_a)):
        raise ValueError("mu and tau_a expected to be > 0")

    upper = lam_stable / (lam_stable + lam_unstable)
    if not 0.0 < rho_bar < upper:
        raise DomainError(f"rho_bar expected in ]0, {upper!r}[")

    margin = lam_stable * (1.0 - rho_bar) - lam_unstable * rho_bar
    threshold = math.log(mu) / margin
    holds = tau_a > threshold
    if not holds:
        return AdtVerdict(False, threshold, None, None)

    rho = RateFunction.linear(max(margin - math.log(mu) / tau_a, 0.0))
    condition = ConditionC1.from_weighted_rates(
        [
            (-lam_stable, RateFunction.linear(1.0 - rho_bar)),
            (lam_unstable, RateFunction.linear(rho_bar)),
            (math.log(mu), RateFunction.linear(1.0 / tau_a)),
        ],
        rho,
        c1=0.0,
    )

    return AdtVerdict(True, threshold, rho, condition)


def adt_all_iss_verdict(lam0: float, mu: float, tau_a: float) -> AdtVerdict:
    """
    Average dwell time embedding for families whose modes are all ISS.

    Holds iff ``tau_a > ln(mu) / lam0``; then the rates ``s`` (ISS activation)
    and ``s / tau_a`` (switches) are checked with ``rho(r, s) = (lam0 - ln(mu)/tau_a) s``.
    """

    if not Validators._validate_positive(lam0):
        raise ValueError("lam0 expected to be > 0")
    if not (Validators._validate_positive(mu) and Validators._validate_positive(tau_a)):
        raise ValueError("mu and tau_a expected to be > 0")

    threshold = math.log(mu) / lam0
    if not tau_a > threshold:
        return AdtVerdict(False, threshold, None, None)

    rho = RateFunction.linear(max(lam0 - math.log(mu) / tau_a, 0.0))
    condition = ConditionC1.from_weighted_rates(
        [
            (-lam0, RateFunction.linear(1.0)),
            (math.log(mu), RateFunction.linear(1.0 / tau_a)),
        ],
        rho,
        c1=0.0,
    )

    return AdtVerdict(True, threshold, rho, condition)


def uniform_rates(family) -> UniformRates:
    """
    Conservative uniform constants of a family.

    The slowest ISS decay, the fastest non-ISS growth and the largest ``mu``
    (1 when there are no transitions). Missing classes are None.
    """

    lam_stable = min((family.lam(j) for j in family.stable), default=None)
    lam_unstable = max((abs(family.lam(k)) for k in family.unstable), default=None)
    mu = max(family.transitions.values(), default=1.0)

    return UniformRates(lam_stable, lam_unstable, mu)


def check_adt_mixed(family, rho_bar: float, tau_a: float) -> AdtVerdict:
    """:func:`adt_mixed_verdict` with the uniform constants of ``family``."""

    rates = uniform_rates(family)
    if rates.lam_stable is None or rates.lam_unstable is None:
        raise PreconditionError("mixed embedding needs ISS and non-ISS modes")

    return adt_mixed_verdict(
        rates.lam_stable, rates.lam_unstable, rates.mu, rho_bar, tau_a
    )


def check_adt_all_iss(family, tau_a: float) -> AdtVerdict:
    """:func:`adt_all_iss_verdict` with the uniform constants of ``family``."""

    if family.unstable:
        raise PreconditionError(
            "all-ISS embedding needs a family without non-ISS modes"
        )

    rates = uniform_rates(family)
    return adt_all_iss_verdict(rates.lam_stable, rates.mu, tau_a)


def recover_adt(bounds) -> AdtParameters:
    """
    Recover ``(n0, tau_a)`` from linear switch-count bounds.

    Requires every transition rate to be ``a_mn s + k_mn``; then
    ``n0 = sum(offset_mn + k_mn)`` and ``1/tau_a = sum(a_mn)``.

    :raises PreconditionError: when a transition rate is not linear in ``s``.
    """

    slope, n0 = 0.0, 0.0
    for pair, bound in bounds.switches.items():
        coefficients = bound.rate.coefficients()
        if set(coefficients) - {0.0, 1.0}:
            raise PreconditionError(f"switch rate of {pair!r} is not linear in s")
        slope += coefficients.get(1.0, 0.0)
        n0 += bound.offset + coefficients.get(0.0, 0.0)

    return AdtParameters(n0, math.inf if slope == 0 else 1.0 / slope)
