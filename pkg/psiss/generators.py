"""
Provides generators of switching signals.

Each generator verifies its output before returning it and raises
:class:`~psiss.exceptions.GenerationError` when it cannot produce a signal
that passes.

.. code-block:: python

    from psiss.generators import generate_admissible_signal

    signal = generate_admissible_signal(bounds, t=40.0, mode_cycle=[1, 2])
    print(signal.to_csv())

"""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from .check.average_dwell_time import AverageDwellTime
from .check.signal_bounds import SignalBounds
from .exceptions import GenerationError, InversionError, InvalidSignalError
from .ratefn import eval_rate, invert_rate
from .signal import SwitchingSignal
from .validators import Validators

logger = logging.getLogger(__name__)

# shortest holding time a generator may produce
MIN_HOLDING_TIME = 1e-9

# distance from t within which the extra worst-case switches are packed
WORST_CASE_EPSILON = 1e-6

# share of the admissible non-ISS dwell actually used
DWELL_SHARE = 0.9

PERIOD_GROWTH = 1.25


def _validate_cycle(mode_cycle, transitions=None):
    """Check consecutive cycle modes differ and, when given, form admissible transitions."""

    cycle = list(mode_cycle)
    if not cycle:
        raise GenerationError("mode_cycle expected to be nonempty")
    if len(cycle) == 1:
        return cycle

    pairs = list(zip(cycle, cycle[1:] + cycle[:1]))
    for m, n in pairs:
        if m == n:
            raise GenerationError(f"mode_cycle repeats mode {m} consecutively")
        if transitions is not None and (m, n) not in transitions:
            raise GenerationError(
                f"mode_cycle uses transition ({m}, {n}) outside the admissible set"
            )

    return cycle


def default_cycle(pairs) -> list:
    """
    Follow the admissible transitions from the smallest source mode until back at the start.

    :raises GenerationError: when the transitions contain no such cycle.
    """

    successors = {}
    for m, n in sorted(pairs):
        successors.setdefault(m, n)
    if not successors:
        raise GenerationError("no transitions to build a mode cycle from")

    start = min(successors)
    cycle = [start]
    while True:
        following = successors.get(cycle[-1])
        if following is None or (following in cycle and following != start):
            raise GenerationError(
                "transitions contain no cycle through the first mode; give mode_cycle"
            )
        if following == start:
            return cycle
        cycle.append(following)


def _cycle_modes(cycle, count):
    return [cycle[k % len(cycle)] for k in range(count)]


def generate_worst_case_signal(
    bounds,
    t: float,
    mode_cycle: Optional[Sequence[int]] = None,
    n0: Optional[int] = None,
    grid_step: float = 0.01,
) -> SwitchingSignal:
    """
    Place switches as close to ``t`` as the aggregate switch bound allows.

    With ``rho_N`` the sum of the transition rates, the ``k``-th switch before
    ``t`` sits at ``t - rho_N^-1(k)`` for ``k = 1 .. floor(rho_N(t))``;
    placements at or before 0 are dropped. ``n0`` extra switches (default:
    the floor of the summed count offsets) are packed within 1e-6 of ``t``.

    The result is verified against the aggregate count bound on every
    interval ``]r, t]``.
    """

    if not Validators._validate_positive(t):
        raise ValueError("t expected to be > 0")

    rate = bounds.aggregate_switch_rate
    if n0 is None:
        n0 = int(math.floor(bounds.aggregate_switch_offset))
    if isinstance(n0, bool) or not isinstance(n0, int) or n0 < 0:
        raise ValueError("n0 expected to be an integer >= 0")

    placements = []
    if rate.is_increasing:
        first = max(1, int(math.floor(rate.offset)) + 1)
        for k in range(first, int(math.floor(eval_rate(rate, 0.0, t))) + 1):
            try:
                tau = t - invert_rate(rate, t, float(k))
            except InversionError as e:
                raise GenerationError(f"cannot place switch {k}: {e}") from None
            if tau > MIN_HOLDING_TIME:
                placements.append(tau)
    placements.sort()

    if n0:
        extras = [t - WORST_CASE_EPSILON * (n0 - 1 - j) / n0 for j in range(n0)]
        if placements and extras[0] - placements[-1] < MIN_HOLDING_TIME:
            raise GenerationError("extra switches collide with the regular placements")
        placements += extras

    if not placements:
        modes = list(mode_cycle or sorted(set(bounds.stable) | set(bounds.unstable)))
        if not modes:
            raise GenerationError("no mode to hold; give mode_cycle")
        return SwitchingSignal([0.0], [modes[0]])

    cycle = _validate_cycle(
        mode_cycle or default_cycle(bounds.switches), bounds.switches
    )
    if len(cycle) < 2:
        raise GenerationError("a single-mode cycle cannot switch")

    taus = [0.0] + placements
    try:
        signal = SwitchingSignal(taus, _cycle_modes(cycle, len(taus)))
    except InvalidSignalError as e:
        raise GenerationError(str(e)) from None

    check = SignalBounds(
        bounds,
        signal,
        horizon=t,
        grid_step=grid_step,
        anchored=True,
        aggregate=True,
        conditions=("switches",),
    )
    if not check.passed:
        raise GenerationError(
            f"worst-case placement violates the switch bound: {check.violation}"
        )

    logger.info("worst-case signal with %d switches before t=%g", len(placements), t)
    return signal


def _unstable_budget(bounds, t):
    """Longest non-ISS stretch no ISS lower bound objects to."""

    budget = math.inf
    for mode, bound in bounds.stable.items():
        if not bound.rate.is_increasing:
            continue
        try:
            budget = min(budget, invert_rate(bound.rate, t, bound.offset))
        except InversionError:
            message = f"ISS mode {mode} leaves no room for other modes"
            raise GenerationError(message) from None

    return budget


def _initial_period(bounds, cycle, t):
    period = 0.0
    for m, n in zip(cycle, cycle[1:] + cycle[:1]):
        bound = bounds.switches[(m, n)]
        if bound.offset + bound.rate.offset < 1.0:
            raise GenerationError(
                f"switch bound of ({m}, {n}) forbids even a single switch"
            )
        level = max(1.0, 2.0 - bound.offset)
        if bound.rate.offset >= level:
            continue
        if not bound.rate.is_increasing:
            raise GenerationError(
                f"switch bound of ({m}, {n}) never allows a second switch"
            )
        period = max(period, invert_rate(bound.rate, t, level))

    return period


def generate_admissible_signal(
    bounds,
    t: float,
    mode_cycle: Optional[Sequence[int]] = None,
    grid_step: float = 0.01,
    max_attempts: int = 20,
) -> SwitchingSignal:
    """
    Build a periodic signal satisfying every rate bound on ``[0, t]``.

    Modes follow ``mode_cycle``. Each non-ISS visit lasts a share of the
    longest stretch the ISS bounds tolerate (and of its own offset); ISS
    visits fill the rest of the period. The period starts where every
    transition bound admits a second switch and grows by 25% until the
    signal passes :class:`~psiss.check.signal_bounds.SignalBounds`.
    """

    if not Validators._validate_positive(t):
        raise ValueError("t expected to be > 0")
    if not Validators._validate_count(max_attempts):
        raise ValueError("max_attempts expected to be an integer >= 1")

    if mode_cycle is None:
        if bounds.switches:
            mode_cycle = default_cycle(bounds.switches)
        elif len(bounds.stable) + len(bounds.unstable) == 1:
            mode_cycle = list(bounds.stable) + list(bounds.unstable)
        else:
            raise GenerationError(
                "mode_cycle is required when there are no transitions"
            )
    cycle = _validate_cycle(mode_cycle, bounds.switches)

    if len(cycle) == 1:
        signal = SwitchingSignal([0.0], cycle)
        check = SignalBounds(bounds, signal, horizon=t, grid_step=grid_step)
        if not check.passed:
            raise GenerationError(
                f"constant signal violates the bounds: {check.violation}"
            )
        return signal

    unstable_visits = [mode for mode in cycle if mode in bounds.unstable]
    stable_visits = [mode for mode in cycle if mode not in bounds.unstable]
    if not stable_visits:
        raise GenerationError("mode_cycle needs at least one ISS mode")

    budget = _unstable_budget(bounds, t)
    share = budget / len(unstable_visits) if unstable_visits else 0.0
    dwell = {
        mode: DWELL_SHARE * min(share, bounds.unstable[mode].offset)
        for mode in unstable_visits
    }
    unstable_time = sum(dwell[mode] for mode in unstable_visits)
    if unstable_visits and not unstable_time > MIN_HOLDING_TIME:
        raise GenerationError("no room for the non-ISS modes of the cycle")

    period = max(
        _initial_period(bounds, cycle, t), 2.0 * unstable_time, len(cycle) * 1e-3
    )

    for attempt in range(1, max_attempts + 1):
        stable_dwell = (period - unstable_time) / len(stable_visits)
        taus, modes, now = [], [], 0.0
        k = 0
        while now <= t:
            mode = cycle[k % len(cycle)]
            taus.append(now)
            modes.append(mode)
            now += dwell.get(mode, stable_dwell)
            k += 1

        signal = SwitchingSignal(taus, modes)
        check = SignalBounds(bounds, signal, horizon=t, grid_step=grid_step)
        if check.passed:
            logger.info(
                "admissible signal with period %g after %d attempt(s)", period, attempt
            )
            return signal

        logger.debug("period %g rejected: %s", period, check.violation)
        period *= PERIOD_GROWTH

    raise GenerationError(
        f"no admissible period found in {max_attempts} attempts: {check.violation}"
    )


def generate_adt_signal(
    tau_a: float,
    n0: float,
    t: float,
    mode_cycle: Sequence[int],
    seed: Optional[int] = None,
    transitions=None,
    grid_step: float = 0.01,
    max_attempts: int = 100,
) -> SwitchingSignal:
    """
    Generate a signal with average dwell time ``tau_a`` and chatter bound ``n0``.

    Without a seed, switches sit at ``k * tau_a``. With a seed, each instant
    is jittered by a uniform draw in ``[-tau_a/2, tau_a/2]`` and the draw is
    repeated until the result passes the average dwell time check.

    :param transitions: Admissible transitions the cycle must respect.
    """

    if not Validators._validate_positive(tau_a):
        raise ValueError("tau_a expected to be > 0")
    if not Validators._validate_positive(t):
        raise ValueError("t expected to be > 0")

    cycle = _validate_cycle(mode_cycle, transitions)
    count = int(math.floor(t / tau_a + 1e-9))
    nominal = np.arange(1, count + 1) * tau_a
    if count and len(cycle) < 2:
        raise GenerationError("a single-mode cycle cannot switch")

    rng = np.random.default_rng(seed) if seed is not None else None
    attempts = max_attempts if rng is not None else 1

    for _ in range(attempts):
        instants = nominal
        if rng is not None:
            instants = np.sort(nominal + rng.uniform(-0.5, 0.5, size=count) * tau_a)
            instants = instants[(instants > MIN_HOLDING_TIME) & (instants <= t)]
            gaps = np.diff(instants)
            if gaps.size and np.min(gaps) < MIN_HOLDING_TIME:
                continue

        taus = [0.0] + instants.tolist()
        signal = SwitchingSignal(taus, _cycle_modes(cycle, len(taus)))
        if AverageDwellTime(signal, tau_a, n0, horizon=t, grid_step=grid_step).passed:
            return signal

    raise GenerationError(
        f"no signal with tau_a={tau_a!r} and n0={n0!r} passed the dwell time check"
    )
