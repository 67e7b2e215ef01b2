"""
Provides switching signals and the rate bounds they are checked against.

A signal is a finite list of switching instants ``tau`` (``tau[0] == 0``) with
the mode active from each instant on. ``modes[i]`` is active on
``]tau[i], tau[i+1]]`` and the last mode persists indefinitely. Activation
durations and switch counts use half-open intervals ``]s, t]``.

.. code-block:: python

    from psiss.signal import SwitchingSignal, activation_duration, switch_count

    sig = SwitchingSignal([0.0, 1.0, 3.0], [1, 2, 1])

    activation_duration(sig, 1, 0.0, 5.0)   # 3.0
    switch_count(sig, (2, 1), 1.0, 3.0)     # 1

"""

import csv
import io
from collections import namedtuple
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np

from .exceptions import InvalidSignalError, OrderingError, PreconditionError
from .ratefn import RateFunction, sum_rates
from .validators import Validators

CSV_HEADER = ["tau", "mode"]

RateBound = namedtuple("RateBound", ["rate", "offset"])


class SwitchingSignal:
    """
    Piecewise-constant, right-continuous mode selector.

    ===================     ========================================================
    Property                Description
    ===================     ========================================================
    ``taus``                **Tuple** of switching instants, ``taus[0] == 0``
    ``modes``               **Tuple** of modes, ``modes[i]`` from ``taus[i]`` on
    ``switches``            **List** of ``(tau, from_mode, to_mode)`` for ``i >= 1``
    ===================     ========================================================
    """

    def __init__(self, taus: Iterable[float], modes: Iterable[int]):
        """Initialize and validate the switching sequence."""
        taus = tuple(float(tau) for tau in taus)
        modes = tuple(modes)

        if not taus or len(taus) != len(modes):
            raise InvalidSignalError(
                "taus and modes expected to be nonempty and of equal length"
            )
        if taus[0] != 0.0:
            raise InvalidSignalError("first switching instant expected to be 0")
        for i in range(1, len(taus)):
            if not taus[i] > taus[i - 1]:
                raise InvalidSignalError(
                    f"switching instants not strictly increasing at index {i}"
                )
            if modes[i] == modes[i - 1]:
                raise InvalidSignalError(f"consecutive modes equal at index {i}")
        if not all(np.isfinite(taus)):
            raise InvalidSignalError("switching instants expected to be finite")

        self._taus = taus
        self._modes = modes
        self._tau_array = np.array(taus)

    @property
    def taus(self) -> Tuple[float, ...]:
        """Switching instants, starting at 0."""
        return self._taus

    @property
    def modes(self) -> Tuple[int, ...]:
        """Mode active from each instant."""
        return self._modes

    @property
    def initial_mode(self):
        """Mode active at time 0."""
        return self._modes[0]

    @property
    def switches(self) -> List[Tuple[float, int, int]]:
        """**List** of ``(tau, from, to)`` for every switch."""
        return [
            (self._taus[i], self._modes[i - 1], self._modes[i])
            for i in range(1, len(self._taus))
        ]

    def __len__(self):
        """Number of ``(tau, mode)`` pairs."""
        return len(self._taus)

    def __iter__(self):
        """Iterate over ``(tau, mode)`` pairs."""
        for tau, mode in zip(self._taus, self._modes):
            yield tau, mode

    def __eq__(self, other):
        """Equal when instants and modes are equal."""
        if not isinstance(other, SwitchingSignal):
            return NotImplemented
        return self._taus == other._taus and self._modes == other._modes

    def __repr__(self):
        """Constructor form."""
        taus, modes = list(self._taus), list(self._modes)
        return f"SwitchingSignal(taus={taus!r}, modes={modes!r})"

    def sigma(self, t):
        """Mode active at time ``t`` (right-continuous); ``t`` may be an array."""

        index = np.searchsorted(self._tau_array, t, side="right") - 1
        index = np.clip(index, 0, len(self._taus) - 1)
        if np.ndim(index) == 0:
            return self._modes[int(index)]

        return np.asarray(self._modes)[index]

    def check_transitions(self, transitions: Iterable[Tuple[int, int]]):
        """
        Raise :class:`InvalidSignalError` on the first switch outside ``transitions``.
        """

        allowed = set(transitions)
        for tau, m, n in self.switches:
            if (m, n) not in allowed:
                raise InvalidSignalError(
                    f"switch ({m}, {n}) at {tau!r} is not an admissible transition"
                )

    def activation_profile(self, mode, points) -> np.ndarray:
        """Activation duration of ``mode`` on ``]0, x]`` for each ``x`` in ``points``."""

        points = np.asarray(points, dtype=float)
        starts = self._tau_array
        lengths = np.append(np.diff(starts), np.inf)
        selected = np.asarray(self._modes) == mode
        if not np.any(selected):
            return np.zeros(points.shape)

        starts, lengths = starts[selected], lengths[selected]
        elapsed = np.clip(points[..., None] - starts, 0.0, lengths)

        return elapsed.sum(axis=-1)

    def switch_times(self, pair=None) -> np.ndarray:
        """Switching instants ``tau_i`` (``i >= 1``), optionally of one transition only."""

        if pair is None:
            return self._tau_array[1:]

        m, n = pair
        return np.array([tau for tau, a, b in self.switches if a == m and b == n])

    def count_profile(self, pair, points, left: bool = False) -> np.ndarray:
        """
        Number of ``pair`` switches on ``]0, x]`` for each point ``x``.

        All switches count when ``pair`` is None. With ``left`` the count is
        the left limit at ``x``, the number of switches on ``]0, x[``.
        """

        points = np.asarray(points, dtype=float)
        side = "left" if left else "right"
        return np.searchsorted(self.switch_times(pair), points, side=side)

    def evaluation_points(self, horizon: float, grid_step: float) -> np.ndarray:
        """Grid ``{0, h, 2h, ...}`` up to ``horizon`` merged with the switching instants."""

        if not (
            Validators._validate_positive(horizon)
            and Validators._validate_positive(grid_step)
        ):
            raise ValueError("horizon and grid_step expected to be > 0")

        n_steps = int(np.floor(horizon / grid_step + 1e-9))
        grid = np.arange(n_steps + 1) * grid_step
        instants = self._tau_array[self._tau_array <= horizon]

        return np.unique(np.concatenate([grid, instants, [horizon]]))

    def to_csv(self) -> str:
        """Serialize as ``tau,mode`` CSV text."""

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for tau, mode in self:
            writer.writerow([repr(tau), mode])

        return buffer.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SwitchingSignal":
        """Parse ``tau,mode`` CSV text."""

        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [field.strip() for field in header] != CSV_HEADER:
            raise InvalidSignalError("signal CSV expected header 'tau,mode'")

        taus, modes = [], []
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                taus.append(float(row[0]))
                modes.append(int(row[1]))
            except (IndexError, ValueError):
                message = f"malformed signal CSV row on line {line}"
                raise InvalidSignalError(message) from None

        return cls(taus, modes)


def _validate_interval(s, t):
    if s < 0:
        raise ValueError("interval start expected to be >= 0")
    if not s < t:
        raise OrderingError(f"interval ]{s!r}, {t!r}] expected s < t")


def holding_times(sig: SwitchingSignal) -> List[float]:
    """Holding times ``tau[i+1] - tau[i]``."""
    return [b - a for a, b in zip(sig.taus, sig.taus[1:])]


def activation_duration(sig: SwitchingSignal, mode, s: float, t: float) -> float:
    """
    Measure of the times in ``]s, t]`` during which ``mode`` is active.

    :raises OrderingError: when ``s >= t``.
    """

    _validate_interval(s, t)
    profile = sig.activation_profile(mode, [s, t])

    return float(profile[1] - profile[0])


def switch_count(
    sig: SwitchingSignal, pair: Tuple[int, int], s: float, t: float
) -> int:
    """
    Number of switches from ``pair[0]`` to ``pair[1]`` at instants in ``]s, t]``.

    :raises OrderingError: when ``s >= t``.
    """

    _validate_interval(s, t)
    profile = sig.count_profile(pair, [s, t])

    return int(profile[1] - profile[0])


def total_switch_count(sig: SwitchingSignal, s: float, t: float) -> int:
    """Number of switches of any kind at instants in ``]s, t]``."""

    _validate_interval(s, t)
    profile = sig.count_profile(None, [s, t])

    return int(profile[1] - profile[0])


class RateBoundSet:
    """
    Rate bounds on activation durations and switch counts.

    Each entry is a :class:`RateBound` ``(rate, offset)`` with a strictly
    positive offset:

    ===================     ========================================================
    Attribute               Description
    ===================     ========================================================
    ``stable``              **Dict** ISS mode -> lower bound on its activation time
    ``unstable``            **Dict** non-ISS mode -> upper bound on its activation
    ``switches``            **Dict** pair ``(m, n)`` -> upper bound on its count
    ===================     ========================================================
    """

    def __init__(
        self,
        stable: Mapping[int, RateBound] = None,
        unstable: Mapping[int, RateBound] = None,
        switches: Mapping[Tuple[int, int], RateBound] = None,
    ):
        """Initialize and validate the bounds of each condition."""
        self.stable: Dict[int, RateBound] = self._normalize(stable, "stable")
        self.unstable: Dict[int, RateBound] = self._normalize(unstable, "unstable")
        self.switches: Dict[Tuple[int, int], RateBound] = self._normalize(
            switches, "switches"
        )

    @staticmethod
    def _normalize(entries, name):
        normalized = {}
        for key, bound in (entries or {}).items():
            rate, offset = bound
            if not isinstance(rate, RateFunction):
                raise ValueError(f"{name}[{key!r}] rate expected to be a RateFunction")
            if not Validators._validate_positive(offset):
                raise ValueError(f"{name}[{key!r}] offset expected to be > 0")
            normalized[key] = RateBound(rate, float(offset))

        return normalized

    def __iter__(self):
        """Iterate over ``(condition, key, bound)`` triples."""
        for condition in ("stable", "unstable", "switches"):
            for key, bound in getattr(self, condition).items():
                yield condition, key, bound

    @property
    def total_offset(self) -> float:
        """Sum of every offset; the certificate constant ``c`` is at least this."""
        return sum(bound.offset for _, _, bound in self)

    @property
    def aggregate_switch_rate(self) -> RateFunction:
        """Sum of the per-pair switch rates."""
        return sum_rates(bound.rate for bound in self.switches.values())

    @property
    def aggregate_switch_offset(self) -> float:
        """Sum of the switch offsets."""
        return sum(bound.offset for bound in self.switches.values())

    def validate_against(self, family):
        """
        Check the bounds cover exactly the modes and transitions of ``family``.

        :raises PreconditionError: listing every missing or unexpected key.
        """

        errors = []
        expected = {
            "stable": set(family.stable),
            "unstable": set(family.unstable),
            "switches": set(family.transitions),
        }
        for condition, keys in expected.items():
            given = set(getattr(self, condition))
            for key in sorted(keys - given):
                errors.append(f"missing {condition} bound for {key!r}")
            for key in sorted(given - keys):
                errors.append(f"unexpected {condition} bound for {key!r}")

        if errors:
            raise PreconditionError("; ".join(errors))
