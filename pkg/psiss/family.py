"""Provides the switched family of subsystems and its Lyapunov data."""

from collections import namedtuple
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .exceptions import InvalidFamilyError
from .expr import Expr, evaluate, parse_expression
from .validators import Validators

GAIN_VARIABLE = "r"

Partition = namedtuple("Partition", ["stable", "unstable"])


def state_variables(state_dim: int) -> Tuple[str, ...]:
    """Names ``x1 .. xd`` of the state coordinates."""
    return tuple(f"x{k}" for k in range(1, state_dim + 1))


def input_variables(input_dim: int) -> Tuple[str, ...]:
    """Names ``v1 .. vm`` of the input coordinates."""
    return tuple(f"v{k}" for k in range(1, input_dim + 1))


@dataclass(frozen=True)
class ClassKInfinity:
    """
    Comparison function ``r -> a * r**p`` with ``a > 0`` and ``p > 0``.

    .. code-block:: python

        alpha = ClassKInfinity(0.5, 2)
        alpha(2.0)   # 2.0

    """

    a: float
    p: float

    def __post_init__(self):
        """Validate ``a`` and ``p``."""
        if not (
            Validators._validate_positive(self.a)
            and Validators._validate_positive(self.p)
        ):
            raise ValueError("class-K-infinity form expected a > 0 and p > 0")

    def __call__(self, r):
        """Evaluate ``a * r**p``; ``r`` may be an array."""
        return self.a * np.power(r, self.p)


@dataclass(frozen=True)
class SubsystemSpec:
    """One mode: vector field components ``f``, Lyapunov function ``V`` and ``lam``."""

    index: int
    f: Tuple[Expr, ...]
    V: Expr
    lam: float

    @classmethod
    def parse(
        cls,
        index: int,
        f: Sequence[str],
        V: str,
        lam: float,
        state_dim: int,
        input_dim: int,
    ) -> "SubsystemSpec":
        """Build a subsystem from expression text."""

        xs = state_variables(state_dim)
        vs = input_variables(input_dim)

        return cls(
            index=index,
            f=tuple(parse_expression(text, xs + vs) for text in f),
            V=parse_expression(V, xs),
            lam=float(lam),
        )


def partition_modes(fam) -> Partition:
    """
    Split the mode indices by the sign of their decay rate.

    :return: ``Partition(stable, unstable)``; ``stable`` holds the ISS modes
        (``lam > 0``) and ``unstable`` the non-ISS modes (``lam < 0``).
    :raises InvalidFamilyError: when a decay rate is zero.
    """

    stable, unstable = set(), set()
    for sub in fam.subsystems:
        if sub.lam > 0:
            stable.add(sub.index)
        elif sub.lam < 0:
            unstable.add(sub.index)
        else:
            raise InvalidFamilyError(f"mode {sub.index} has decay rate 0")

    return Partition(frozenset(stable), frozenset(unstable))


class SwitchedFamily:
    """
    A finite family of subsystems ``x' = f_i(x, v)`` with Lyapunov-like data.

    ===================     ========================================================
    Property                Description
    ===================     ========================================================
    ``modes``               **Tuple** of mode indices in declaration order
    ``stable``              **Frozenset** of ISS mode indices
    ``unstable``            **Frozenset** of non-ISS mode indices
    ``transitions``         **Dict** mapping admissible pairs ``(i, j)`` to ``mu_ij``
    ``alpha_lower``         Lower sandwich bound (:class:`ClassKInfinity`)
    ``alpha_upper``         Upper sandwich bound (:class:`ClassKInfinity`)
    ``gamma``               Gain expression over ``r``
    ===================     ========================================================

    .. code-block:: python

        from psiss.family import ClassKInfinity, SubsystemSpec, SwitchedFamily

        sub = SubsystemSpec.parse(1, ["-x1 + v1"], "0.5*x1^2", 1.0, 1, 1)
        fam = SwitchedFamily(
            [sub],
            state_dim=1,
            input_dim=1,
            transitions={},
            alpha_lower=ClassKInfinity(0.25, 2),
            alpha_upper=ClassKInfinity(1, 2),
            gamma="0.5*r^2",
        )

    """

    def __init__(
        self,
        subsystems: Iterable[SubsystemSpec],
        state_dim: int,
        input_dim: int,
        transitions: Optional[Dict[Tuple[int, int], float]] = None,
        alpha_lower: Optional[ClassKInfinity] = None,
        alpha_upper: Optional[ClassKInfinity] = None,
        gamma="0",
    ):
        """Initialize and validate the family."""
        if not Validators._validate_count(state_dim):
            raise ValueError("state_dim expected to be an integer >= 1")
        is_int = isinstance(input_dim, int) and not isinstance(input_dim, bool)
        if not is_int or input_dim < 0:
            raise ValueError("input_dim expected to be an integer >= 0")

        self.state_dim = state_dim
        self.input_dim = input_dim
        self.subsystems = tuple(subsystems)
        if not self.subsystems:
            raise InvalidFamilyError("a family needs at least one subsystem")

        self._by_index = {}
        for sub in self.subsystems:
            if sub.index in self._by_index:
                raise InvalidFamilyError(f"mode {sub.index} declared twice")
            self._by_index[sub.index] = sub
            self._validate_subsystem(sub)

        self.transitions = dict(transitions or {})
        for (i, j), mu in self.transitions.items():
            if i == j:
                raise InvalidFamilyError(f"self-loop ({i}, {j}) is not a transition")
            if i not in self._by_index or j not in self._by_index:
                raise InvalidFamilyError(
                    f"transition ({i}, {j}) references an unknown mode"
                )
            if not Validators._validate_positive(mu):
                raise InvalidFamilyError(f"mu for ({i}, {j}) expected to be > 0")

        self.alpha_lower = alpha_lower or ClassKInfinity(1.0, 2.0)
        self.alpha_upper = alpha_upper or ClassKInfinity(1.0, 2.0)

        if isinstance(gamma, str):
            gamma = parse_expression(gamma, [GAIN_VARIABLE])
        if not gamma.variables <= {GAIN_VARIABLE}:
            raise InvalidFamilyError("gamma expected to be an expression over r")
        self.gamma = gamma

        self._partition = partition_modes(self)

    def _validate_subsystem(self, sub):
        xs = set(state_variables(self.state_dim))
        vs = set(input_variables(self.input_dim))

        if isinstance(sub.index, bool) or not isinstance(sub.index, int):
            raise InvalidFamilyError(
                f"mode index {sub.index!r} expected to be an integer"
            )
        if len(sub.f) != self.state_dim:
            raise InvalidFamilyError(
                f"mode {sub.index} has {len(sub.f)} vector field components, "
                f"expected {self.state_dim}"
            )
        for component in sub.f:
            if not component.variables <= xs | vs:
                raise InvalidFamilyError(
                    f"mode {sub.index} vector field uses unknown variables"
                )
        if not sub.V.variables <= xs:
            raise InvalidFamilyError(
                f"mode {sub.index} Lyapunov function uses non-state variables"
            )

    @property
    def modes(self) -> Tuple[int, ...]:
        """Mode indices in declaration order."""
        return tuple(sub.index for sub in self.subsystems)

    @property
    def stable(self) -> frozenset:
        """Indices of the ISS modes."""
        return self._partition.stable

    @property
    def unstable(self) -> frozenset:
        """Indices of the non-ISS modes."""
        return self._partition.unstable

    @property
    def state_variables(self):
        """State variable names ``x1..xd``."""
        return state_variables(self.state_dim)

    @property
    def input_variables(self):
        """Input variable names ``v1..vm``."""
        return input_variables(self.input_dim)

    def __getitem__(self, index) -> SubsystemSpec:
        """Get the subsystem of a mode index."""
        return self._by_index[index]

    def __iter__(self):
        """Iterate over the subsystems."""
        for sub in self.subsystems:
            yield sub

    def __len__(self):
        """Number of modes."""
        return len(self.subsystems)

    def lam(self, index) -> float:
        """Decay rate ``lambda`` of a mode."""
        return self._by_index[index].lam

    def mu(self, i, j) -> float:
        """Jump factor ``mu`` of a transition."""
        return self.transitions[(i, j)]

    def bindings(self, states, inputs=None) -> dict:
        """
        Map coordinate arrays to variable bindings.

        :param states: Array whose leading axis has length ``state_dim``.
        :param inputs: Array whose leading axis has length ``input_dim``.
        """

        states = np.asarray(states, dtype=float)
        values = dict(zip(self.state_variables, states))
        if inputs is not None:
            values.update(zip(self.input_variables, np.asarray(inputs, dtype=float)))

        return values

    def lyapunov(self, index, states):
        """Evaluate ``V_index`` at ``states`` (leading axis = coordinates)."""
        return evaluate(self._by_index[index].V, self.bindings(states))

    def vector_field(self, index, states, inputs) -> np.ndarray:
        """Evaluate ``f_index`` at ``states``/``inputs``; result has the shape of ``states``."""

        states = np.asarray(states, dtype=float)
        values = self.bindings(states, inputs)
        return np.stack(
            [
                np.broadcast_to(evaluate(component, values), states.shape[1:])
                for component in self._by_index[index].f
            ]
        )

    def gain(self, r):
        """Evaluate ``gamma`` at ``r``."""
        return evaluate(self.gamma, {GAIN_VARIABLE: r})
