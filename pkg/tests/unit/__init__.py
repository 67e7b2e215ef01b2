"""PSISS Unit test suite."""

from psiss import SwitchedISS
from psiss.family import ClassKInfinity, SubsystemSpec, SwitchedFamily
from psiss.ratefn import RateFunction, RateTerm
from psiss.signal import RateBound, RateBoundSet, SwitchingSignal

SEC4_STATE_DIM = 2


def scalar_family(gamma="0.5*r^2"):
    """``x' = -x + v`` with ``V = x^2/2`` and decay rate 1."""

    sub = SubsystemSpec.parse(1, ["-x1 + v1"], "0.5*x1^2", 1.0, 1, 1)
    return SwitchedFamily(
        [sub],
        state_dim=1,
        input_dim=1,
        alpha_lower=ClassKInfinity(0.25, 2),
        alpha_upper=ClassKInfinity(1.0, 2),
        gamma=gamma,
    )


def scalar_bounds():
    return RateBoundSet(stable={1: RateBound(RateFunction.linear(1.0), 1.0)})


def sec4_family():
    """The two-mode nonlinear family with one ISS and one non-ISS mode."""

    stable = SubsystemSpec.parse(
        1,
        ["-x1 + sin(x1 - x2)", "-x2 + 0.8*sin(x2 - x1) + 0.5*v1"],
        "0.5*(x1^2 + 1.25*x2^2)",
        1.75,
        2,
        1,
    )
    unstable = SubsystemSpec.parse(
        2,
        ["x1 + sin(x1 - x2)", "x2 + sin(x2 - x1) + 0.5*v1"],
        "0.5*(x1^2 + x2^2)",
        -2.1667,
        2,
        1,
    )
    return SwitchedFamily(
        [stable, unstable],
        state_dim=SEC4_STATE_DIM,
        input_dim=1,
        transitions={(1, 2): 1.0, (2, 1): 2.0},
        alpha_lower=ClassKInfinity(0.5, 2),
        alpha_upper=ClassKInfinity(0.625, 2),
        gamma="0.5*r^2",
    )


def sec4_bounds():
    def rate(*terms):
        return RateFunction(tuple(RateTerm(coef, power) for coef, power in terms))

    return RateBoundSet(
        stable={1: RateBound(rate((0.2030, 1.0), (0.0001, 1.5)), 0.01)},
        unstable={2: RateBound(rate((0.1, 1.0)), 2.58)},
        switches={
            (1, 2): RateBound(rate((0.1, 1.0), (0.05, 1.5)), 1.0),
            (2, 1): RateBound(rate((0.2, 1.0), (0.0025, 1.5)), 1.0),
        },
    )


class UnitTest:
    """Base class for PSISS unit tests."""

    def setup_method(self):
        """Setup runs before all test cases."""
        self.scalar = scalar_family()
        self.scalar_bounds = scalar_bounds()
        self.family = sec4_family()
        self.bounds = sec4_bounds()
        self.iss = SwitchedISS(self.family, self.bounds)
        self.signal = SwitchingSignal([0.0, 1.0, 3.0], [1, 2, 1])
