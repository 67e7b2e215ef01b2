"""Provide the SwitchedISS class."""

from functools import partial
from typing import Optional, Type

from .certificate import assemble_certificate, check_adt_all_iss, check_adt_mixed
from .check.condition_c1 import ConditionC1
from .check.gain_candidate import GainCandidate
from .check.lyapunov_decay import LyapunovDecay
from .check.lyapunov_sandwich import LyapunovSandwich
from .check.mu_compatibility import MuCompatibility
from .check.signal_bounds import SignalBounds
from .family import SwitchedFamily
from .signal import RateBoundSet
from .sim import batch_simulate, integrate


class SwitchedISS:
    """
    The SwitchedISS class bundles a switched family with its switching rate bounds.

    Instances of this class are the gateway to the checks of PSISS: every check
    is reachable as a lazy alias with the family (and the bounds, where a check
    needs them) already bound.

    .. code-block:: python

        import psiss
        from psiss.config import load_config

        config = load_config("example_sec4")
        iss = psiss.SwitchedISS(config.family, config.bounds)

        iss.lyapunov_decay(1, [(-10, 10), (-10, 10)], [(-1, 1)]).passed

    """

    def __init__(self, family: SwitchedFamily, bounds: Optional[RateBoundSet] = None):
        """
        Initialize a SwitchedISS instance.

        :param family: The :class:`~psiss.family.SwitchedFamily` under study.
        :param bounds: Rate bounds on activation durations and switch counts.
            They must name exactly the modes and transitions of ``family``.
        """
        if not isinstance(family, SwitchedFamily):
            raise ValueError("family expected to be a SwitchedFamily")

        self.family = family
        self.bounds = bounds

    @property
    def bounds(self) -> Optional[RateBoundSet]:
        """
        Switching rate bounds of the signal class; None until given.

        Setting the bounds checks that they cover the family.
        """
        return self._bounds

    @bounds.setter
    def bounds(self, bounds):
        """Set the rate bounds after validating them against the family."""
        if bounds is not None:
            if not isinstance(bounds, RateBoundSet):
                raise ValueError("bounds expected to be a RateBoundSet")
            bounds.validate_against(self.family)
        self._bounds = bounds

    def _require_bounds(self):
        if self._bounds is None:
            raise ValueError("this check needs rate bounds; set SwitchedISS.bounds")
        return self._bounds

    @property
    def lyapunov_sandwich(self) -> Type[LyapunovSandwich]:
        """Lazy alias to :class:`.check.LyapunovSandwich`."""
        return partial(LyapunovSandwich, self.family)

    @property
    def lyapunov_decay(self) -> Type[LyapunovDecay]:
        """Lazy alias to :class:`.check.LyapunovDecay`."""
        return partial(LyapunovDecay, self.family)

    @property
    def mu_compatibility(self) -> Type[MuCompatibility]:
        """Lazy alias to :class:`.check.MuCompatibility`."""
        return partial(MuCompatibility, self.family)

    @property
    def gain_candidate(self) -> Type[GainCandidate]:
        """Lazy alias to :class:`.check.GainCandidate`."""
        return partial(GainCandidate, self.family)

    @property
    def condition_c1(self) -> Type[ConditionC1]:
        """Lazy alias to :class:`.check.ConditionC1`."""
        return partial(ConditionC1, self.family, self._require_bounds())

    @property
    def signal_bounds(self) -> Type[SignalBounds]:
        """Lazy alias to :class:`.check.SignalBounds`."""
        return partial(SignalBounds, self._require_bounds())

    def certificate(self, rho, c1, horizons, signals, **kwargs):
        """Assemble the certificate; see :func:`psiss.certificate.assemble_certificate`."""
        return assemble_certificate(
            self.family, self._require_bounds(), rho, c1, horizons, signals, **kwargs
        )

    def adt_embedding(self, tau_a, rho_bar=None):
        """
        Average dwell time verdict with the uniform constants of the family.

        Families with non-ISS modes need ``rho_bar``, the admitted share of
        non-ISS activation.
        """
        if self.family.unstable:
            if rho_bar is None:
                raise ValueError("rho_bar is required for families with non-ISS modes")
            return check_adt_mixed(self.family, rho_bar, tau_a)

        return check_adt_all_iss(self.family, tau_a)

    def simulate(self, signal, inputs, x0, t_end, dt=1e-3):
        """Integrate one trajectory; see :func:`psiss.sim.integrate`."""
        return integrate(self.family, signal, inputs, x0, t_end, dt)

    def simulate_batch(self, signal, inputs, box, n_runs, seed, t_end, **kwargs):
        """Simulate a seeded batch; see :func:`psiss.sim.batch_simulate`."""
        return batch_simulate(
            self.family, signal, inputs, box, n_runs, seed, t_end, **kwargs
        )
