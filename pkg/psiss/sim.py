"""
Provides switch-aligned fixed-step simulation of switched systems.

Trajectories are integrated with the classical fourth order Runge-Kutta
scheme. The time grid contains every switching instant, so no step straddles
a switch and the mode of a step is the mode active at its left end.

.. code-block:: python

    from psiss.sim import batch_simulate, integrate

    traj = integrate(family, signal, ["1"], x0=[100.0, 100.0], t_end=40.0, dt=1e-3)
    print(traj.sup_norm, traj.final_norm)

    for summary in batch_simulate(family, signal, ["1"], box, n_runs=50, seed=7,
                                  t_end=40.0, dt=1e-3):
        print(summary.run, summary.final_norm, summary.diverged)

"""

import io
import logging
import math
from collections import namedtuple
from typing import Optional, Sequence

import numpy as np

from .exceptions import PSISSException
from .expr import Expr, evaluate, parse_expression
from .validators import Validators

logger = logging.getLogger(__name__)

DIVERGENCE_NORM = 1e12
TIME_VARIABLE = "t"

TrajectorySummary = namedtuple(
    "TrajectorySummary",
    ["run", "x0", "sup_norm", "final_norm", "diverged", "time", "error", "trajectory"],
)


class Trajectory:
    """
    Sampled solution of a switched system.

    =================  =================================================================
    Attribute          Description
    =================  =================================================================
    ``times``          **Array** ``(K,)`` grid, every switching instant included
    ``states``         **Array** ``(K, d)`` of states; rows after an abort are dropped
    ``modes``          **Array** ``(K,)`` active mode per sample (right-continuous)
    ``inputs``         **Array** ``(K, m)`` input samples
    ``diverged``       **True** when the state norm exceeded 1e12 or became non-finite
    ``error``          Message of the evaluation error that aborted the run, or None
    ``stop_time``      Time of divergence or abort, or None
    =================  =================================================================
    """

    def __init__(
        self, times, states, modes, inputs, diverged=False, error=None, stop_time=None
    ):
        """Initialize from sampled arrays."""
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float)
        self.modes = np.asarray(modes)
        self.inputs = np.asarray(inputs, dtype=float)
        self.diverged = diverged
        self.error = error
        self.stop_time = stop_time

    def __len__(self):
        """Number of grid points."""
        return len(self.times)

    @property
    def norms(self) -> np.ndarray:
        """State norm at each grid point."""
        return np.linalg.norm(self.states, axis=1)

    @property
    def input_norms(self) -> np.ndarray:
        """Input norm at each grid point."""
        if not self.inputs.shape[1]:
            return np.zeros(len(self.times))
        return np.linalg.norm(self.inputs, axis=1)

    @property
    def x0(self) -> np.ndarray:
        """Initial state."""
        return self.states[0]

    @property
    def sup_norm(self) -> float:
        """Largest state norm."""
        return float(np.max(self.norms))

    @property
    def final_norm(self) -> float:
        """State norm at the last grid point."""
        return float(self.norms[-1])

    def summary(self, run: int = 0, keep: bool = False) -> TrajectorySummary:
        """Condense into a :class:`TrajectorySummary`."""
        return TrajectorySummary(
            run=run,
            x0=self.x0,
            sup_norm=self.sup_norm,
            final_norm=self.final_norm,
            diverged=self.diverged,
            time=float(self.times[-1]),
            error=self.error,
            trajectory=self if keep else None,
        )

    def to_csv(self) -> str:
        """Serialize as CSV with header ``t,mode,x1..xd,v1..vm,normx``."""

        d, m = self.states.shape[1], self.inputs.shape[1]
        columns = ["t", "mode"]
        columns += [f"x{k}" for k in range(1, d + 1)]
        columns += [f"v{k}" for k in range(1, m + 1)]
        header = ",".join(columns + ["normx"])
        table = np.column_stack(
            [self.times, self.modes, self.states, self.inputs, self.norms]
        )
        buffer = io.StringIO()
        np.savetxt(
            buffer,
            table,
            delimiter=",",
            header=header,
            comments="",
            fmt=["%.17g", "%d"] + ["%.17g"] * (d + m + 1),
        )

        return buffer.getvalue()


def parse_inputs(texts: Sequence, input_dim: int):
    """Parse input expressions over ``t``; one per input coordinate."""

    inputs = [
        text if isinstance(text, Expr) else parse_expression(str(text), [TIME_VARIABLE])
        for text in texts
    ]
    if len(inputs) != input_dim:
        raise ValueError(f"expected {input_dim} input expressions, got {len(inputs)}")

    return inputs


def time_grid(signal, t_end: float, dt: float) -> np.ndarray:
    """
    Fixed-step grid on ``[0, t_end]`` restarted at every switching instant.

    Within each segment ``[a, b]`` the points are ``a + k*dt``; the last step
    of a segment is shortened to land on ``b``.
    """

    if not (Validators._validate_positive(t_end) and Validators._validate_positive(dt)):
        raise ValueError("t_end and dt expected to be > 0")

    breaks = [tau for tau in signal.taus if tau < t_end] + [t_end]
    pieces = []
    for a, b in zip(breaks, breaks[1:]):
        n_steps = max(1, math.ceil((b - a) / dt - 1e-9))
        pieces.append(a + np.arange(n_steps) * dt)
    pieces.append([t_end])

    return np.concatenate(pieces)


def _rk4_batch(family, signal, inputs, states0: np.ndarray, t_end: float, dt: float):
    """
    Integrate the columns of ``states0`` (shape ``(d, n)``) on a shared grid.

    Columns that diverge or fail to evaluate are frozen and reported. An input
    that cannot be evaluated stops every column at the last time it was defined.
    """

    times = time_grid(signal, t_end, dt)
    d, n = states0.shape
    m = family.input_dim

    def input_at(t):
        values = [evaluate(v, {TIME_VARIABLE: t}) for v in inputs]
        return np.array(values, dtype=float).reshape(m)

    states = np.empty((len(times), d, n))
    states[0] = states0
    # NaN from the first time the input is undefined; the step there aborts
    input_samples = np.full((len(times), m), np.nan)
    for k, t in enumerate(times):
        try:
            input_samples[k] = input_at(t)
        except PSISSException as e:
            logger.debug("input undefined at t=%g: %s", t, e)
            break
    modes = np.asarray(signal.sigma(times))

    active = np.ones(n, dtype=bool)
    stops = [None] * n
    errors = [None] * n
    diverged = np.zeros(n, dtype=bool)
    last = np.full(n, len(times) - 1)

    def step(mode, t, h, x):
        k1 = family.vector_field(mode, x, input_at(t))
        k2 = family.vector_field(mode, x + 0.5 * h * k1, input_at(t + 0.5 * h))
        k3 = family.vector_field(mode, x + 0.5 * h * k2, input_at(t + 0.5 * h))
        k4 = family.vector_field(mode, x + h * k3, input_at(t + h))
        return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    current = states0.astype(float).copy()
    for k in range(len(times) - 1):
        t, h = times[k], times[k + 1] - times[k]
        columns = np.flatnonzero(active)
        if columns.size:
            try:
                current[:, columns] = step(modes[k], t, h, current[:, columns])
            except PSISSException:
                # fall back to one column at a time to find the failing runs
                for j in columns:
                    try:
                        current[:, [j]] = step(modes[k], t, h, current[:, [j]])
                    except PSISSException as e:
                        active[j] = False
                        errors[j] = str(e)
                        stops[j] = float(t)
                        last[j] = k
                        logger.debug("run %d aborted at t=%g: %s", j, t, e)

            with np.errstate(over="ignore", invalid="ignore"):
                norms = np.linalg.norm(current, axis=0)
            blown = active & ~(np.isfinite(norms) & (norms <= DIVERGENCE_NORM))
            for j in np.flatnonzero(blown):
                active[j] = False
                diverged[j] = True
                stops[j] = float(times[k + 1])
                last[j] = k + 1
                logger.debug("run %d diverged at t=%g", j, times[k + 1])

        states[k + 1] = current

    trajectories = []
    for j in range(n):
        stop = last[j] + 1
        trajectories.append(
            Trajectory(
                times[:stop],
                states[:stop, :, j],
                modes[:stop],
                input_samples[:stop],
                diverged=bool(diverged[j]),
                error=errors[j],
                stop_time=stops[j],
            )
        )

    return trajectories


def integrate(family, signal, inputs, x0, t_end: float, dt: float = 1e-3) -> Trajectory:
    """
    Integrate ``x' = f_sigma(t)(x, v(t))`` from ``x0`` on ``[0, t_end]``.

    :param inputs: One expression (text or :class:`~psiss.expr.Expr`) over ``t``
        per input coordinate.
    :return: The :class:`Trajectory`; divergence (norm above 1e12) and
        evaluation errors stop the run and are flagged on the result.
    """

    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (family.state_dim,):
        raise ValueError(f"x0 expected to have {family.state_dim} coordinates")
    signal.check_transitions(family.transitions)

    inputs = parse_inputs(inputs, family.input_dim)
    return _rk4_batch(family, signal, inputs, x0[:, None], t_end, dt)[0]


def batch_seeds(seed: int, n_runs: int) -> list:
    """Independent per-run seeds spawned from ``seed`` by :class:`numpy.random.SeedSequence`."""
    children = np.random.SeedSequence(seed).spawn(n_runs)
    return [child.generate_state(1)[0] for child in children]


def batch_simulate(
    family,
    signal,
    inputs,
    box,
    n_runs: int,
    seed: int,
    t_end: float,
    dt: float = 1e-3,
    keep_trajectories: bool = False,
    x0: Optional[Sequence[float]] = None,
) -> list:
    """
    Simulate ``n_runs`` initial conditions drawn uniformly from ``box``.

    Run ``k`` draws its initial condition from its own generator seeded by
    :func:`batch_seeds`, so results do not depend on the number of runs. A run
    that diverges or aborts does not stop the others.

    :param x0: Pin every run to this initial condition instead of sampling.
    :return: **List** of :class:`TrajectorySummary`, with the trajectory
        attached when ``keep_trajectories`` is set.
    """

    if not Validators._validate_count(n_runs):
        raise ValueError("n_runs expected to be an integer >= 1")

    d = family.state_dim
    if x0 is not None:
        starts = np.tile(np.asarray(x0, dtype=float).reshape(d, 1), (1, n_runs))
    else:
        if not Validators._validate_box(box, d):
            raise ValueError("box expected to be (low, high) pairs, one per state")
        bounds = np.asarray(box, dtype=float)
        starts = np.column_stack(
            [
                np.random.default_rng(s).uniform(bounds[:, 0], bounds[:, 1])
                for s in batch_seeds(seed, n_runs)
            ]
        )

    signal.check_transitions(family.transitions)
    logger.info("simulating %d runs to t=%g with dt=%g", n_runs, t_end, dt)
    inputs = parse_inputs(inputs, family.input_dim)
    trajectories = _rk4_batch(family, signal, inputs, starts, t_end, dt)

    summaries = [
        traj.summary(run, keep_trajectories) for run, traj in enumerate(trajectories)
    ]
    n_diverged = sum(s.diverged or s.error is not None for s in summaries)
    if n_diverged:
        logger.warning("%d of %d runs diverged or aborted", n_diverged, n_runs)

    return summaries
