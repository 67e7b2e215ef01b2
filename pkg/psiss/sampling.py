"""Provides deterministic point sampling over hyper-rectangles."""

import numpy as np

from scipy.stats import qmc

from .exceptions import PSISSException
from .validators import Validators


def sample_box(box, n_samples: int, seed: int = 0) -> np.ndarray:
    """
    Draw ``n_samples`` points from ``box``.

    The first half are unscrambled Halton points, the rest seeded uniform draws. The same
    arguments always give the same points.

    :param box: Sequence of ``(low, high)`` pairs, one per coordinate.
    :return: Array of shape ``(n_samples, len(box))``.
    """

    if not Validators._validate_box(box):
        raise ValueError("box expected to be a nonempty sequence of (low, high) pairs")
    if not Validators._validate_count(n_samples):
        raise ValueError("n_samples expected to be an integer >= 1")

    bounds = np.asarray(box, dtype=float)
    dim = bounds.shape[0]
    n_halton = (n_samples + 1) // 2

    unit = np.empty((n_samples, dim))
    unit[:n_halton] = qmc.Halton(d=dim, scramble=False).random(n_halton)
    rng = np.random.default_rng(seed)
    unit[n_halton:] = rng.uniform(size=(n_samples - n_halton, dim))

    # degenerate sides are allowed, so scale by hand rather than qmc.scale
    return bounds[:, 0] + unit * (bounds[:, 1] - bounds[:, 0])


def evaluate_samples(func, points: np.ndarray):
    """
    Evaluate ``func`` on sample ``points`` of shape ``(n, k)``.

    ``func`` receives the transposed points (coordinates on the leading axis)
    and returns ``n`` values. When the vectorized call hits a domain error the
    points are evaluated one by one so the failing ones can be reported.

    :return: ``(values, causes)``; failed points are ``nan`` in ``values`` and
        ``causes`` maps their row index to the error message.
    """

    try:
        return np.asarray(func(points.T), dtype=float).reshape(len(points)), {}
    except PSISSException:
        pass

    values = np.full(len(points), np.nan)
    causes = {}
    for i in range(len(points)):
        try:
            values[i] = np.asarray(func(points[i : i + 1].T), dtype=float).reshape(1)[0]
        except PSISSException as e:
            causes[i] = str(e)

    return values, causes
