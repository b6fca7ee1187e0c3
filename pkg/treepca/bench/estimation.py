"""
Monte-Carlo estimates of approximation errors.

Test points come from the ``("test",)`` stream of the run seed, and their
evaluations go to the test counter of the BlackBox so the training count M
is unaffected.
"""
from collections import namedtuple

import numpy as np

from treepca.errors import UndefinedRelativeErrorError
from treepca.hopca import BlackBox
from treepca.utils import rng_stream

DEFAULT_SAMPLES = 100000

CHUNK = 10000

ErrorEstimate = namedtuple('ErrorEstimate', ['l2', 'linf'])


def mc_errors(u: BlackBox, approx, samples=DEFAULT_SAMPLES, seed=0,
              chunk=CHUNK) -> ErrorEstimate:
    """
    Relative L2 and sup errors of ``approx`` (a callable on N x d arrays)
    over ``samples`` i.i.d. draws from the measure of u
    """
    if samples < 1:
        raise ValueError('samples must be >= 1')

    rng = rng_stream(seed, 'test')

    squared_error = squared_norm = 0.0
    max_error = max_value = 0.0

    for start in range(0, samples, chunk):
        points = u.sample_points(min(chunk, samples - start), rng)
        exact = u.evaluate_test(points)
        difference = exact - np.asarray(approx(points), dtype=float)

        squared_error += float(np.sum(difference ** 2))
        squared_norm += float(np.sum(exact ** 2))
        max_error = max(max_error, float(np.max(np.abs(difference))))
        max_value = max(max_value, float(np.max(np.abs(exact))))

    if squared_norm == 0:
        raise UndefinedRelativeErrorError(
            'Estimated norm of %s is zero' % u.name
        )

    return ErrorEstimate(
        float(np.sqrt(squared_error / squared_norm)), max_error / max_value
    )


def mc_relative_error(u: BlackBox, approx, samples=DEFAULT_SAMPLES, seed=0):
    return mc_errors(u, approx, samples, seed).l2
