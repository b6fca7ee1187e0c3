"""
Benchmark functions with their input measures.

Every builder returns a BlackBox whose evaluator takes an N x d array.
"""
import numpy as np

from treepca.bases import Measure1D, default_space
from treepca.errors import ConfigurationError
from treepca.hopca import BlackBox, tensorize

HENON_HEILES_SIGMA = 0.2

# (mean, spread) of the two Gaussian borehole variables, then the ranges of
# the six uniform ones
BOREHOLE_GAUSSIAN = ((0.1, 0.0161812), (7.71, 1.0056))
BOREHOLE_RANGES = (
    (63070.0, 115600.0),
    (990.0, 1110.0),
    (63.1, 116.0),
    (700.0, 820.0),
    (1120.0, 1680.0),
    (9855.0, 12045.0),
)


def _require_d(name, d, minimum=1):
    if d is None or int(d) < minimum:
        raise ConfigurationError('%s needs d >= %d, got %r' % (name, minimum, d))

    return int(d)


def henon_heiles(d, sigma=HENON_HEILES_SIGMA):
    d = _require_d('henon_heiles', d, 2)
    sigma = float(sigma)

    def function(Xs):
        head, tail = Xs[:, :-1], Xs[:, 1:]

        return (
            0.5 * np.sum(Xs ** 2, axis=1) +
            sigma * np.sum(head * tail ** 2 - head ** 3, axis=1) +
            sigma ** 2 / 16 * np.sum((head ** 2 + tail ** 2) ** 2, axis=1)
        )

    return BlackBox(function, [Measure1D.std_gaussian()] * d, name='henon_heiles')


def sine_sum(d):
    d = _require_d('sine_sum', d)

    def function(Xs):
        return np.sin(np.sum(Xs, axis=1))

    return BlackBox(function, [Measure1D.uniform()] * d, name='sine_sum')


def _poly4(y, z):
    return sum((y * z) ** j for j in range(4))


def _gauss(y, z):
    return np.exp(-(y - z) ** 2 / 8)


BIVARIATE = {
    'poly4': _poly4,
    'gauss': _gauss,
}


def sum_bivariate(d, g='poly4'):
    d = _require_d('sum_bivariate', d, 2)

    if d % 2:
        raise ConfigurationError('sum_bivariate needs an even d, got %d' % d)

    if g not in BIVARIATE:
        raise ConfigurationError('Unknown bivariate function %r' % g)

    kernel = BIVARIATE[g]

    def function(Xs):
        return np.sum(kernel(Xs[:, 0::2], Xs[:, 1::2]), axis=1)

    return BlackBox(
        function, [Measure1D.uniform()] * d, name='sum_bivariate %s' % g
    )


def borehole(d=8):
    if d is not None and int(d) != 8:
        raise ConfigurationError('borehole is defined for d = 8, got %r' % d)

    (rw_mean, rw_spread), (r_mean, r_spread) = BOREHOLE_GAUSSIAN
    lows = np.array([low for low, _ in BOREHOLE_RANGES])
    highs = np.array([high for _, high in BOREHOLE_RANGES])

    def function(Xs):
        rw = rw_mean + rw_spread * Xs[:, 0]
        log_r = r_mean + r_spread * Xs[:, 1]
        Tu, Hu, Tl, Hl, L, Kw = ((lows + highs) / 2 + (highs - lows) / 2 * Xs[:, 2:]).T

        log_ratio = log_r - np.log(rw)
        frac1 = 2 * np.pi * Tu * (Hu - Hl)
        frac2a = 2 * L * Tu / (log_ratio * rw ** 2 * Kw)
        frac2b = Tu / Tl

        return frac1 / (log_ratio * (1 + frac2a + frac2b))

    measures = [Measure1D.std_gaussian()] * 2 + [Measure1D.uniform()] * 6

    return BlackBox(function, measures, name='borehole')


def _square(t):
    return t ** 2


def _sqrt(t):
    return np.sqrt(t)


UNIVARIATE = {
    'square': _square,
    'sqrt': _sqrt,
}


def tensorized(d, f='square'):
    d = _require_d('tensorized', d)

    if f not in UNIVARIATE:
        raise ConfigurationError('Unknown univariate function %r' % f)

    return tensorize(UNIVARIATE[f], d)


FUNCTIONS = {
    'henon_heiles': (henon_heiles, 'modified Henon-Heiles potential, Gaussian inputs'),
    'sine_sum': (sine_sum, 'sin(x_1 + ... + x_d) on [-1, 1]^d'),
    'sum_bivariate': (sum_bivariate, 'g(x_1, x_2) + g(x_3, x_4) + ..., g = poly4 | gauss'),
    'borehole': (borehole, 'water flow through a borehole, d = 8'),
    'tensorized': (tensorized, 'f = square | sqrt sampled on a dyadic grid, {0, 1}^d'),
}


def test_function(name, d=None, **params) -> BlackBox:
    try:
        builder, _ = FUNCTIONS[name]
    except KeyError:
        raise ConfigurationError('Unknown test function %r' % name)

    try:
        return builder(d, **params)
    except TypeError as exc:
        raise ConfigurationError('Bad parameters for %s: %s' % (name, exc))


def function_spaces(u: BlackBox, degree=None):
    """
    Leaf spaces of degree ``degree`` matching each input measure
    """
    return [default_space(measure, degree) for measure in u.measures]


def degree_for(eps):
    """
    Degree rule p(eps) = ceil(log10(1 / eps))
    """
    return max(1, int(np.ceil(np.log10(1.0 / eps) - 1e-9)))


# pytest would otherwise collect the builder as a test
test_function.__test__ = False
