"""
Univariate measured spaces and their orthonormal bases.

Polynomial families are evaluated with their normalised three-term
recurrences so that every basis function has unit norm in L2 of the
probability measure.
"""
import math
import re

from dataclasses import dataclass

import numpy as np

from numpy.polynomial import hermite_e, legendre

from treepca.errors import FeatureSpaceError


MEASURE_KINDS = ('uniform', 'std_gaussian', 'finite_uniform')

FAMILIES = {
    'legendre': 'uniform',
    'hermite': 'std_gaussian',
    'canonical': 'finite_uniform',
}

DEFAULT_CANDIDATES = 1000

# Relative tolerance on interval ends for rounding in affine maps
SUPPORT_SLACK = 1e-12


@dataclass(frozen=True)
class Measure1D:
    kind: str
    a: float = -1.0
    b: float = 1.0
    m: int = 0

    def __post_init__(self):
        if self.kind not in MEASURE_KINDS:
            raise FeatureSpaceError('Unknown measure %r' % self.kind)

        if self.kind == 'uniform' and not self.a < self.b:
            raise FeatureSpaceError(
                'Uniform measure needs a < b, got (%r, %r)' % (self.a, self.b)
            )

        if self.kind == 'finite_uniform' and self.m < 1:
            raise FeatureSpaceError(
                'Finite measure needs at least one point, got %r' % self.m
            )

    @classmethod
    def uniform(cls, a=-1.0, b=1.0):
        return cls('uniform', a=float(a), b=float(b))

    @classmethod
    def std_gaussian(cls):
        return cls('std_gaussian')

    @classmethod
    def finite_uniform(cls, m):
        return cls('finite_uniform', m=int(m))

    @property
    def is_finite(self):
        return self.kind == 'finite_uniform'

    def sample(self, count, rng):
        return sample(self, count, rng)


def sample(measure: Measure1D, count, rng):
    """
    ``count`` i.i.d. draws from the measure; advances ``rng``
    """
    if count < 0:
        raise ValueError('count must be nonnegative')

    if measure.kind == 'uniform':
        return rng.uniform(measure.a, measure.b, size=count)

    if measure.kind == 'std_gaussian':
        return rng.standard_normal(size=count)

    return rng.integers(0, measure.m, size=count).astype(float)


@dataclass(frozen=True)
class FeatureSpace:
    measure: Measure1D
    family: str
    dim: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise FeatureSpaceError('Unknown basis family %r' % self.family)

        if FAMILIES[self.family] != self.measure.kind:
            raise FeatureSpaceError(
                'Family %s is incompatible with a %s measure' % (
                    self.family, self.measure.kind)
            )

        if self.dim < 1:
            raise FeatureSpaceError('Feature space dimension must be >= 1')

        if self.family == 'canonical' and self.dim != self.measure.m:
            raise FeatureSpaceError(
                'Canonical basis on %d points must have dimension %d' % (
                    self.measure.m, self.measure.m)
            )

    @property
    def degree(self):
        return self.dim - 1

    @property
    def name(self):
        if self.family == 'canonical':
            return 'canonical:m=%d' % self.dim

        name = '%s:p=%d' % (self.family, self.degree)

        if self.family == 'legendre' and (self.measure.a, self.measure.b) != (-1.0, 1.0):
            name += ',a=%r,b=%r' % (self.measure.a, self.measure.b)

        return name

    def basis_eval(self, points):
        return basis_eval(self, points)

    def candidate_grid(self, size, rng):
        return candidate_grid(self, size, rng)


def _legendre_rows(t, dim):
    rows = np.empty((t.size, dim))
    rows[:, 0] = 1.0

    if dim > 1:
        rows[:, 1] = t

    for k in range(1, dim - 1):
        rows[:, k + 1] = ((2 * k + 1) * t * rows[:, k] - k * rows[:, k - 1]) / (k + 1)

    return rows * np.sqrt(2 * np.arange(dim) + 1)


def _hermite_rows(x, dim):
    # Orthonormal probabilists' Hermite: h_k = He_k / sqrt(k!)
    rows = np.empty((x.size, dim))
    rows[:, 0] = 1.0

    if dim > 1:
        rows[:, 1] = x

    for k in range(1, dim - 1):
        rows[:, k + 1] = (x * rows[:, k] - math.sqrt(k) * rows[:, k - 1]) / math.sqrt(k + 1)

    return rows


def _canonical_rows(x, dim):
    codes = np.rint(x)
    invalid = ~np.isfinite(x) | (x != codes) | (codes < 0) | (codes >= dim)

    if np.any(invalid):
        raise FeatureSpaceError(
            'Point %r is not a code in 0..%d' % (x[invalid][0], dim - 1)
        )

    rows = np.zeros((x.size, dim))
    rows[np.arange(x.size), codes.astype(int)] = math.sqrt(dim)

    return rows


def basis_eval(space: FeatureSpace, points):
    """
    Matrix of basis evaluations, entry (k, j) = phi_j(x_k)
    """
    x = np.asarray(points, dtype=float).ravel()

    if space.family == 'legendre':
        a, b = space.measure.a, space.measure.b
        slack = SUPPORT_SLACK * (b - a)
        outside = ~((x >= a - slack) & (x <= b + slack))
        if outside.any():
            raise FeatureSpaceError(
                'Point %r outside the support [%g, %g]' % (x[outside][0], a, b)
            )
        return _legendre_rows((2 * x - a - b) / (b - a), space.dim)

    if space.family == 'hermite':
        return _hermite_rows(x, space.dim)

    return _canonical_rows(x, space.dim)


def candidate_grid(space: FeatureSpace, size=DEFAULT_CANDIDATES, rng=None):
    """
    Candidate pool for magic point selection; the full support for finite
    measures
    """
    if space.measure.is_finite:
        return np.arange(space.measure.m, dtype=float)

    if rng is None:
        raise FeatureSpaceError('Continuous candidate grids need a generator')

    return sample(space.measure, size, rng)


def gauss_quadrature(space: FeatureSpace, count=None):
    """
    Nodes and probability weights exact for polynomials of degree
    2 * count - 1
    """
    count = count or space.dim

    if space.family == 'legendre':
        nodes, weights = legendre.leggauss(count)
        a, b = space.measure.a, space.measure.b
        return (a + b) / 2 + (b - a) / 2 * nodes, weights / 2

    if space.family == 'hermite':
        nodes, weights = hermite_e.hermegauss(count)
        return nodes, weights / math.sqrt(2 * math.pi)

    m = space.measure.m
    return np.arange(m, dtype=float), np.full(m, 1.0 / m)


def default_space(measure: Measure1D, degree=None):
    """
    Polynomial space of the given degree matching the measure, or the
    canonical space of a finite measure
    """
    if measure.is_finite:
        return FeatureSpace(measure, 'canonical', measure.m)

    if degree is None:
        raise FeatureSpaceError('A polynomial degree is required')

    family = 'legendre' if measure.kind == 'uniform' else 'hermite'
    return FeatureSpace(measure, family, int(degree) + 1)


_SPACE_PATTERN = re.compile('^(?P<family>[a-z]+):(?P<options>.*)$')


def parse_feature_space(name, measure=None):
    """
    Parse names such as ``legendre:p=10``, ``hermite:p=4``,
    ``canonical:m=2`` or ``legendre:p=3,a=0,b=2``
    """
    match = _SPACE_PATTERN.match(name.strip())
    if match is None:
        raise FeatureSpaceError('Malformed feature space %r' % name)

    family = match.group('family')
    options = {}
    for item in filter(None, match.group('options').split(',')):
        key, _, value = item.partition('=')
        options[key.strip()] = value.strip()

    try:
        if family == 'canonical':
            m = int(options['m'])
            return FeatureSpace(Measure1D.finite_uniform(m), family, m)

        degree = int(options['p'])
    except (KeyError, ValueError):
        raise FeatureSpaceError('Malformed feature space %r' % name)

    if family == 'legendre':
        if measure is None:
            measure = Measure1D.uniform(
                float(options.get('a', -1.0)), float(options.get('b', 1.0))
            )
        return FeatureSpace(measure, family, degree + 1)

    if family == 'hermite':
        return FeatureSpace(measure or Measure1D.std_gaussian(), family, degree + 1)

    raise FeatureSpaceError('Unknown basis family %r' % family)
