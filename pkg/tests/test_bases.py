import math

import numpy as np
import pytest

from treepca import bases
from treepca.bases import FeatureSpace, Measure1D
from treepca.errors import FeatureSpaceError


class TestMeasure1D:
    def test_uniform_defaults(self):
        measure = Measure1D.uniform()

        assert (measure.a, measure.b) == (-1.0, 1.0)
        assert not measure.is_finite

    def test_uniform_bounds(self):
        with pytest.raises(FeatureSpaceError):
            Measure1D.uniform(1, 1)

    def test_finite_needs_points(self):
        with pytest.raises(FeatureSpaceError):
            Measure1D.finite_uniform(0)

    def test_unknown_kind(self):
        with pytest.raises(FeatureSpaceError):
            Measure1D('beta')


class TestSample:
    def test_uniform_support(self):
        rng = np.random.default_rng(0)
        draws = Measure1D.uniform(2, 5).sample(1000, rng)

        assert draws.shape == (1000, )
        assert np.all((draws >= 2) & (draws <= 5))

    def test_finite_support(self):
        rng = np.random.default_rng(0)
        draws = Measure1D.finite_uniform(3).sample(500, rng)

        assert set(np.unique(draws)) == {0.0, 1.0, 2.0}

    def test_gaussian_moments(self):
        rng = np.random.default_rng(1)
        draws = Measure1D.std_gaussian().sample(100000, rng)

        assert abs(np.mean(draws)) < 0.02
        assert abs(np.var(draws) - 1) < 0.02

    def test_reproducible(self):
        measure = Measure1D.uniform()

        first = measure.sample(10, np.random.default_rng(4))
        second = measure.sample(10, np.random.default_rng(4))

        assert np.array_equal(first, second)

    def test_negative_count(self):
        with pytest.raises(ValueError):
            Measure1D.uniform().sample(-1, np.random.default_rng(0))


class TestFeatureSpace:
    def test_incompatible_family(self):
        with pytest.raises(FeatureSpaceError):
            FeatureSpace(Measure1D.uniform(), 'hermite', 3)

    def test_unknown_family(self):
        with pytest.raises(FeatureSpaceError):
            FeatureSpace(Measure1D.uniform(), 'chebyshev', 3)

    def test_empty_space(self):
        with pytest.raises(FeatureSpaceError):
            FeatureSpace(Measure1D.uniform(), 'legendre', 0)

    def test_canonical_dimension(self):
        with pytest.raises(FeatureSpaceError):
            FeatureSpace(Measure1D.finite_uniform(3), 'canonical', 2)

    def test_names(self):
        assert bases.default_space(Measure1D.uniform(), 10).name == 'legendre:p=10'
        assert bases.default_space(Measure1D.std_gaussian(), 4).name == 'hermite:p=4'
        assert bases.default_space(Measure1D.finite_uniform(2)).name == 'canonical:m=2'

    def test_degree(self):
        assert bases.default_space(Measure1D.uniform(), 3).degree == 3
        assert bases.default_space(Measure1D.uniform(), 3).dim == 4


class TestBasisEval:
    def test_legendre_at_one(self):
        space = bases.default_space(Measure1D.uniform(), 1)

        assert np.allclose(space.basis_eval([1.0]), [[1.0, math.sqrt(3)]])

    def test_legendre_at_zero(self):
        space = bases.default_space(Measure1D.uniform(), 2)

        assert np.allclose(space.basis_eval([0.0]), [[1.0, 0.0, -math.sqrt(5) / 2]])

    def test_legendre_shifted_interval(self):
        shifted = bases.default_space(Measure1D.uniform(0, 2), 3)
        reference = bases.default_space(Measure1D.uniform(), 3)

        x = np.linspace(0, 2, 7)
        assert np.allclose(shifted.basis_eval(x), reference.basis_eval(x - 1))

    @pytest.mark.parametrize('point', [1.5, -1.01, np.nan])
    def test_legendre_outside_support(self, point):
        space = bases.default_space(Measure1D.uniform(), 2)

        with pytest.raises(FeatureSpaceError):
            space.basis_eval([0.0, point])

    def test_legendre_interval_ends(self):
        space = bases.default_space(Measure1D.uniform(0, 2), 2)

        assert space.basis_eval([0.0, 2.0]).shape == (2, 3)

    def test_hermite_at_zero(self):
        space = bases.default_space(Measure1D.std_gaussian(), 2)

        assert np.allclose(space.basis_eval([0.0]), [[1.0, 0.0, -1 / math.sqrt(2)]])

    def test_canonical(self):
        space = bases.default_space(Measure1D.finite_uniform(2))

        assert np.allclose(space.basis_eval([1.0, 0.0]), [[0.0, math.sqrt(2)], [math.sqrt(2), 0.0]])

    @pytest.mark.parametrize('point', [2.0, 0.5, -1.0, np.nan])
    def test_canonical_invalid_code(self, point):
        space = bases.default_space(Measure1D.finite_uniform(2))

        with pytest.raises(FeatureSpaceError):
            space.basis_eval([point])

    def test_shape(self):
        space = bases.default_space(Measure1D.uniform(), 4)

        assert space.basis_eval(np.zeros(7)).shape == (7, 5)


@pytest.mark.parametrize('space', [
    bases.default_space(Measure1D.uniform(), 6),
    bases.default_space(Measure1D.uniform(-3, 7), 4),
    bases.default_space(Measure1D.std_gaussian(), 6),
    bases.default_space(Measure1D.finite_uniform(4)),
], ids=lambda space: space.name)
def test_orthonormal_under_quadrature(space):
    nodes, weights = bases.gauss_quadrature(space)
    values = space.basis_eval(nodes)

    gram = values.T @ (weights[:, None] * values)

    assert np.allclose(gram, np.eye(space.dim), atol=1e-10)


class TestCandidateGrid:
    def test_finite_support(self):
        space = bases.default_space(Measure1D.finite_uniform(3))

        assert np.array_equal(space.candidate_grid(10, None), [0.0, 1.0, 2.0])

    def test_continuous_size(self):
        space = bases.default_space(Measure1D.uniform(), 3)

        grid = bases.candidate_grid(space, rng=np.random.default_rng(0))

        assert grid.shape == (bases.DEFAULT_CANDIDATES, )

    def test_continuous_needs_generator(self):
        space = bases.default_space(Measure1D.uniform(), 3)

        with pytest.raises(FeatureSpaceError):
            bases.candidate_grid(space, 10)


class TestDefaultSpace:
    def test_needs_degree(self):
        with pytest.raises(FeatureSpaceError):
            bases.default_space(Measure1D.uniform())

    def test_finite_ignores_degree(self):
        space = bases.default_space(Measure1D.finite_uniform(2), 7)

        assert space.family == 'canonical'
        assert space.dim == 2


class TestParseFeatureSpace:
    def test_legendre(self):
        space = bases.parse_feature_space('legendre:p=10')

        assert space.family == 'legendre'
        assert space.dim == 11
        assert space.measure == Measure1D.uniform()

    def test_legendre_interval(self):
        space = bases.parse_feature_space('legendre:p=3,a=0,b=2')

        assert (space.measure.a, space.measure.b) == (0.0, 2.0)
        assert bases.parse_feature_space(space.name) == space

    def test_hermite(self):
        space = bases.parse_feature_space('hermite:p=4')

        assert space.measure == Measure1D.std_gaussian()
        assert space.dim == 5

    def test_canonical(self):
        space = bases.parse_feature_space('canonical:m=2')

        assert space.measure == Measure1D.finite_uniform(2)
        assert space.dim == 2

    def test_explicit_measure(self):
        measure = Measure1D.uniform(0, 1)
        space = bases.parse_feature_space('legendre:p=2', measure=measure)

        assert space.measure is measure

    @pytest.mark.parametrize('name', [
        'legendre', 'legendre:q=3', 'hermite:p=x', 'chebyshev:p=3', 'canonical:',
    ])
    def test_malformed(self, name):
        with pytest.raises(FeatureSpaceError):
            bases.parse_feature_space(name)
