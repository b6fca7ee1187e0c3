import math

import numpy as np
import pytest

from treepca import dimtree, hopca, tnet
from treepca.bases import Measure1D
from treepca.bench import functions
from treepca.errors import ConfigurationError


class TestHenonHeiles:
    def test_origin(self):
        u = functions.henon_heiles(3)

        assert u(np.zeros((1, 3)))[0] == 0.0

    def test_two_dimensions(self):
        u = functions.henon_heiles(2)

        # 1/2 (1 + 4) + 0.2 (1 * 4 - 1) + 0.04 / 16 * 25
        assert np.isclose(u([[1.0, 2.0]])[0], 2.5 + 0.6 + 0.0625)

    def test_measures(self):
        u = functions.henon_heiles(4)

        assert u.measures == (Measure1D.std_gaussian(), ) * 4

    def test_needs_two_dimensions(self):
        with pytest.raises(ConfigurationError):
            functions.henon_heiles(1)


class TestSineSum:
    def test_value(self):
        u = functions.sine_sum(2)

        assert np.isclose(u([[math.pi / 4, math.pi / 4]])[0], 1.0)

    def test_measures(self):
        assert functions.sine_sum(3).measures == (Measure1D.uniform(), ) * 3


class TestSumBivariate:
    def test_poly4(self):
        u = functions.sum_bivariate(4, g='poly4')

        # (1 + 2 + 4 + 8) + (1 + 0 + 0 + 0)
        assert np.isclose(u([[1.0, 2.0, 0.5, 0.0]])[0], 15.0 + 1.0)

    def test_gauss(self):
        u = functions.sum_bivariate(2, g='gauss')

        assert np.isclose(u([[1.0, -1.0]])[0], math.exp(-0.5))

    def test_odd_dimension(self):
        with pytest.raises(ConfigurationError):
            functions.sum_bivariate(5)

    def test_unknown_kernel(self):
        with pytest.raises(ConfigurationError):
            functions.sum_bivariate(4, g='cubic')


class TestBorehole:
    def test_origin(self):
        u = functions.borehole()

        assert u(np.zeros((1, 8)))[0] == pytest.approx(70.947519440979, rel=1e-10)

    def test_measures(self):
        u = functions.borehole()

        assert u.measures[:2] == (Measure1D.std_gaussian(), ) * 2
        assert u.measures[2:] == (Measure1D.uniform(), ) * 6

    def test_fixed_dimension(self):
        with pytest.raises(ConfigurationError):
            functions.borehole(6)

    def test_positive_flow(self):
        u = functions.borehole()
        points = u.sample_points(100, np.random.default_rng(0))

        assert np.all(u(points) > 0)


class TestTensorized:
    def test_square(self):
        u = functions.tensorized(3, f='square')

        assert np.isclose(u([[1.0, 1.0, 0.0]])[0], 0.75 ** 2)

    def test_sqrt(self):
        u = functions.tensorized(2, f='sqrt')

        assert np.isclose(u([[0.0, 1.0]])[0], 0.5)

    def test_unknown_function(self):
        with pytest.raises(ConfigurationError):
            functions.tensorized(3, f='cube')


class TestDenseAlphaRanks:
    def test_henon_heiles(self):
        u = functions.henon_heiles(4)
        dense = hopca.dense_interpolation(u, functions.function_spaces(u, 4))
        _, active = dimtree.build_tree('tt', 4)

        assert [tnet.dense_alpha_rank(dense, node) for node in active] == [3, 3, 3]

    def test_sine_sum(self):
        u = functions.sine_sum(4)
        dense = hopca.dense_interpolation(u, functions.function_spaces(u, 7))
        _, active = dimtree.build_tree('ttt', 4)

        assert {tnet.dense_alpha_rank(dense, node) for node in active} == {2}


class TestTestFunction:
    def test_lookup(self):
        u = functions.test_function('sum_bivariate', d=6, g='gauss')

        assert u.d == 6

    def test_unknown(self):
        with pytest.raises(ConfigurationError):
            functions.test_function('rosenbrock', d=3)

    def test_bad_parameter(self):
        with pytest.raises(ConfigurationError):
            functions.test_function('sine_sum', d=3, sigma=0.1)

    def test_every_function_builds(self):
        for name, d in [('henon_heiles', 3), ('sine_sum', 3), ('sum_bivariate', 4),
                        ('borehole', 8), ('tensorized', 5)]:
            u = functions.test_function(name, d=d)
            assert u.d == d
            assert np.all(np.isfinite(u(u.sample_points(5, np.random.default_rng(1)))))


class TestSpaces:
    def test_function_spaces(self):
        spaces = functions.function_spaces(functions.borehole(), 3)

        assert [space.family for space in spaces] == ['hermite'] * 2 + ['legendre'] * 6
        assert all(space.dim == 4 for space in spaces)

    @pytest.mark.parametrize('eps,degree', [
        (1e-1, 1), (1e-4, 4), (1e-10, 10), (0.5, 1), (0.05, 2),
    ])
    def test_degree_for(self, eps, degree):
        assert functions.degree_for(eps) == degree
