import numpy as np
import pytest

from treepca.bases import Measure1D
from treepca.bench import estimation
from treepca.errors import UndefinedRelativeErrorError
from treepca.hopca import BlackBox


def blackbox(function, d=2):
    return BlackBox(function, [Measure1D.uniform()] * d)


class TestMcErrors:
    def test_exact_approximation(self):
        u = blackbox(lambda X: np.sin(X.sum(axis=1)))

        errors = estimation.mc_errors(u, lambda X: np.sin(X.sum(axis=1)), samples=500)

        assert errors.l2 == 0.0
        assert errors.linf == 0.0

    def test_zero_approximation(self):
        u = blackbox(lambda X: np.ones(X.shape[0]))

        errors = estimation.mc_errors(u, lambda X: np.zeros(X.shape[0]), samples=100)

        assert errors == (1.0, 1.0)

    def test_scaled_approximation(self):
        u = blackbox(lambda X: X[:, 0] + 2)

        errors = estimation.mc_errors(u, lambda X: 0.9 * (X[:, 0] + 2), samples=1000)

        assert errors.l2 == pytest.approx(0.1)
        assert errors.linf == pytest.approx(0.1)

    def test_zero_function(self):
        u = blackbox(lambda X: np.zeros(X.shape[0]))

        with pytest.raises(UndefinedRelativeErrorError):
            estimation.mc_errors(u, lambda X: np.zeros(X.shape[0]), samples=10)

    def test_training_counter_unchanged(self):
        u = blackbox(lambda X: X.sum(axis=1) + 3)
        u(np.zeros((4, 2)))

        estimation.mc_errors(u, lambda X: X.sum(axis=1), samples=25, chunk=10)

        assert u.evaluations == 4
        assert u.test_evaluations == 25

    def test_reproducible(self):
        u = blackbox(lambda X: np.exp(X[:, 0] * X[:, 1]))

        def approx(X):
            return 1 + X[:, 0] * X[:, 1]

        first = estimation.mc_errors(u, approx, samples=200, seed=5)
        second = estimation.mc_errors(u, approx, samples=200, seed=5)
        other = estimation.mc_errors(u, approx, samples=200, seed=6)

        assert first == second
        assert first != other

    def test_needs_samples(self):
        u = blackbox(lambda X: X[:, 0])

        with pytest.raises(ValueError):
            estimation.mc_errors(u, lambda X: X[:, 0], samples=0)


def test_relative_error_is_l2():
    u = blackbox(lambda X: X[:, 0] + 2)

    def approx(X):
        return X[:, 1] + 2

    assert estimation.mc_relative_error(u, approx, samples=300, seed=1) == \
        estimation.mc_errors(u, approx, samples=300, seed=1).l2
