"""
Magic point selection and interpolation on finite-dimensional spaces.

A space is described by the matrix of its basis functions evaluated on a
candidate pool, rows for points and columns for basis functions.
"""
import logging

from functools import reduce
from typing import Sequence

import numpy as np
import scipy.linalg

from treepca.errors import UnisolvenceError

logger = logging.getLogger(__name__)

PIVOT_TOLERANCE = 1e-12


class MagicGrid:
    """
    Unisolvent grid of a space together with the factorised interpolation
    matrix ``matrix[k, j] = phi_j(x^k)``
    """

    def __init__(self, point_indices, basis_indices, matrix):
        self.point_indices = np.asarray(point_indices, dtype=int)
        self.basis_indices = np.asarray(basis_indices, dtype=int)
        self.matrix = np.asarray(matrix, dtype=float)
        self._lu = scipy.linalg.lu_factor(self.matrix, check_finite=False)

        self.point_indices.setflags(write=False)
        self.basis_indices.setflags(write=False)
        self.matrix.setflags(write=False)

    @property
    def size(self):
        return self.point_indices.size

    def __repr__(self):
        return '<MagicGrid n=%d>' % self.size

    def coefficients(self, values):
        return interp_coeffs(self, values)


def magic_points(basis_values) -> MagicGrid:
    """
    Greedy selection of n interpolation points among the rows of
    ``basis_values`` (#candidates x n).

    Step k picks the candidate and basis index maximising the residual
    |psi_i(x)|, where the residuals vanish at the chosen points and in the
    chosen directions. Ties go to the lowest candidate, then the lowest basis
    index.
    """
    values = np.asarray(basis_values, dtype=float)
    if values.ndim != 2:
        raise ValueError('basis values must be a matrix')

    candidates, n = values.shape
    if candidates < n:
        raise UnisolvenceError(
            'Only %d candidates for a space of dimension %d' % (candidates, n),
            step=candidates + 1
        )

    scale = np.max(np.abs(values)) if values.size else 0.0
    residual = values.copy()

    points, directions = [], []
    for step in range(1, n + 1):
        flat = int(np.argmax(np.abs(residual)))
        point, direction = divmod(flat, n)
        pivot = residual[point, direction]

        if not abs(pivot) > PIVOT_TOLERANCE * scale:
            raise UnisolvenceError(
                'Candidate pool is not unisolvent at step %d '
                '(pivot %.3e)' % (step, abs(pivot)),
                step=step
            )

        points.append(point)
        directions.append(direction)

        residual -= np.outer(residual[:, direction], residual[point, :] / pivot)
        residual[point, :] = 0.0
        residual[:, direction] = 0.0

    assert len(set(directions)) == n

    logger.debug('Selected %d magic points among %d candidates', n, candidates)

    return MagicGrid(points, directions, values[points, :])


def interp_coeffs(grid: MagicGrid, values):
    """
    Coefficients c with ``grid.matrix @ c = values``, one column per right
    hand side
    """
    values = np.asarray(values, dtype=float)
    vector = values.ndim == 1

    if values.shape[0] != grid.size:
        raise ValueError(
            'Expected %d values per column, got %d' % (grid.size, values.shape[0])
        )

    coefficients = scipy.linalg.lu_solve(grid._lu, values, check_finite=False)

    return coefficients.ravel() if vector else coefficients


class ProductGrid:
    """
    Tensor product of son grids; points are enumerated in row-major order
    over the sons
    """

    def __init__(self, grids: Sequence[MagicGrid]):
        self.grids = list(grids)

    @property
    def shape(self):
        return tuple(grid.size for grid in self.grids)

    @property
    def size(self):
        return int(np.prod(self.shape))

    def multi_indices(self):
        """
        Per son, the position of each product point in that son's grid
        """
        return np.indices(self.shape).reshape(len(self.grids), -1)

    def matrix(self):
        return reduce(np.kron, [grid.matrix for grid in self.grids])

    def _per_axis(self, values, apply):
        values = np.asarray(values, dtype=float)
        vector = values.ndim == 1

        if values.shape[0] != self.size:
            raise ValueError(
                'Expected %d values per column, got %d' % (self.size, values.shape[0])
            )

        columns = values.reshape(self.size, -1)
        tensor = columns.reshape(self.shape + (columns.shape[1], ))
        for axis, grid in enumerate(self.grids):
            moved = np.moveaxis(tensor, axis, 0)
            result = apply(grid, moved.reshape(grid.size, -1))
            tensor = np.moveaxis(result.reshape(moved.shape), 0, axis)

        result = tensor.reshape(self.size, -1)

        return result.ravel() if vector else result

    def coefficients(self, values):
        """
        Solve the Kronecker interpolation system one son axis at a time
        """
        return self._per_axis(values, interp_coeffs)

    def evaluate(self, coefficients):
        """
        Values at the product points of the functions with the given
        coefficient columns; inverse of ``coefficients``
        """
        return self._per_axis(coefficients, lambda grid, block: grid.matrix @ block)
