"""
Leaves-to-root construction of tree-based tensors from point evaluations.

Each active node gets the principal subspace of an empirical PCA of its
partial evaluations, interpolated on a grid of magic points nested in the
product of its sons' grids. The root is obtained by interpolation on the
product grid of its sons.
"""
import logging
import math
import threading

from dataclasses import dataclass, field
from functools import partial
from typing import Dict, List

import numpy as np

from treepca import dimtree, workers
from treepca.bases import (
    DEFAULT_CANDIDATES,
    FeatureSpace,
    Measure1D,
    candidate_grid,
    sample,
)
from treepca.dimtree import ActiveSet, DimensionTree, Node
from treepca.errors import (
    ConfigurationError,
    DenseCapError,
    EvaluationError,
    FeatureSpaceError,
    RankError,
)
from treepca.interp import MagicGrid, ProductGrid, magic_points
from treepca.tnet import (
    DENSE_CAP,
    DenseTensor,
    TreeTensor,
    eval_tree,
    truncation_rank,
)
from treepca.utils import ceil_samples, node_label, rng_stream

logger = logging.getLogger(__name__)

LOCAL_RULES = ('eps', 'eps_over_sqrtA')

CONCURRENT_CHUNK = 4096

# Singular values below this fraction of the largest count as zero
RANK_THRESHOLD = 1e-12


class BlackBox:
    """
    Deterministic function on a product domain with evaluation counters.

    ``evaluator`` maps an N x d array of points to N values. Training
    evaluations (``__call__``) and test evaluations (``evaluate_test``) are
    counted separately.
    """

    def __init__(self, evaluator, measures, concurrent=False, name=None,
                 vectorized=True):
        self.evaluator = evaluator
        self.measures = tuple(measures)
        self.concurrent = concurrent
        self.name = name or getattr(evaluator, '__name__', 'blackbox')
        self.vectorized = vectorized

        self.evaluations = 0
        self.test_evaluations = 0
        self._lock = threading.Lock()

    @property
    def d(self):
        return len(self.measures)

    def __repr__(self):
        return '<BlackBox %s d=%d>' % (self.name, self.d)

    def _apply(self, points):
        if self.vectorized:
            return np.asarray(self.evaluator(points), dtype=float).reshape(-1)

        return np.array([float(self.evaluator(point)) for point in points])

    def _offending_point(self, points):
        for point in points:
            try:
                value = self._apply(point[np.newaxis])
            except Exception:
                return tuple(point)

            if not np.all(np.isfinite(value)):
                return tuple(point)

    def _evaluate(self, points):
        try:
            values = self._apply(points)
        except Exception as exc:
            point = self._offending_point(points)
            raise EvaluationError(
                'Evaluation of %s failed at %r: %s' % (self.name, point, exc),
                point=point
            )

        if values.shape[0] != points.shape[0]:
            raise EvaluationError(
                '%s returned %d values for %d points' % (
                    self.name, values.shape[0], points.shape[0])
            )

        finite = np.isfinite(values)
        if not np.all(finite):
            point = tuple(points[np.argmin(finite)])
            raise EvaluationError(
                '%s is not finite at %r' % (self.name, point), point=point
            )

        return values

    def _count(self, count, test):
        with self._lock:
            if test:
                self.test_evaluations += count
            else:
                self.evaluations += count

    def _run(self, points, test):
        points = np.atleast_2d(np.asarray(points, dtype=float))

        if points.shape[1] != self.d:
            raise ValueError(
                'Points have %d coordinates, expected %d' % (points.shape[1], self.d)
            )

        self._count(points.shape[0], test)

        if not self.concurrent or points.shape[0] <= CONCURRENT_CHUNK:
            return self._evaluate(points)

        jobs = [
            partial(self._evaluate, points[start:start + CONCURRENT_CHUNK])
            for start in range(0, points.shape[0], CONCURRENT_CHUNK)
        ]

        return np.concatenate(workers.run_jobs(jobs))

    def __call__(self, points):
        return self._run(points, test=False)

    def evaluate_test(self, points):
        return self._run(points, test=True)

    def sample_points(self, count, rng, dims=None):
        """
        ``count`` draws on the given 1-based dims (all by default), one
        column per dimension drawn in dimension order
        """
        dims = range(1, self.d + 1) if dims is None else dims
        columns = [sample(self.measures[dim - 1], count, rng) for dim in dims]

        if not columns:
            return np.zeros((count, 0))

        return np.column_stack(columns)


def partial_sample_matrix(u: BlackBox, alpha, grid_alpha, samples_alpha_c):
    """
    Matrix of u at (grid point i on alpha, sample k on the complement);
    ``grid_alpha`` is #grid x |alpha|, ``samples_alpha_c`` is m x |alpha^c|
    """
    alpha = dimtree.as_node(alpha)
    complement = [dim for dim in range(1, u.d + 1) if dim not in alpha]

    grid_alpha = np.asarray(grid_alpha, dtype=float).reshape(-1, len(alpha))
    samples = np.asarray(samples_alpha_c, dtype=float).reshape(-1, len(complement))

    if grid_alpha.shape[0] == 0 or samples.shape[0] == 0:
        raise ValueError('Grid and complement samples must be nonempty')

    size, m = grid_alpha.shape[0], samples.shape[0]

    points = np.empty((size * m, u.d))
    points[:, [dim - 1 for dim in alpha]] = np.repeat(grid_alpha, m, axis=0)
    if complement:
        points[:, [dim - 1 for dim in complement]] = np.tile(samples, (size, 1))

    return u(points).reshape(size, m)


@dataclass(frozen=True)
class PrescribedRank:
    ranks: object
    gamma: float = 1.0

    def __post_init__(self):
        if not self.gamma >= 1:
            raise ConfigurationError('gamma must be >= 1, got %r' % self.gamma)

    def sample_count(self, rank, dim_v):
        return ceil_samples(self.gamma, rank)


@dataclass(frozen=True)
class PrescribedTolerance:
    eps: float
    local_rule: str = 'eps'
    gamma: float = 1.0

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigurationError('eps must be positive, got %r' % self.eps)

        if self.local_rule not in LOCAL_RULES:
            raise ConfigurationError('Unknown local rule %r' % self.local_rule)

        if not self.gamma >= 1:
            raise ConfigurationError('gamma must be >= 1, got %r' % self.gamma)

    def sample_count(self, rank, dim_v):
        return ceil_samples(self.gamma, dim_v)

    def node_tolerance(self, active_count):
        if self.local_rule == 'eps_over_sqrtA':
            return self.eps / math.sqrt(active_count)

        return self.eps


@dataclass
class PcaResult:
    components: np.ndarray
    singular_values: np.ndarray
    rank: int
    degenerate: bool = False


def numerical_rank(singular_values):
    singular_values = np.asarray(singular_values, dtype=float)

    if singular_values.size == 0 or not singular_values[0] > 0:
        return 1

    return max(1, int(np.sum(singular_values > RANK_THRESHOLD * singular_values[0])))


def empirical_pca(samples, rank=None, tol=None) -> PcaResult:
    """
    Principal components (rows, orthonormal) of the columns of ``samples``,
    coefficients of m sampled functions in an orthonormal basis.

    With ``rank`` at most that many components are kept, fewer when the
    numerical rank of the samples is lower. With ``tol`` the smallest rank
    whose discarded energy is at most tol^2 of the total. A zero matrix
    keeps one component and is flagged degenerate.
    """
    samples = np.asarray(samples, dtype=float)

    if samples.ndim != 2 or samples.size == 0:
        raise RankError('Empty sample matrix')

    dim_v, m = samples.shape
    left, singular_values, _ = np.linalg.svd(
        samples / math.sqrt(m), full_matrices=False
    )

    degenerate = False
    if rank is not None:
        if rank > min(dim_v, m):
            raise RankError(
                'Rank %d exceeds min(dim V = %d, samples = %d)' % (rank, dim_v, m)
            )
        kept = min(int(rank), numerical_rank(singular_values))
        degenerate = not singular_values[0] > 0
    else:
        kept = truncation_rank(singular_values, tol)
        if kept == 0:
            kept, degenerate = 1, True

    return PcaResult(left[:, :kept].T, singular_values, kept, degenerate)


@dataclass
class NodeResult:
    node: Node
    components: np.ndarray
    singular_values: np.ndarray
    grid: MagicGrid
    grid_points: np.ndarray
    candidate_points: np.ndarray
    samples: int
    degenerate: bool = False

    @property
    def rank(self):
        return self.components.shape[0]


@dataclass
class RunReport:
    evaluations: int
    storage: int
    predicted: int
    ranks: Dict[Node, int]
    singular_values: Dict[Node, np.ndarray]
    samples: Dict[Node, int]
    degenerate_nodes: List[Node] = field(default_factory=list)
    capped_nodes: List[Node] = field(default_factory=list)
    node_results: Dict[Node, NodeResult] = field(default_factory=dict)

    @property
    def max_rank(self):
        return max(self.ranks.values())


def _check_spaces(u: BlackBox, spaces):
    spaces = list(spaces)

    if len(spaces) != u.d:
        raise FeatureSpaceError(
            'Expected %d leaf spaces, got %d' % (u.d, len(spaces))
        )

    for dim, (space, measure) in enumerate(zip(spaces, u.measures), start=1):
        if space.measure != measure:
            raise FeatureSpaceError(
                'Space %s on dimension %d does not match measure %s' % (
                    space.name, dim, measure.kind)
            )

    return spaces


def _leaf_grid(space: FeatureSpace, seed, dim, candidates):
    pool = candidate_grid(space, candidates, rng_stream(seed, 'candidates', dim))
    grid = magic_points(space.basis_eval(pool))

    return grid, pool[grid.point_indices][:, np.newaxis]


def _product_points(node, sons, son_points, product: ProductGrid):
    """
    Coordinates on the dims of ``node`` of the points of a product grid
    """
    points = np.empty((product.size, len(node)))

    for son, coords, indices in zip(sons, son_points, product.multi_indices()):
        columns = [node.index(dim) for dim in son]
        points[:, columns] = coords[indices]

    return points


def hopca_approximate(u: BlackBox, tree: DimensionTree, active: ActiveSet,
                      spaces, policy, seed=0, candidates=DEFAULT_CANDIDATES):
    """
    Approximation of u in the tree-based format of ``active``, together with
    a RunReport whose evaluation count is exact
    """
    spaces = _check_spaces(u, spaces)
    order = dimtree.nodes_bottom_up(tree, active)
    start = u.evaluations

    if isinstance(policy, PrescribedRank):
        requested = dimtree.rank_tuple(tree, active, policy.ranks)
        node_tol = None
    else:
        requested = None
        node_tol = policy.node_tolerance(len(active))

    # Grids and points of U_beta for every son seen so far
    grids: Dict[Node, MagicGrid] = {}
    grid_points: Dict[Node, np.ndarray] = {}

    for leaf in tree.leaves:
        if leaf not in active:
            grids[leaf], grid_points[leaf] = _leaf_grid(
                spaces[leaf[0] - 1], seed, leaf[0], candidates
            )

    leaves, cores, results = {}, {}, {}

    for node in order:
        sons = tree.sons(node)

        if sons:
            product = ProductGrid([grids[son] for son in sons])
            points_v = _product_points(
                node, sons, [grid_points[son] for son in sons], product
            )
        else:
            leaf_grid, points_v = _leaf_grid(
                spaces[node[0] - 1], seed, node[0], candidates
            )
            product = ProductGrid([leaf_grid])

        dim_v = product.size
        rank = requested[node] if requested is not None else None

        if rank is not None and rank > dim_v:
            raise RankError(
                'Rank %d of node %s exceeds dim V = %d' % (
                    rank, node_label(node), dim_v)
            )

        m = policy.sample_count(rank, dim_v)
        complement = [dim for dim in range(1, tree.d + 1) if dim not in node]
        samples = u.sample_points(m, rng_stream(seed, 'samples', node), complement)

        values = partial_sample_matrix(u, node, points_v, samples)
        pca = empirical_pca(product.coefficients(values), rank=rank, tol=node_tol)

        grid = magic_points(product.evaluate(pca.components.T))
        grids[node] = grid
        grid_points[node] = points_v[grid.point_indices]

        if sons:
            cores[node] = pca.components.reshape((pca.rank, ) + product.shape)
        else:
            leaves[node] = pca.components

        results[node] = NodeResult(
            node, pca.components, pca.singular_values, grid,
            grid_points[node], points_v, m, pca.degenerate
        )

        logger.debug(
            'Node %s: dim V = %d, m = %d, rank = %d, evaluations so far %d',
            node_label(node), dim_v, m, pca.rank, u.evaluations - start
        )

    sons = tree.sons(tree.root)
    product = ProductGrid([grids[son] for son in sons])
    points = _product_points(
        tree.root, sons, [grid_points[son] for son in sons], product
    )
    values = u(points)
    cores[tree.root] = product.coefficients(values).reshape(product.shape)

    tt = TreeTensor(tree, active, spaces, leaves, cores, orthonormal=True)

    ranks = tt.ranks
    report = RunReport(
        evaluations=u.evaluations - start,
        storage=tt.storage(),
        predicted=predicted_evaluations(
            tree, active, ranks, [space.dim for space in spaces], policy,
            sample_ranks=requested,
        ),
        ranks=ranks,
        singular_values={n: r.singular_values for n, r in results.items()},
        samples={n: r.samples for n, r in results.items()},
        degenerate_nodes=[n for n in order if results[n].degenerate],
        capped_nodes=[
            n for n in order
            if requested is not None and ranks[n] < requested[n]
        ],
        node_results=results,
    )

    logger.info('%s: M = %d, S = %d, max rank %d',
                u.name, report.evaluations, report.storage, report.max_rank)

    return tt, report


def predicted_evaluations(tree: DimensionTree, active: ActiveSet, ranks,
                          leaf_dims, policy, sample_ranks=None) -> int:
    """
    Number of evaluations used by ``hopca_approximate`` for the given
    ranks: sum over active nodes of m * dim V, plus the root grid size.

    ``sample_ranks`` are the ranks m is drawn for, the requested ones when
    a prescribed rank was capped at a lower numerical rank.
    """
    ranks = dimtree.rank_tuple(tree, active, ranks)
    sample_ranks = ranks if sample_ranks is None else dimtree.rank_tuple(
        tree, active, sample_ranks)
    leaf_dims = dimtree.leaf_dimensions(tree, leaf_dims)

    total = 0
    for node in dimtree.nodes_bottom_up(tree, active):
        if tree.is_leaf(node):
            dim_v = leaf_dims[node]
        else:
            dim_v = math.prod(
                dimtree.son_dimensions(tree, active, node, ranks, leaf_dims)
            )

        total += policy.sample_count(sample_ranks[node], dim_v) * dim_v

    return total + math.prod(
        dimtree.son_dimensions(tree, active, tree.root, ranks, leaf_dims)
    )


def tensorize(f, d) -> BlackBox:
    """
    BlackBox on {0,1}^d with u(i_1, ..., i_d) = f(sum_k i_k 2^-k)
    """
    if d < 1:
        raise ValueError('d must be >= 1')

    weights = 0.5 ** np.arange(1, d + 1)

    def evaluator(points):
        return f(points @ weights)

    return BlackBox(
        evaluator,
        [Measure1D.finite_uniform(2)] * d,
        name='tensorized %s' % getattr(f, '__name__', 'f'),
    )


def tree_tensor_blackbox(tt: TreeTensor) -> BlackBox:
    return BlackBox(
        partial(eval_tree, tt),
        [space.measure for space in tt.spaces],
        name='tree tensor',
    )


def dense_interpolation(u: BlackBox, spaces, seed=0,
                        candidates=DEFAULT_CANDIDATES) -> DenseTensor:
    """
    Interpolation of u on the product of the leaf magic grids, as a dense
    coefficient tensor (small d only)
    """
    spaces = _check_spaces(u, spaces)
    root = tuple(range(1, u.d + 1))

    leaf_grids = [
        _leaf_grid(space, seed, dim, candidates)
        for dim, space in enumerate(spaces, start=1)
    ]
    product = ProductGrid([grid for grid, _ in leaf_grids])

    if product.size > DENSE_CAP:
        raise DenseCapError(
            'Dense interpolation on %d points exceeds the cap of %d' % (
                product.size, DENSE_CAP)
        )

    points = _product_points(
        root, [(dim, ) for dim in root], [p for _, p in leaf_grids], product
    )

    return DenseTensor(
        product.coefficients(u(points)).reshape(product.shape), spaces
    )
