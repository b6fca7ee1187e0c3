"""
Tree-based tensors: storage, evaluation and small-scale dense validation.

Every coefficient lives in the orthonormal product basis of the leaf feature
spaces, so L2 norms of represented functions are Euclidean norms of
coefficient arrays.
"""
import json
import logging
import math

from collections import namedtuple
from typing import Dict, Sequence

import numpy as np

from treepca import dimtree
from treepca.bases import FeatureSpace, basis_eval, parse_feature_space
from treepca.dimtree import ActiveSet, DimensionTree, Node
from treepca.errors import (
    DenseCapError,
    NotOrthonormalError,
    RankError,
    StructureError,
)
from treepca.utils import node_label

logger = logging.getLogger(__name__)

DENSE_CAP = 10 ** 7

EVAL_CHUNK = 10000

STORAGE_FORMAT = 'treepca-tree-tensor'
STORAGE_VERSION = 1

AlphaSvd = namedtuple(
    'AlphaSvd', ['left', 'singular_values', 'right', 'rank', 'error']
)


class TreeTensor:
    """
    Function in the tree-based format of an active set.

    ``leaves`` maps each active leaf to its component matrix (r x n), and
    ``cores`` maps the root and each active interior node to its coefficient
    tensor. Interior cores have shape (r, *son dims); the root core has no
    rank axis. Son axes follow the son order of the tree; inactive leaf sons
    carry basis coefficients.
    """

    def __init__(self, tree: DimensionTree, active: ActiveSet,
                 spaces: Sequence[FeatureSpace], leaves, cores,
                 orthonormal=False):
        self.tree = tree
        self.active = active
        self.spaces = tuple(spaces)
        self.leaves: Dict[Node, np.ndarray] = {
            dimtree.as_node(node): np.asarray(value, dtype=float)
            for node, value in leaves.items()
        }
        self.cores: Dict[Node, np.ndarray] = {
            dimtree.as_node(node): np.asarray(value, dtype=float)
            for node, value in cores.items()
        }
        self.orthonormal = bool(orthonormal)

        self._check_shapes()

    @property
    def d(self):
        return self.tree.d

    @property
    def leaf_dims(self) -> Dict[Node, int]:
        return {(k + 1, ): space.dim for k, space in enumerate(self.spaces)}

    @property
    def ranks(self) -> Dict[Node, int]:
        ranks = {leaf: matrix.shape[0] for leaf, matrix in self.leaves.items()}
        ranks.update({
            node: core.shape[0] for node, core in self.cores.items()
            if node != self.tree.root
        })

        return {
            node: ranks[node]
            for node in dimtree.nodes_bottom_up(self.tree, self.active)
        }

    def storage(self) -> int:
        return int(
            sum(m.size for m in self.leaves.values()) +
            sum(c.size for c in self.cores.values())
        )

    def _check_shapes(self):
        tree, active = self.tree, self.active

        if len(self.spaces) != tree.d:
            raise StructureError(
                'Expected %d feature spaces, got %d' % (tree.d, len(self.spaces))
            )

        if set(self.leaves) != set(active.leaves):
            raise StructureError('Leaf matrices must match the active leaves')

        expected_cores = set(active.interior) | {tree.root}
        if set(self.cores) != expected_cores:
            raise StructureError('Cores must match the root and active interior nodes')

        leaf_dims = self.leaf_dims
        ranks = {}

        for leaf in active.leaves:
            matrix = self.leaves[leaf]
            if matrix.ndim != 2 or matrix.shape[1] != leaf_dims[leaf]:
                raise StructureError(
                    'Leaf %s has shape %s, expected (r, %d)' % (
                        node_label(leaf), matrix.shape, leaf_dims[leaf]),
                    node=leaf
                )
            ranks[leaf] = matrix.shape[0]

        for node in _interior_bottom_up(tree, active) + [tree.root]:
            core = self.cores[node]
            sons = tuple(dimtree.son_dimensions(tree, active, node, ranks, leaf_dims))
            shape = core.shape if node == tree.root else core.shape[1:]

            if shape != sons:
                raise StructureError(
                    'Core %s has shape %s, expected son dims %s' % (
                        node_label(node), core.shape, sons),
                    node=node
                )

            if node != tree.root:
                ranks[node] = core.shape[0]

    def __call__(self, points):
        return eval_tree(self, points)

    def __repr__(self):
        return '<TreeTensor d=%d S=%d>' % (self.d, self.storage())


def _interior_bottom_up(tree, active):
    return dimtree.nodes_bottom_up(tree, active)[len(active.leaves):]


def _contract_core(core, son_values):
    """
    Contract the son axes of ``core`` against per-point son vectors
    (N x s_j); returns N x r, or N for the root
    """
    tensor = np.einsum('...s,ns->n...', core, son_values[-1])
    for values in reversed(son_values[:-1]):
        tensor = np.einsum('n...s,ns->n...', tensor, values)

    return tensor


def _eval_chunk(tt: TreeTensor, points):
    tree, active = tt.tree, tt.active

    values = {}
    for k, space in enumerate(tt.spaces):
        leaf = (k + 1, )
        rows = basis_eval(space, points[:, k])
        values[leaf] = rows @ tt.leaves[leaf].T if leaf in active else rows

    for node in _interior_bottom_up(tree, active):
        values[node] = _contract_core(
            tt.cores[node], [values[son] for son in tree.sons(node)]
        )

    return _contract_core(
        tt.cores[tree.root], [values[son] for son in tree.sons(tree.root)]
    )


def eval_tree(tt: TreeTensor, points):
    """
    Values of the represented function at the rows of ``points`` (N x d)
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))

    if points.shape[1] != tt.d:
        raise ValueError(
            'Points have %d coordinates, expected %d' % (points.shape[1], tt.d)
        )

    if points.shape[0] == 0:
        return np.zeros(0)

    return np.concatenate([
        _eval_chunk(tt, points[start:start + EVAL_CHUNK])
        for start in range(0, points.shape[0], EVAL_CHUNK)
    ])


def tree_norm(tt: TreeTensor):
    if not tt.orthonormal:
        raise NotOrthonormalError(
            'Norm needs orthonormal components; use a Monte-Carlo estimate'
        )

    return float(np.linalg.norm(tt.cores[tt.tree.root]))


class DenseTensor:
    """
    Full coefficient array in the orthonormal product basis of ``spaces``
    """

    def __init__(self, values, spaces, cap=DENSE_CAP):
        values = np.asarray(values, dtype=float)
        self.spaces = tuple(spaces)

        if values.size > cap:
            raise DenseCapError(
                'Dense tensor of %d entries exceeds the cap of %d' % (values.size, cap)
            )

        if values.shape != tuple(space.dim for space in self.spaces):
            raise StructureError(
                'Dense shape %s does not match the feature spaces' % (values.shape, )
            )

        self.values = values

    @property
    def shape(self):
        return self.values.shape

    @property
    def d(self):
        return self.values.ndim

    def norm(self):
        return float(np.linalg.norm(self.values))

    def __call__(self, points):
        return dense_eval(self, points)


def _node_dense(tt, node, dense):
    """
    Dense array of the node's components, (r, n_{a1}, ..., n_{ak}) over the
    sorted dims of the node
    """
    tree, active = tt.tree, tt.active

    if tree.is_leaf(node):
        if node in active:
            return tt.leaves[node]
        return np.eye(tt.spaces[node[0] - 1].dim)

    core = tt.cores[node]
    if node == tree.root:
        core = core[np.newaxis]

    return _expand_core(core, node, tree.sons(node), dense)


def _expand_core(core, node, sons, dense):
    tensor, dims = core, []
    for son in sons:
        tensor = np.tensordot(tensor, dense[son], axes=([1], [0]))
        dims.extend(son)

    return np.transpose(tensor, [0] + [1 + dims.index(dim) for dim in node])


def to_dense(tt: TreeTensor, cap=DENSE_CAP) -> DenseTensor:
    size = math.prod(space.dim for space in tt.spaces)
    if size > cap:
        raise DenseCapError(
            'Dense tensor of %d entries exceeds the cap of %d' % (size, cap)
        )

    tree = tt.tree
    dense = {}
    for node in sorted(tree.nodes, key=lambda n: (-tree.level(n), n[0])):
        dense[node] = _node_dense(tt, node, dense)

    return DenseTensor(dense[tree.root][0], tt.spaces, cap=cap)


def dense_eval(x: DenseTensor, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))

    tensor = np.einsum(
        'a...,na->n...', x.values, basis_eval(x.spaces[0], points[:, 0])
    )
    for k in range(1, x.d):
        tensor = np.einsum(
            'na...,na->n...', tensor, basis_eval(x.spaces[k], points[:, k])
        )

    return tensor


def _matricize(values, alpha):
    alpha_axes = [dim - 1 for dim in alpha]
    rest = [axis for axis in range(values.ndim) if axis not in alpha_axes]
    rows = math.prod(values.shape[axis] for axis in alpha_axes)

    return np.transpose(values, alpha_axes + rest).reshape(rows, -1)


def truncation_rank(singular_values, tol):
    """
    Smallest r whose tail energy is at most tol^2 times the total energy;
    zero for a zero spectrum
    """
    energies = np.asarray(singular_values, dtype=float) ** 2
    total = energies.sum()

    if total == 0:
        return 0

    tails = np.append(np.cumsum(energies[::-1])[::-1], 0.0)
    return int(np.argmax(tails <= tol ** 2 * total))


def dense_alpha_svd(x: DenseTensor, alpha, rank=None, tol=None) -> AlphaSvd:
    """
    SVD of the alpha-matricisation, truncated at ``rank`` or at relative
    tolerance ``tol``; ``error`` is the Frobenius norm of the discarded part
    """
    alpha = dimtree.as_node(alpha)

    if len(alpha) >= x.d or alpha[0] < 1 or alpha[-1] > x.d:
        raise StructureError(
            'alpha must be a nonempty strict subset of {1..%d}' % x.d, node=alpha
        )

    left, singular_values, right = np.linalg.svd(
        _matricize(x.values, alpha), full_matrices=False
    )

    if rank is not None:
        kept = min(int(rank), singular_values.size)
    elif tol is not None:
        kept = truncation_rank(singular_values, tol)
    else:
        kept = singular_values.size

    error = float(np.sqrt(np.sum(singular_values[kept:] ** 2)))

    return AlphaSvd(left[:, :kept], singular_values, right[:kept], kept, error)


def dense_alpha_rank(x: DenseTensor, alpha, rtol=1e-10):
    singular_values = dense_alpha_svd(x, alpha).singular_values
    if singular_values[0] == 0:
        return 0

    return int(np.sum(singular_values > rtol * singular_values[0]))


def _reduce(values, labels, son, son_dense):
    """
    Contract the axes of ``son``'s dims against its components
    """
    positions = [labels.index(dim) for dim in son]
    values = np.tensordot(
        values, son_dense, axes=(positions, list(range(1, len(son) + 1)))
    )
    labels = [label for label in labels if label not in son] + [son]

    return values, labels


def dense_tree_pca(x: DenseTensor, tree: DimensionTree, active: ActiveSet,
                   ranks=None, tol=None) -> TreeTensor:
    """
    Ideal leaves-to-root PCA with orthogonal projections onto the spans of
    the sons' principal components; reference for quasi-optimality
    """
    if (ranks is None) == (tol is None):
        raise RankError('Give exactly one of ranks and tol')

    if ranks is not None:
        ranks = dimtree.rank_tuple(tree, active, ranks)

    leaves, cores = {}, {}
    dense = {
        leaf: np.eye(x.shape[leaf[0] - 1])
        for leaf in tree.leaves if leaf not in active
    }

    for node in dimtree.nodes_bottom_up(tree, active) + [tree.root]:
        sons = tree.sons(node)
        values, labels = x.values, list(range(1, x.d + 1))

        for son in sons:
            if son in active:
                values, labels = _reduce(values, labels, son, dense[son])

        if sons:
            son_labels = [son if son in active else son[0] for son in sons]
        else:
            son_labels = [node[0]]

        son_axes = [labels.index(label) for label in son_labels]
        rest = [axis for axis in range(values.ndim) if axis not in son_axes]
        son_shape = tuple(values.shape[axis] for axis in son_axes)
        matrix = np.transpose(values, son_axes + rest).reshape(
            math.prod(son_shape), -1
        )

        if node == tree.root:
            cores[node] = matrix.reshape(son_shape)
            break

        left, singular_values, _ = np.linalg.svd(matrix, full_matrices=False)
        if ranks is not None:
            rank = min(ranks[node], singular_values.size)
        else:
            rank = max(1, truncation_rank(singular_values, tol))

        components = left[:, :rank].T

        if tree.is_leaf(node):
            leaves[node] = components
            dense[node] = components
        else:
            cores[node] = components.reshape((rank, ) + son_shape)
            dense[node] = _expand_core(cores[node], node, sons, dense)

    return TreeTensor(tree, active, x.spaces, leaves, cores, orthonormal=True)


def _array_entry(array):
    return {'shape': list(array.shape), 'data': array.ravel().tolist()}


def _array_value(entry):
    return np.asarray(entry['data'], dtype=float).reshape(entry['shape'])


def _parse_label(label):
    return dimtree.as_node(label.strip('{}').split(','))


def save_tree_tensor(tt: TreeTensor, path):
    document = {
        'format': STORAGE_FORMAT,
        'version': STORAGE_VERSION,
        'tree': dimtree.format_tree(tt.tree, tt.active),
        'spaces': [space.name for space in tt.spaces],
        'orthonormal': tt.orthonormal,
        'leaves': {
            node_label(node): _array_entry(value)
            for node, value in sorted(tt.leaves.items())
        },
        'cores': {
            node_label(node): _array_entry(value)
            for node, value in sorted(tt.cores.items())
        },
    }

    with open(path, 'w') as fid:
        json.dump(document, fid, indent=1)

    logger.debug('Saved %r to %s', tt, path)


def load_tree_tensor(path) -> TreeTensor:
    with open(path) as fid:
        document = json.load(fid)

    if document.get('format') != STORAGE_FORMAT:
        raise StructureError('%s is not a stored tree tensor' % path)

    if document.get('version') != STORAGE_VERSION:
        raise StructureError(
            'Unsupported tree tensor version %r' % document.get('version')
        )

    tree, active = dimtree.parse_tree(document['tree'])
    spaces = [parse_feature_space(name) for name in document['spaces']]

    return TreeTensor(
        tree, active, spaces,
        {_parse_label(k): _array_value(v) for k, v in document['leaves'].items()},
        {_parse_label(k): _array_value(v) for k, v in document['cores'].items()},
        orthonormal=document['orthonormal'],
    )
