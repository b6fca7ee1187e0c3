import math

import numpy as np
import pytest

from treepca import dimtree
from treepca.bases import Measure1D, default_space
from treepca.tnet import TreeTensor


def make_tree_tensor(kind='ttt', d=4, n=4, rank=2, seed=0, active=None,
                     measure=None):
    """
    Random TreeTensor with orthonormal components
    """
    tree, active = dimtree.build_tree(kind, d, active=active)
    measure = measure or Measure1D.uniform()
    spaces = [default_space(measure, n - 1) for _ in range(d)]
    leaf_dims = dimtree.leaf_dimensions(tree, n)
    ranks = dimtree.rank_tuple(tree, active, rank)

    rng = np.random.default_rng(seed)

    leaves, cores = {}, {}
    for node in dimtree.nodes_bottom_up(tree, active):
        if tree.is_leaf(node):
            shape = (n, )
        else:
            shape = tuple(dimtree.son_dimensions(tree, active, node, ranks, leaf_dims))

        q, _ = np.linalg.qr(rng.standard_normal((math.prod(shape), ranks[node])))
        components = q.T.reshape((ranks[node], ) + shape)

        if tree.is_leaf(node):
            leaves[node] = components
        else:
            cores[node] = components

    root_shape = dimtree.son_dimensions(tree, active, tree.root, ranks, leaf_dims)
    cores[tree.root] = rng.standard_normal(root_shape)

    return TreeTensor(tree, active, spaces, leaves, cores, orthonormal=True)


@pytest.fixture(scope='function')
def tree_tensor_generator():
    return make_tree_tensor


@pytest.fixture(scope='function')
def output_directory(tmpdir):
    return str(tmpdir.join('results'))
