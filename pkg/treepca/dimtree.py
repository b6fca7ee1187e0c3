"""
Dimension partition trees over D = {1, ..., d} and admissible active sets.

Nodes are sorted tuples of 1-based dimension indices. The sons of a node are
ordered by their smallest dimension; that order fixes the axis order of the
coefficient tensor stored at the node.
"""
import logging
import math
import numbers

from collections.abc import Mapping
from typing import Dict, Iterable, List, Optional, Tuple

from treepca.errors import RankError, StructureError
from treepca.utils import node_label

logger = logging.getLogger(__name__)

Node = Tuple[int, ...]

TREE_KINDS = ('tucker', 'tt', 'ttt', 'balanced', 'custom')


def as_node(dims) -> Node:
    if isinstance(dims, numbers.Integral):
        dims = (dims, )

    node = tuple(sorted(int(dim) for dim in dims))

    if not node:
        raise StructureError('Empty node', node=node)

    if len(set(node)) != len(node):
        raise StructureError(
            'Node %s repeats a dimension' % node_label(node), node=node
        )

    return node


class DimensionTree:
    def __init__(self, d, sons):
        """
        Build a tree from a mapping of every non-leaf node to its sons
        """
        if d < 1:
            raise StructureError('A tree needs at least one dimension')

        self.d = int(d)
        self.root = tuple(range(1, self.d + 1))

        requested = {
            as_node(node): [as_node(son) for son in children]
            for node, children in sons.items()
        }

        self._sons: Dict[Node, Tuple[Node, ...]] = {}
        self._parent: Dict[Node, Optional[Node]] = {self.root: None}
        self._level: Dict[Node, int] = {self.root: 0}

        pending = [self.root]
        while pending:
            node = pending.pop(0)
            children = sorted(requested.pop(node, []), key=lambda s: (s[0], s))

            self._check_partition(node, children)
            self._sons[node] = tuple(children)

            for son in children:
                self._parent[son] = node
                self._level[son] = self._level[node] + 1
                pending.append(son)

        if requested:
            orphan = sorted(requested)[0]
            raise StructureError(
                'Node %s is not reachable from the root' % node_label(orphan),
                node=orphan
            )

    def _check_partition(self, node, children):
        if not children:
            if len(node) > 1:
                raise StructureError(
                    'Leaf %s is not a singleton' % node_label(node), node=node
                )
            return

        if len(children) < 2:
            raise StructureError(
                'Node %s needs at least two sons' % node_label(node),
                node=node
            )

        seen = set()
        for son in children:
            if son in self._parent:
                raise StructureError(
                    'Node %s appears twice in the tree' % node_label(son),
                    node=son
                )

            if not set(son).issubset(node):
                raise StructureError(
                    'Son %s is not contained in %s' % (
                        node_label(son), node_label(node)),
                    node=son
                )

            if seen.intersection(son):
                raise StructureError(
                    'Son %s overlaps a sibling in %s' % (
                        node_label(son), node_label(node)),
                    node=son
                )

            seen.update(son)

        if seen != set(node):
            raise StructureError(
                'Sons of %s do not cover it' % node_label(node), node=node
            )

    def __contains__(self, node):
        return tuple(node) in self._sons

    def __len__(self):
        return len(self._sons)

    def __eq__(self, other):
        if not isinstance(other, DimensionTree):
            return False

        return self.d == other.d and self._sons == other._sons

    def __repr__(self):
        return '<DimensionTree d=%d nodes=%d depth=%d>' % (
            self.d, len(self), self.depth
        )

    @property
    def nodes(self) -> List[Node]:
        return sorted(self._sons, key=lambda n: (self._level[n], n[0], n))

    @property
    def leaves(self) -> List[Node]:
        return [(dim, ) for dim in range(1, self.d + 1)]

    @property
    def depth(self) -> int:
        return max(self._level.values())

    def sons(self, node) -> Tuple[Node, ...]:
        return self._sons[tuple(node)]

    def parent(self, node) -> Optional[Node]:
        return self._parent[tuple(node)]

    def level(self, node) -> int:
        return self._level[tuple(node)]

    def level_nodes(self, level) -> List[Node]:
        return [node for node in self.nodes if self._level[node] == level]

    def is_leaf(self, node) -> bool:
        return not self._sons[tuple(node)]


class ActiveSet:
    """
    Admissible set A of active nodes: the root is never active and every
    non-active node other than the root is a leaf.
    """

    def __init__(self, tree: DimensionTree, nodes: Iterable):
        self.tree = tree
        self.nodes = frozenset(as_node(node) for node in nodes)

        for node in sorted(self.nodes):
            if node not in tree:
                raise StructureError(
                    'Active node %s is not in the tree' % node_label(node),
                    node=node
                )

            if node == tree.root:
                raise StructureError('The root cannot be active', node=node)

            parent = tree.parent(node)
            if parent != tree.root and parent not in self.nodes:
                raise StructureError(
                    'Parent of active node %s is inactive' % node_label(node),
                    node=node
                )

        for node in tree.nodes:
            if node == tree.root or node in self.nodes:
                continue

            if not tree.is_leaf(node):
                raise StructureError(
                    'Interior node %s must be active' % node_label(node),
                    node=node
                )

    def __contains__(self, node):
        return tuple(node) in self.nodes

    def __iter__(self):
        return iter(node for node in self.tree.nodes if node in self.nodes)

    def __len__(self):
        return len(self.nodes)

    def __eq__(self, other):
        if isinstance(other, ActiveSet):
            return self.tree == other.tree and self.nodes == other.nodes

        return NotImplemented

    def __repr__(self):
        return '<ActiveSet %s>' % ' '.join(node_label(n) for n in self)

    @property
    def leaves(self) -> List[Node]:
        """
        Active leaves of the tree, sorted by dimension
        """
        return [leaf for leaf in self.tree.leaves if leaf in self.nodes]

    @property
    def interior(self) -> List[Node]:
        return [n for n in self if not self.tree.is_leaf(n)]


def _linear_sons(d):
    sons = {}
    for k in range(2, d + 1):
        sons[tuple(range(1, k + 1))] = [tuple(range(1, k)), (k, )]

    return sons


def _balanced_sons(node, sons):
    if len(node) == 1:
        return

    half = (len(node) + 1) // 2
    children = [node[:half], node[half:]]
    sons[node] = children

    for child in children:
        _balanced_sons(child, sons)


def _custom_sons(d, custom_spec):
    nodes = sorted({as_node(node) for node in custom_spec}, key=len)
    root = tuple(range(1, d + 1))

    if root not in nodes:
        raise StructureError('Custom tree is missing the root', node=root)

    for node in nodes:
        if node[0] < 1 or node[-1] > d:
            raise StructureError(
                'Node %s is outside {1..%d}' % (node_label(node), d),
                node=node
            )

    sons: Dict[Node, List[Node]] = {}
    for node in nodes:
        if node == root:
            continue

        # Smallest strict superset is the parent
        parents = [p for p in nodes if len(p) > len(node) and set(node) < set(p)]
        if not parents:
            raise StructureError(
                'Node %s has no parent' % node_label(node), node=node
            )

        sons.setdefault(min(parents, key=len), []).append(node)

    return sons


def build_tree(kind, d, custom_spec=None, active=None):
    """
    Dimension tree and default active set of a tree-based format.

    ``tucker`` activates all leaves, ``tt`` the nodes {1}, {1,2}, ...,
    {1,...,d-1}, ``ttt``, ``balanced`` and ``custom`` every non-root node.
    An explicit ``active`` overrides the default (e.g. degenerate Tucker).
    """
    if kind not in TREE_KINDS:
        raise StructureError('Unknown tree kind %r' % kind)

    if d < 2:
        raise StructureError('Tree formats need d >= 2, got %d' % d)

    if kind == 'custom':
        if custom_spec is None:
            raise StructureError('Custom trees need a node list')

        if isinstance(custom_spec, str):
            tree, default_active = parse_tree(custom_spec)
            if tree.d != d:
                raise StructureError(
                    'Custom tree has %d dimensions, expected %d' % (tree.d, d)
                )
        else:
            tree = DimensionTree(d, _custom_sons(d, custom_spec))
            default_active = ActiveSet(
                tree, [n for n in tree.nodes if n != tree.root]
            )
    else:
        if kind == 'tucker':
            sons = {tuple(range(1, d + 1)): [(k, ) for k in range(1, d + 1)]}
        elif kind in ('tt', 'ttt'):
            sons = _linear_sons(d)
        else:
            sons = {}
            _balanced_sons(tuple(range(1, d + 1)), sons)

        tree = DimensionTree(d, sons)

        if kind == 'tt':
            nodes = [tuple(range(1, k + 1)) for k in range(1, d)]
        elif kind == 'tucker':
            nodes = tree.leaves
        else:
            nodes = [n for n in tree.nodes if n != tree.root]

        default_active = ActiveSet(tree, nodes)

    if active is not None:
        default_active = ActiveSet(tree, active)

    logger.debug('Built %s tree over %d dimensions, %d active nodes',
                 kind, d, len(default_active))

    return tree, default_active


def nodes_bottom_up(tree: DimensionTree, active: ActiveSet) -> List[Node]:
    """
    Active nodes with every node after all of its active descendants:
    active leaves by dimension, then interior nodes deepest level first
    """
    interior = sorted(
        active.interior, key=lambda n: (-tree.level(n), n[0], n)
    )

    return active.leaves + interior


def active_leaves(tree: DimensionTree, active: ActiveSet) -> List[Node]:
    """
    Active nodes without active sons, in bottom-up order
    """
    return [
        node for node in nodes_bottom_up(tree, active)
        if not any(son in active for son in tree.sons(node))
    ]


def rank_tuple(tree: DimensionTree, active: ActiveSet, ranks) -> Dict[Node, int]:
    """
    Normalise ranks to a mapping keyed exactly by the active set.

    ``ranks`` is an integer (uniform ranks), a mapping keyed by nodes, or a
    sequence aligned with ``nodes_bottom_up(tree, active)``.
    """
    order = nodes_bottom_up(tree, active)

    if isinstance(ranks, Mapping):
        values = {as_node(node): rank for node, rank in ranks.items()}
    elif isinstance(ranks, numbers.Real):
        values = {node: ranks for node in order}
    else:
        ranks = list(ranks)
        if len(ranks) != len(order):
            raise RankError(
                'Expected %d ranks, got %d' % (len(order), len(ranks))
            )
        values = dict(zip(order, ranks))

    for node in order:
        if node not in values:
            raise RankError('Missing rank for node %s' % node_label(node))

    extra = set(values) - set(order)
    if extra:
        raise RankError(
            'Rank given for inactive node %s' % node_label(sorted(extra)[0])
        )

    result = {}
    for node in order:
        rank = values[node]
        if int(rank) != rank or rank < 1:
            raise RankError(
                'Rank of %s must be a positive integer, got %r' % (
                    node_label(node), rank)
            )
        result[node] = int(rank)

    return result


def leaf_dimensions(tree: DimensionTree, leaf_dims) -> Dict[Node, int]:
    """
    Normalise n to a mapping keyed by leaf nodes.

    ``leaf_dims`` is an integer, a sequence indexed by dimension, or a mapping
    keyed by leaf nodes or by dimensions.
    """
    if isinstance(leaf_dims, Mapping):
        values = {as_node(key): value for key, value in leaf_dims.items()}
    elif isinstance(leaf_dims, numbers.Integral):
        values = {leaf: leaf_dims for leaf in tree.leaves}
    else:
        leaf_dims = list(leaf_dims)
        if len(leaf_dims) != tree.d:
            raise StructureError(
                'Expected %d leaf dimensions, got %d' % (
                    tree.d, len(leaf_dims))
            )
        values = {leaf: n for leaf, n in zip(tree.leaves, leaf_dims)}

    for leaf in tree.leaves:
        if leaf not in values:
            raise StructureError(
                'Missing dimension for leaf %s' % node_label(leaf), node=leaf
            )

    return {leaf: int(values[leaf]) for leaf in tree.leaves}


def son_dimensions(tree, active, node, ranks, leaf_dims) -> List[int]:
    """
    Axis lengths of the coefficient tensor of ``node`` after its rank axis
    """
    return [
        ranks[son] if son in active else leaf_dims[son]
        for son in tree.sons(node)
    ]


def storage_complexity(tree: DimensionTree, active: ActiveSet, ranks,
                       leaf_dims) -> int:
    ranks = rank_tuple(tree, active, ranks)
    leaf_dims = leaf_dimensions(tree, leaf_dims)

    storage = 0
    for node in [tree.root] + active.interior:
        rank = 1 if node == tree.root else ranks[node]
        storage += rank * math.prod(
            son_dimensions(tree, active, node, ranks, leaf_dims)
        )

    for leaf in active.leaves:
        storage += ranks[leaf] * leaf_dims[leaf]

    return storage


def format_tree(tree: DimensionTree, active: ActiveSet) -> str:
    """
    Canonical text form: ``index {dims}[*] parent-index`` per node, the
    root first with parent ``-``
    """
    nodes = tree.nodes
    index = {node: i for i, node in enumerate(nodes)}

    lines = []
    for i, node in enumerate(nodes):
        parent = tree.parent(node)
        lines.append('%d %s%s %s' % (
            i,
            node_label(node),
            '*' if node in active else '',
            '-' if parent is None else index[parent],
        ))

    return '\n'.join(lines) + '\n'


def parse_tree(text):
    entries = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue

        try:
            index, label, parent = line.split()
            is_active = label.endswith('*')
            node = as_node(
                dim for dim in label.rstrip('*').strip('{}').split(',')
            )
        except ValueError:
            raise StructureError('Malformed tree line %d: %r' % (number, line))

        entries[int(index)] = (node, is_active, parent)

    roots = [node for node, _, parent in entries.values() if parent == '-']
    if len(roots) != 1:
        raise StructureError('A tree text needs exactly one root line')

    sons: Dict[Node, List[Node]] = {}
    for node, _, parent in entries.values():
        if parent == '-':
            continue

        if int(parent) not in entries:
            raise StructureError(
                'Node %s refers to a missing parent' % node_label(node),
                node=node
            )

        sons.setdefault(entries[int(parent)][0], []).append(node)

    tree = DimensionTree(len(roots[0]), sons)
    if roots[0] != tree.root:
        raise StructureError('Root line must hold every dimension')

    active = ActiveSet(
        tree, [node for node, is_active, _ in entries.values() if is_active]
    )

    return tree, active
