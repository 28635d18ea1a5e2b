"""Branches, branch decompositions, and branch decomposition trees (BDTs).

A branch is a monotone root-to-leaf-directed path that ends in a leaf; it is
stored as its two endpoints (start node, leaf node) since the connecting path
is unique in a tree. A branch decomposition partitions the tree's edges into
branches; it is represented compactly by a *continuation* map that picks, at
every non-leaf node, the child through which the incoming branch continues.
Every other child starts a new branch there.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError, SizeLimitError
from .trees import MergeTree, require_valid


@dataclass(frozen=True, order=True)
class Branch:
    """A root-to-leaf-directed path identified by its endpoints.

    ``low``/``high`` are the scalar values at the start node and the leaf;
    ``high - low`` is the branch persistence.
    """

    start: int
    leaf: int
    low: float
    high: float

    @property
    def persistence(self):
        return self.high - self.low

    @property
    def label(self):
        return (self.low, self.high)

    def vertex_sequence(self, tree: MergeTree):
        """Materialize the path start..leaf (root-to-leaf direction)."""
        seq = [self.leaf]
        v = self.leaf
        while v != self.start:
            v = int(tree.parent[v])
            if v == -1:
                raise PreconditionError(
                    f"node {self.start} is not an ancestor of leaf {self.leaf}"
                )
            seq.append(v)
        seq.reverse()
        return seq

    def edges(self, tree: MergeTree):
        seq = self.vertex_sequence(tree)
        return [(seq[i + 1], seq[i]) for i in range(len(seq) - 1)]


def _branch(tree: MergeTree, start: int, leaf: int) -> Branch:
    return Branch(start, leaf, float(tree.values[start]), float(tree.values[leaf]))


class BranchDecomposition:
    """A set of branches whose edge sets partition the tree's edges."""

    __slots__ = ("tree", "continuation", "branches", "main", "_by_leaf")

    def __init__(self, tree: MergeTree, continuation: dict[int, int]):
        self.tree = tree
        self.continuation = dict(continuation)
        for v in range(len(tree)):
            if tree.is_leaf(v):
                continue
            c = self.continuation.get(v)
            if c is None or int(tree.parent[c]) != v:
                raise PreconditionError(f"continuation missing or invalid at node {v}")
        by_leaf = {}
        branches = []
        for v in range(len(tree)):
            if tree.is_leaf(v):
                continue
            for c in tree.children[v]:
                if v != tree.root and c == self.continuation[v]:
                    continue  # the incoming branch passes through, no new start
                leaf = self._tip(c)
                b = _branch(tree, v, leaf)
                branches.append(b)
                by_leaf[leaf] = b
        # two-node tree: the loop above only visits the root
        self.branches = tuple(sorted(branches))
        self._by_leaf = by_leaf
        self.main = by_leaf[self._tip(tree.root)]

    def _tip(self, v: int) -> int:
        while not self.tree.is_leaf(v):
            v = self.continuation[v]
        return v

    def __len__(self):
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def __eq__(self, other):
        if not isinstance(other, BranchDecomposition):
            return NotImplemented
        return self.tree == other.tree and self.branches == other.branches

    def __hash__(self):
        return hash((self.tree, self.branches))

    def __repr__(self):
        labels = ", ".join(f"({b.low:g},{b.high:g})" for b in self.branches)
        return f"BranchDecomposition[{labels}]"

    def branch_of_leaf(self, leaf: int) -> Branch:
        return self._by_leaf[leaf]

    def branch_through(self, v: int) -> Branch:
        """The branch whose path contains ``v`` as a non-start vertex.

        For the root this is the main branch (the root is only ever a start
        vertex, but it belongs to the main branch's path).
        """
        if v == self.tree.root:
            return self.main
        return self._by_leaf[self._tip(v)]

    def parent_branch(self, b: Branch) -> Branch | None:
        if b == self.main:
            return None
        return self.branch_through(b.start)

    @classmethod
    def from_branches(cls, tree: MergeTree, branches) -> "BranchDecomposition":
        """Build from an explicit branch set, checking the edge partition."""
        used = set()
        cont: dict[int, int] = {}
        for b in branches:
            seq = b.vertex_sequence(tree)
            for a, c in zip(seq, seq[1:]):
                if (c, a) in used:
                    raise PreconditionError(f"edge ({c},{a}) covered twice")
                used.add((c, a))
                if a == b.start and a != tree.root:
                    # a new branch starting at an interior vertex of its
                    # parent branch does not define a's continuation
                    continue
                if a in cont and cont[a] != c:
                    raise PreconditionError(f"conflicting continuations at node {a}")
                cont[a] = c
        if len(used) != len(tree) - 1:
            raise PreconditionError(
                f"branch edges cover {len(used)} of {len(tree) - 1} tree edges"
            )
        return cls(tree, cont)


def elder_rule_decomposition(tree: MergeTree) -> BranchDecomposition:
    """The canonical decomposition preferring the most persistent branches.

    At every non-leaf node the incoming branch continues toward the child
    whose subtree contains the highest-valued leaf; value ties are broken by
    the smallest child node-id.
    """
    require_valid(tree)
    n = len(tree)
    submax = [0.0] * n
    order = tree.subtree_nodes(tree.root)
    for v in reversed(order):
        if tree.is_leaf(v):
            submax[v] = float(tree.values[v])
        else:
            submax[v] = max(submax[c] for c in tree.children[v])
    continuation = {}
    for v in range(n):
        if tree.is_leaf(v):
            continue
        continuation[v] = min(tree.children[v], key=lambda c: (-submax[c], c))
    return BranchDecomposition(tree, continuation)


def count_branch_decompositions(tree: MergeTree) -> int:
    out = 1
    for v in range(len(tree)):
        if not tree.is_leaf(v):
            out *= len(tree.children[v])
    return out


def enumerate_branch_decompositions(tree: MergeTree, max_leaves: int = 10):
    """Every branch decomposition of ``tree``. Exponential; small trees only."""
    require_valid(tree)
    n_leaves = len(tree.leaves)
    if n_leaves > max_leaves:
        raise SizeLimitError(
            f"tree has {n_leaves} leaves, enumeration capped at {max_leaves}"
        )
    inner = [v for v in range(len(tree)) if not tree.is_leaf(v)]
    out = []

    def rec(i, cont):
        if i == len(inner):
            out.append(BranchDecomposition(tree, dict(cont)))
            return
        v = inner[i]
        for c in tree.children[v]:
            cont[v] = c
            rec(i + 1, cont)
        del cont[v]

    rec(0, {})
    return out


@dataclass(frozen=True)
class BranchDecompTree:
    """Tree over the branches of a decomposition under the parent relation."""

    branches: tuple[Branch, ...]
    parent: tuple[int, ...]  # index into branches, -1 for the main branch
    root: int

    @property
    def children(self):
        kids = [[] for _ in self.branches]
        for i, p in enumerate(self.parent):
            if p >= 0:
                kids[p].append(i)
        return tuple(tuple(k) for k in kids)

    def __len__(self):
        return len(self.branches)


def build_bdt(decomposition: BranchDecomposition) -> BranchDecompTree:
    branches = decomposition.branches
    index = {b: i for i, b in enumerate(branches)}
    parent = []
    root = None
    for i, b in enumerate(branches):
        pb = decomposition.parent_branch(b)
        if pb is None:
            parent.append(-1)
            root = i
        else:
            parent.append(index[pb])
    return BranchDecompTree(branches=branches, parent=tuple(parent), root=root)


@dataclass(frozen=True)
class TreePart:
    """One side of an induced split: a materialized tree, its decomposition,
    and the map from its dense node ids back to the original tree's ids."""

    tree: MergeTree
    decomposition: BranchDecomposition
    to_original: tuple[int, ...]

    def original_branches(self):
        m = self.to_original
        return tuple(
            sorted(
                Branch(m[b.start], m[b.leaf], b.low, b.high)
                for b in self.decomposition.branches
            )
        )


def induced_decomposition(
    decomposition: BranchDecomposition, root_edge: tuple[int, int]
):
    """Split a decomposition along a branch's first edge.

    ``root_edge`` is ``(child, parent)``; a branch of the decomposition must
    start with exactly this edge. Returns ``(sub, rest)`` where ``sub`` covers
    the subtree rooted in the edge and ``rest`` covers the remainder (``None``
    when the remainder is empty). If the remainder would leave the parent as
    an inner node with a single child, the parent is spliced out; branch
    endpoints are unaffected by the splice.
    """
    tree = decomposition.tree
    c, p = root_edge
    if int(tree.parent[c]) != p:
        raise PreconditionError(f"({c},{p}) is not an edge of the tree")
    starts_here = p == tree.root or decomposition.continuation[p] != c
    if not starts_here:
        raise PreconditionError(f"no branch of the decomposition starts at edge ({c},{p})")

    sub_nodes = [p] + tree.subtree_nodes(c)
    sub = _materialize(tree, decomposition, sub_nodes, new_root=p)

    if p == tree.root:
        return sub, None

    inside = set(sub_nodes) - {p}
    rest_nodes = [v for v in tree.subtree_nodes(tree.root) if v not in inside]
    splice = len(tree.children[p]) == 2
    if splice:
        rest_nodes = [v for v in rest_nodes if v != p]
    rest = _materialize(
        tree, decomposition, rest_nodes, new_root=tree.root, spliced=p if splice else None
    )
    return sub, rest


def _materialize(tree, decomposition, nodes, new_root, spliced=None):
    index = {v: i for i, v in enumerate(nodes)}
    values = [float(tree.values[v]) for v in nodes]
    parent = []
    for v in nodes:
        if v == new_root:
            parent.append(-1)
            continue
        p = int(tree.parent[v])
        if p == spliced:
            p = int(tree.parent[p])
        parent.append(index[p])
    part_tree = require_valid(MergeTree(values, parent))

    inside = set(nodes)
    kept = []
    for b in decomposition.branches:
        if b.leaf in inside and b.start in inside:
            kept.append(Branch(index[b.start], index[b.leaf], b.low, b.high))
    part_dec = BranchDecomposition.from_branches(part_tree, kept)
    return TreePart(tree=part_tree, decomposition=part_dec, to_original=tuple(nodes))
