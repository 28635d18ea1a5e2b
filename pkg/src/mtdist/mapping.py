"""Branch-mapping distance between merge trees.

The distance is the minimum aggregated cost over all branch mappings -- by
default also minimized over all branch decompositions of both trees ("free"
mode), or restricted to one given decomposition per tree ("fixed" mode).

The dynamic program works on states ``(n1, p1, n2, p2)``: the current nodes
in both trees plus the start vertices of the branches currently being
tracked. Because the base costs are pure branch distances, only the start
*values* matter, so for every node pair ``(n1, n2)`` the costs over all
``(p1, p2)`` combinations form a small 2-d table indexed by the ancestors of
``n1`` and ``n2``. Tables are filled bottom-up over node pairs in post-order
and combined with numpy, which keeps large instances (hundreds of nodes)
fast. At an inner-inner state the options are, in this fixed order:

1. continue tree 1's branch through one child, deleting the sibling
   subtrees, leaving tree 2 untouched (one option per child);
2. symmetrically for tree 2;
3. pick the continuation child in both trees and optimally match the
   remaining children against each other, unmatched ones being deleted or
   inserted wholly (one option per continuation pair).

The first minimum wins, which makes reported mappings reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .branches import Branch, BranchDecomposition
from .errors import PreconditionError
from .matching import min_cost_matching as _assignment
from .metrics import BaseMetric, aggregate, finalize
from .trees import MergeTree, require_valid


@dataclass(frozen=True)
class MemoStats:
    """Size of the DP state space actually materialized.

    ``keys`` counts the (n1, p1, n2, p2) states of the tree-vs-tree tables;
    the delete/insert-against-empty subproblems are separate (n, p) tables
    counted in ``null_keys``. ``bound`` is |T1| * depth(T1) * |T2| * depth(T2).
    """

    keys: int
    null_keys: int
    bound: int


@dataclass(frozen=True)
class MappingReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class BranchMapping:
    """A validated-by-construction branch mapping with its edit costs."""

    tree1: MergeTree | None
    tree2: MergeTree | None
    decomposition1: BranchDecomposition | None
    decomposition2: BranchDecomposition | None
    pairs: tuple[tuple[Branch, Branch], ...]
    pair_costs: tuple[float, ...]
    deletions: tuple[Branch, ...]
    insertions: tuple[Branch, ...]
    total_cost: float
    metric: BaseMetric
    mode: str
    stats: MemoStats

    def edit_costs(self):
        """Base costs of every edit operation (pairs, deletions, insertions)."""
        out = list(self.pair_costs)
        out.extend(self.metric.deletion(b.low, b.high) for b in self.deletions)
        out.extend(self.metric.deletion(b.low, b.high) for b in self.insertions)
        return out

    def to_json_dict(self):
        return {
            "metric": self.metric.kind,
            "mode": self.mode,
            "totalCost": round(self.total_cost, 9),
            "pairs": [
                {
                    "t1Start": a.start,
                    "t1Leaf": a.leaf,
                    "t2Start": b.start,
                    "t2Leaf": b.leaf,
                    "cost": round(c, 9),
                }
                for (a, b), c in zip(self.pairs, self.pair_costs)
            ],
            "deletions": [
                {"start": b.start, "leaf": b.leaf, "cost": round(self.metric.deletion(b.low, b.high), 9)}
                for b in self.deletions
            ],
            "insertions": [
                {"start": b.start, "leaf": b.leaf, "cost": round(self.metric.deletion(b.low, b.high), 9)}
                for b in self.insertions
            ],
        }


# ---------------------------------------------------------------------------
# per-tree precomputation
# ---------------------------------------------------------------------------

class _Side:
    __slots__ = ("tree", "values", "post", "anc", "anc_low", "children", "is_leaf", "entry")

    def __init__(self, tree: MergeTree):
        self.tree = tree
        self.values = tree.values
        self.children = tree.children
        self.is_leaf = [not c for c in tree.children]
        root = tree.root
        if len(tree.children[root]) != 1:
            raise PreconditionError("root must have exactly one child")
        self.entry = tree.children[root][0]
        # iterative post-order over non-root nodes, children before parents
        post = []
        stack = [(self.entry, False)]
        while stack:
            v, expanded = stack.pop()
            if expanded:
                post.append(v)
                continue
            stack.append((v, True))
            for c in reversed(tree.children[v]):
                stack.append((c, False))
        self.post = post
        anc = [None] * len(tree)
        anc[root] = []
        order = tree.subtree_nodes(root)
        for v in order:
            if v == root:
                continue
            p = int(tree.parent[v])
            anc[v] = anc[p] + [p]
        self.anc = [np.array(a, dtype=np.int64) if a is not None else None for a in anc]
        self.anc_low = [
            tree.values[a] if a is not None and len(a) else np.empty(0) for a in self.anc
        ]


# ---------------------------------------------------------------------------
# free mode: minimize over all branch decompositions
# ---------------------------------------------------------------------------

def _delete_tables(side: _Side, metric: BaseMetric, squared: bool):
    """D[v][i] = cheapest deletion of the subtree hanging at v, with the
    branch through v starting at v's i-th ancestor."""
    n = len(side.tree)
    D = [None] * n
    K = [None] * n
    for v in side.post:
        lows = side.anc_low[v]
        if side.is_leaf[v]:
            d = metric.deletion_vec(lows, float(side.values[v]))
            if squared:
                d = d * d
            D[v] = d
        else:
            cs = side.children[v]
            tips = [D[c][-1] for c in cs]
            tot = sum(tips)
            opts = np.stack([D[c][:-1] + (tot - tips[i]) for i, c in enumerate(cs)])
            K[v] = np.argmin(opts, axis=0)
            D[v] = np.min(opts, axis=0)
    return D, K


def _free_tables(s1: _Side, s2: _Side, metric: BaseMetric, squared: bool):
    D1, KD1 = _delete_tables(s1, metric, squared)
    D2, KD2 = _delete_tables(s2, metric, squared)
    n1, n2 = len(s1.tree), len(s2.tree)
    T = [[None] * n2 for _ in range(n1)]
    K = [[None] * n2 for _ in range(n1)]
    for v in s1.post:
        v_leaf = s1.is_leaf[v]
        cs = s1.children[v]
        la1 = s1.anc_low[v]
        h1 = float(s1.values[v])
        if not v_leaf:
            dtip = [D1[c][-1] for c in cs]
            dtot = sum(dtip)
        for w in s2.post:
            w_leaf = s2.is_leaf[w]
            ds = s2.children[w]
            la2 = s2.anc_low[w]
            h2 = float(s2.values[w])
            if v_leaf and w_leaf:
                G = metric.pair_grid(la1, h1, la2, h2)
                if squared:
                    G = G * G
                T[v][w] = G
                continue
            if not w_leaf:
                itip = [D2[d][-1] for d in ds]
                itot = sum(itip)
            opts = []
            if v_leaf:
                for j, d in enumerate(ds):
                    opts.append(T[v][d][:, :-1] + (itot - itip[j]))
            elif w_leaf:
                for i, c in enumerate(cs):
                    opts.append(T[c][w][:-1, :] + (dtot - dtip[i]))
            else:
                for i, c in enumerate(cs):
                    opts.append(T[c][w][:-1, :] + (dtot - dtip[i]))
                for j, d in enumerate(ds):
                    opts.append(T[v][d][:, :-1] + (itot - itip[j]))
                for i, c in enumerate(cs):
                    rest_c = [x for x in cs if x != c]
                    for j, d in enumerate(ds):
                        rest_d = [y for y in ds if y != d]
                        P = [[T[cc][dd][-1, -1] for dd in rest_d] for cc in rest_c]
                        side_cost, _ = _assignment(
                            P, [D1[cc][-1] for cc in rest_c], [D2[dd][-1] for dd in rest_d]
                        )
                        opts.append(T[c][d][:-1, :-1] + side_cost)
            stack = np.stack(opts)
            K[v][w] = np.argmin(stack, axis=0)
            T[v][w] = np.min(stack, axis=0)
    return T, K, D1, KD1, D2, KD2


def _free_reconstruct(s1, s2, T, K, D1, KD1, D2, KD2, metric):
    pairs = []
    pair_costs = []
    deletions = []
    insertions = []

    def emit_del(v, pi):
        if s1.is_leaf[v]:
            start = int(s1.anc[v][pi])
            deletions.append(Branch(start, v, float(s1.values[start]), float(s1.values[v])))
            return
        cs = s1.children[v]
        k = int(KD1[v][pi])
        emit_del(cs[k], pi)
        for i, c in enumerate(cs):
            if i != k:
                emit_del(c, len(s1.anc[c]) - 1)

    def emit_ins(w, pj):
        if s2.is_leaf[w]:
            start = int(s2.anc[w][pj])
            insertions.append(Branch(start, w, float(s2.values[start]), float(s2.values[w])))
            return
        ds = s2.children[w]
        k = int(KD2[w][pj])
        emit_ins(ds[k], pj)
        for j, d in enumerate(ds):
            if j != k:
                emit_ins(d, len(s2.anc[d]) - 1)

    def walk(v, pi, w, pj):
        v_leaf = s1.is_leaf[v]
        w_leaf = s2.is_leaf[w]
        if v_leaf and w_leaf:
            sa = int(s1.anc[v][pi])
            sb = int(s2.anc[w][pj])
            a = Branch(sa, v, float(s1.values[sa]), float(s1.values[v]))
            b = Branch(sb, w, float(s2.values[sb]), float(s2.values[w]))
            pairs.append((a, b))
            pair_costs.append(metric.pair(a.low, a.high, b.low, b.high))
            return
        k = int(K[v][w][pi, pj])
        cs = s1.children[v]
        ds = s2.children[w]
        if v_leaf:
            d = ds[k]
            for j, dd in enumerate(ds):
                if j != k:
                    emit_ins(dd, len(s2.anc[dd]) - 1)
            walk(v, pi, d, pj)
            return
        if w_leaf:
            c = cs[k]
            for i, cc in enumerate(cs):
                if i != k:
                    emit_del(cc, len(s1.anc[cc]) - 1)
            walk(c, pi, w, pj)
            return
        nc, nd = len(cs), len(ds)
        if k < nc:
            c = cs[k]
            for i, cc in enumerate(cs):
                if i != k:
                    emit_del(cc, len(s1.anc[cc]) - 1)
            walk(c, pi, w, pj)
            return
        if k < nc + nd:
            d = ds[k - nc]
            for j, dd in enumerate(ds):
                if j != k - nc:
                    emit_ins(dd, len(s2.anc[dd]) - 1)
            walk(v, pi, d, pj)
            return
        k -= nc + nd
        i, j = divmod(k, nd)
        c, d = cs[i], ds[j]
        rest_c = [x for x in cs if x != c]
        rest_d = [y for y in ds if y != d]
        P = [[T[cc][dd][-1, -1] for dd in rest_d] for cc in rest_c]
        _, matched = _assignment(
            P,
            [D1[cc][-1] for cc in rest_c],
            [D2[dd][-1] for dd in rest_d],
            want_pairs=True,
        )
        hit_c = set()
        hit_d = set()
        for ii, jj in matched:
            hit_c.add(ii)
            hit_d.add(jj)
            walk(rest_c[ii], len(s1.anc[rest_c[ii]]) - 1, rest_d[jj], len(s2.anc[rest_d[jj]]) - 1)
        for ii, cc in enumerate(rest_c):
            if ii not in hit_c:
                emit_del(cc, len(s1.anc[cc]) - 1)
        for jj, dd in enumerate(rest_d):
            if jj not in hit_d:
                emit_ins(dd, len(s2.anc[dd]) - 1)
        walk(c, pi, d, pj)

    walk(s1.entry, 0, s2.entry, 0)
    return pairs, pair_costs, deletions, insertions


# ---------------------------------------------------------------------------
# fixed mode: both decompositions given, so branch starts are determined and
# the state space collapses to node pairs
# ---------------------------------------------------------------------------

class _FixedSide:
    __slots__ = ("side", "dec", "cont", "low", "W", "inner_sides")

    def __init__(self, side: _Side, dec: BranchDecomposition, metric, squared):
        self.side = side
        self.dec = dec
        tree = side.tree
        self.cont = dec.continuation
        self.low = [0.0] * len(tree)
        for v in side.post:
            self.low[v] = float(dec.branch_through(v).low)
        # W[v]: cost of deleting every branch whose leaf lies under v
        self.W = [0.0] * len(tree)
        for v in side.post:
            if side.is_leaf[v]:
                b = dec.branch_of_leaf(v)
                c = metric.deletion(b.low, b.high)
                self.W[v] = c * c if squared else c
            else:
                self.W[v] = sum(self.W[c] for c in side.children[v])

    def branches_under(self, v):
        """All decomposition branches whose leaf lies in the subtree at v."""
        inside = set(self.side.tree.subtree_nodes(v))
        return [b for b in self.dec.branches if b.leaf in inside]


def _fixed_tables(f1: _FixedSide, f2: _FixedSide, metric, squared):
    s1, s2 = f1.side, f2.side
    n1, n2 = len(s1.tree), len(s2.tree)
    F = [[0.0] * n2 for _ in range(n1)]
    K = [[0] * n2 for _ in range(n1)]
    for v in s1.post:
        v_leaf = s1.is_leaf[v]
        cs = s1.children[v]
        if not v_leaf:
            c_main = f1.cont[v]
            c_side = [c for c in cs if c != c_main]
            del_sides = sum(f1.W[c] for c in c_side)
        for w in s2.post:
            w_leaf = s2.is_leaf[w]
            ds = s2.children[w]
            if not w_leaf:
                d_main = f2.cont[w]
                d_side = [d for d in ds if d != d_main]
                ins_sides = sum(f2.W[d] for d in d_side)
            if v_leaf and w_leaf:
                c = metric.pair(f1.low[v], float(s1.values[v]), f2.low[w], float(s2.values[w]))
                F[v][w] = c * c if squared else c
                continue
            if v_leaf:
                F[v][w] = F[v][d_main] + ins_sides
                K[v][w] = 0
                continue
            if w_leaf:
                F[v][w] = F[c_main][w] + del_sides
                K[v][w] = 0
                continue
            P = [[F[cc][dd] for dd in d_side] for cc in c_side]
            side_cost, _ = _assignment(P, [f1.W[cc] for cc in c_side], [f2.W[dd] for dd in d_side])
            opts = (
                F[c_main][w] + del_sides,
                F[v][d_main] + ins_sides,
                F[c_main][d_main] + side_cost,
            )
            k = min(range(3), key=lambda t: opts[t])
            K[v][w] = k
            F[v][w] = opts[k]
    return F, K


def _fixed_reconstruct(f1, f2, F, K, metric):
    s1, s2 = f1.side, f2.side
    pairs = []
    pair_costs = []
    deletions = []
    insertions = []

    def walk(v, w):
        v_leaf = s1.is_leaf[v]
        w_leaf = s2.is_leaf[w]
        if v_leaf and w_leaf:
            a = f1.dec.branch_of_leaf(v)
            b = f2.dec.branch_of_leaf(w)
            pairs.append((a, b))
            pair_costs.append(metric.pair(a.low, a.high, b.low, b.high))
            return
        cs = s1.children[v]
        ds = s2.children[w]
        if v_leaf:
            d_main = f2.cont[w]
            for d in ds:
                if d != d_main:
                    insertions.extend(f2.branches_under(d))
            walk(v, d_main)
            return
        if w_leaf:
            c_main = f1.cont[v]
            for c in cs:
                if c != c_main:
                    deletions.extend(f1.branches_under(c))
            walk(c_main, w)
            return
        c_main = f1.cont[v]
        d_main = f2.cont[w]
        c_side = [c for c in cs if c != c_main]
        d_side = [d for d in ds if d != d_main]
        k = K[v][w]
        if k == 0:
            for c in c_side:
                deletions.extend(f1.branches_under(c))
            walk(c_main, w)
            return
        if k == 1:
            for d in d_side:
                insertions.extend(f2.branches_under(d))
            walk(v, d_main)
            return
        P = [[F[cc][dd] for dd in d_side] for cc in c_side]
        _, matched = _assignment(
            P, [f1.W[cc] for cc in c_side], [f2.W[dd] for dd in d_side], want_pairs=True
        )
        hit_c = set()
        hit_d = set()
        for ii, jj in matched:
            hit_c.add(ii)
            hit_d.add(jj)
            walk(c_side[ii], d_side[jj])
        for ii, cc in enumerate(c_side):
            if ii not in hit_c:
                deletions.extend(f1.branches_under(cc))
        for jj, dd in enumerate(d_side):
            if jj not in hit_d:
                insertions.extend(f2.branches_under(dd))
        walk(c_main, d_main)

    walk(s1.entry, s2.entry)
    return pairs, pair_costs, deletions, insertions


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def branch_mapping_distance(
    tree1: MergeTree | None,
    tree2: MergeTree | None,
    metric: BaseMetric,
    mode: str = "sum",
    fixed: tuple[BranchDecomposition, BranchDecomposition] | None = None,
):
    """Distance and an optimal branch mapping between two merge trees.

    Either tree may be ``None`` (the empty tree); the mapping then consists
    of deletions or insertions only. With ``fixed=(B1, B2)`` the search is
    restricted to mappings between exactly those two decompositions.
    """
    squared = mode == "l2"
    if mode not in ("sum", "l2"):
        raise ValueError(f"unknown aggregation mode {mode!r}")
    if tree1 is None and tree2 is None:
        stats = MemoStats(keys=0, null_keys=0, bound=0)
        return 0.0, BranchMapping(
            None, None, None, None, (), (), (), (), 0.0, metric, mode, stats
        )
    if fixed is not None:
        return _distance_fixed(tree1, tree2, metric, mode, squared, fixed)
    return _distance_free(tree1, tree2, metric, mode, squared)


def _one_sided(tree, metric, mode, squared, deleting, fixed_dec=None):
    side = _Side(require_valid(tree))
    if fixed_dec is not None:
        branches = fixed_dec.branches
        total = sum(
            (metric.deletion(b.low, b.high) ** 2 if squared else metric.deletion(b.low, b.high))
            for b in branches
        )
        dec = fixed_dec
    else:
        D, KD = _delete_tables(side, metric, squared)
        total = float(D[side.entry][0])
        out = []

        def emit(v, pi):
            if side.is_leaf[v]:
                start = int(side.anc[v][pi])
                out.append(Branch(start, v, float(side.values[start]), float(side.values[v])))
                return
            cs = side.children[v]
            k = int(KD[v][pi])
            emit(cs[k], pi)
            for i, c in enumerate(cs):
                if i != k:
                    emit(c, len(side.anc[c]) - 1)

        emit(side.entry, 0)
        dec = BranchDecomposition.from_branches(tree, out)
        branches = dec.branches
    null_keys = sum(len(side.anc[v]) for v in side.post)
    stats = MemoStats(keys=0, null_keys=null_keys, bound=0)
    distance = finalize(total, mode)
    branches = tuple(sorted(branches))
    mapping = BranchMapping(
        tree1=tree if deleting else None,
        tree2=None if deleting else tree,
        decomposition1=dec if deleting else None,
        decomposition2=None if deleting else dec,
        pairs=(),
        pair_costs=(),
        deletions=branches if deleting else (),
        insertions=() if deleting else branches,
        total_cost=distance,
        metric=metric,
        mode=mode,
        stats=stats,
    )
    return distance, mapping


def _distance_free(tree1, tree2, metric, mode, squared):
    if tree2 is None:
        return _one_sided(tree1, metric, mode, squared, deleting=True)
    if tree1 is None:
        return _one_sided(tree2, metric, mode, squared, deleting=False)
    s1 = _Side(require_valid(tree1))
    s2 = _Side(require_valid(tree2))
    T, K, D1, KD1, D2, KD2 = _free_tables(s1, s2, metric, squared)
    total = float(T[s1.entry][s2.entry][0, 0])
    pairs, pair_costs, dels, inss = _free_reconstruct(
        s1, s2, T, K, D1, KD1, D2, KD2, metric
    )
    dec1 = BranchDecomposition.from_branches(tree1, [a for a, _ in pairs] + dels)
    dec2 = BranchDecomposition.from_branches(tree2, [b for _, b in pairs] + inss)
    keys = sum(len(s1.anc[v]) for v in s1.post) * sum(len(s2.anc[w]) for w in s2.post)
    null_keys = sum(len(s1.anc[v]) for v in s1.post) + sum(len(s2.anc[w]) for w in s2.post)
    bound = len(tree1) * tree1.depth * len(tree2) * tree2.depth
    stats = MemoStats(keys=keys, null_keys=null_keys, bound=bound)
    distance = finalize(total, mode)
    mapping = BranchMapping(
        tree1=tree1,
        tree2=tree2,
        decomposition1=dec1,
        decomposition2=dec2,
        pairs=tuple(pairs),
        pair_costs=tuple(pair_costs),
        deletions=tuple(sorted(dels)),
        insertions=tuple(sorted(inss)),
        total_cost=distance,
        metric=metric,
        mode=mode,
        stats=stats,
    )
    return distance, mapping


def _distance_fixed(tree1, tree2, metric, mode, squared, fixed):
    dec1, dec2 = fixed
    if tree2 is None:
        if dec1 is None or dec1.tree != tree1:
            raise PreconditionError("fixed decomposition does not belong to tree 1")
        return _one_sided(tree1, metric, mode, squared, deleting=True, fixed_dec=dec1)
    if tree1 is None:
        if dec2 is None or dec2.tree != tree2:
            raise PreconditionError("fixed decomposition does not belong to tree 2")
        return _one_sided(tree2, metric, mode, squared, deleting=False, fixed_dec=dec2)
    if dec1 is None or dec1.tree != tree1:
        raise PreconditionError("fixed decomposition does not belong to tree 1")
    if dec2 is None or dec2.tree != tree2:
        raise PreconditionError("fixed decomposition does not belong to tree 2")
    s1 = _Side(require_valid(tree1))
    s2 = _Side(require_valid(tree2))
    f1 = _FixedSide(s1, dec1, metric, squared)
    f2 = _FixedSide(s2, dec2, metric, squared)
    F, K = _fixed_tables(f1, f2, metric, squared)
    total = float(F[s1.entry][s2.entry])
    pairs, pair_costs, dels, inss = _fixed_reconstruct(f1, f2, F, K, metric)
    keys = len(s1.post) * len(s2.post)
    bound = len(tree1) * tree1.depth * len(tree2) * tree2.depth
    stats = MemoStats(keys=keys, null_keys=len(s1.post) + len(s2.post), bound=bound)
    distance = finalize(total, mode)
    mapping = BranchMapping(
        tree1=tree1,
        tree2=tree2,
        decomposition1=dec1,
        decomposition2=dec2,
        pairs=tuple(pairs),
        pair_costs=tuple(pair_costs),
        deletions=tuple(sorted(dels)),
        insertions=tuple(sorted(inss)),
        total_cost=distance,
        metric=metric,
        mode=mode,
        stats=stats,
    )
    return distance, mapping


def delete_tree_cost(tree: MergeTree | None, metric: BaseMetric, mode: str = "sum") -> float:
    """Cost of mapping the whole tree to the empty tree (cheapest decomposition)."""
    if tree is None:
        return 0.0
    distance, _ = branch_mapping_distance(tree, None, metric, mode)
    return distance


# ---------------------------------------------------------------------------
# validation and induced node mappings
# ---------------------------------------------------------------------------

def _is_weak_descendant(tree: MergeTree, u: int, v: int) -> bool:
    """True when v lies on the root path of u (including u == v)."""
    while u != -1:
        if u == v:
            return True
        u = int(tree.parent[u])
    return False


def validate_branch_mapping(mapping: BranchMapping) -> MappingReport:
    """Check the four mapping conditions and the cost equation.

    Order preservation is checked both ways: start vertices of matched
    branches must compare identically (equal to equal, descendant to
    descendant) on both sides, which is the reading the recursion computes.
    """
    bad = []
    m = mapping
    if m.tree1 is None or m.tree2 is None:
        covered = set(m.deletions) | set(m.insertions)
        expect = set()
        if m.decomposition1 is not None:
            expect |= set(m.decomposition1.branches)
        if m.decomposition2 is not None:
            expect |= set(m.decomposition2.branches)
        if covered != expect or m.pairs:
            bad.append("one-sided mapping must delete or insert exactly all branches")
        costs = m.edit_costs()
        if abs(aggregate(costs, m.mode) - m.total_cost) > 1e-9:
            bad.append("total cost does not match the aggregated edit costs")
        return MappingReport(ok=not bad, violations=tuple(bad))

    left = [a for a, _ in m.pairs]
    right = [b for _, b in m.pairs]
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        bad.append("condition 1 (one-to-one) violated")
    if m.decomposition1 is None or m.decomposition2 is None:
        bad.append("mapping lacks its decompositions")
        return MappingReport(ok=False, violations=tuple(bad))
    if (m.decomposition1.main, m.decomposition2.main) not in set(m.pairs):
        bad.append("condition 2 (main branches paired) violated")
    paired = set(m.pairs)
    for a, b in m.pairs:
        pa = m.decomposition1.parent_branch(a)
        pb = m.decomposition2.parent_branch(b)
        if (pa is None) != (pb is None):
            bad.append(f"condition 3 (upward closure) violated at ({a.label},{b.label})")
        elif pa is not None and (pa, pb) not in paired:
            bad.append(f"condition 3 (upward closure) violated at ({a.label},{b.label})")
    for idx, (a, b) in enumerate(m.pairs):
        for a2, b2 in m.pairs[idx + 1 :]:
            d1 = _is_weak_descendant(m.tree1, a.start, a2.start)
            d2 = _is_weak_descendant(m.tree2, b.start, b2.start)
            u1 = _is_weak_descendant(m.tree1, a2.start, a.start)
            u2 = _is_weak_descendant(m.tree2, b2.start, b.start)
            if d1 != d2 or u1 != u2:
                bad.append(
                    f"condition 4 (order preservation) violated between "
                    f"({a.label},{b.label}) and ({a2.label},{b2.label})"
                )
    if set(left) | set(m.deletions) != set(m.decomposition1.branches):
        bad.append("pairs plus deletions do not cover decomposition 1")
    if set(right) | set(m.insertions) != set(m.decomposition2.branches):
        bad.append("pairs plus insertions do not cover decomposition 2")
    costs = m.edit_costs()
    if abs(aggregate(costs, m.mode) - m.total_cost) > 1e-9:
        bad.append("total cost does not match the aggregated edit costs")
    return MappingReport(ok=not bad, violations=tuple(bad))


def induced_node_mapping(mapping: BranchMapping):
    """Node pairs induced by a branch mapping: matched branch endpoints.

    Each matched branch pair contributes its (leaf, leaf) and (start, start)
    node pairs. Deleted and inserted branches contribute nothing.
    """
    report = validate_branch_mapping(mapping)
    if not report.ok:
        raise PreconditionError(
            "mapping fails validation: " + "; ".join(report.violations)
        )
    out = set()
    for a, b in mapping.pairs:
        out.add((a.leaf, b.leaf))
        out.add((a.start, b.start))
    return tuple(sorted(out))
