"""Exhaustive reference for the branch-mapping distance.

Enumerates every pair of branch decompositions and, for each pair, every
valid mapping by recursive matching over the two branch decomposition trees:
the main branches are matched, and the children of a matched pair may be
matched among themselves as long as the attachment order of the start
vertices is preserved both ways (equal starts to equal starts, deeper starts
to deeper starts). Unmatched branches are deleted or inserted with their
whole subtrees. Intentionally brute force; capped at small trees.
"""

from __future__ import annotations

from .branches import build_bdt, enumerate_branch_decompositions
from .errors import SizeLimitError
from .metrics import BaseMetric, finalize
from .trees import MergeTree, require_valid


def oracle_distance(
    tree1: MergeTree | None,
    tree2: MergeTree | None,
    metric: BaseMetric,
    mode: str = "sum",
    max_leaves: int = 7,
) -> float:
    squared = mode == "l2"

    def pair_cost(la, lb):
        c = metric.pair(la[0], la[1], lb[0], lb[1])
        return c * c if squared else c

    def del_cost(la):
        c = metric.deletion(la[0], la[1])
        return c * c if squared else c

    if tree1 is None and tree2 is None:
        return 0.0
    if tree1 is None or tree2 is None:
        tree = tree1 if tree2 is None else tree2
        require_valid(tree)
        _check_cap(tree, max_leaves)
        best = min(
            sum(del_cost(b.label) for b in dec.branches)
            for dec in enumerate_branch_decompositions(tree, max_leaves)
        )
        return finalize(best, mode)

    require_valid(tree1)
    require_valid(tree2)
    _check_cap(tree1, max_leaves)
    _check_cap(tree2, max_leaves)
    decs1 = enumerate_branch_decompositions(tree1, max_leaves)
    decs2 = enumerate_branch_decompositions(tree2, max_leaves)
    best = float("inf")
    for d1 in decs1:
        b1 = _BdtView(tree1, d1, del_cost)
        for d2 in decs2:
            b2 = _BdtView(tree2, d2, del_cost)
            best = min(best, _best_mapping(b1, b2, pair_cost))
    return finalize(best, mode)


def _check_cap(tree, max_leaves):
    n = len(tree.leaves)
    if n > max_leaves:
        raise SizeLimitError(f"tree has {n} leaves, oracle capped at {max_leaves}")


class _BdtView:
    __slots__ = ("labels", "children", "root", "subdel", "start_depth", "start_node")

    def __init__(self, tree, dec, del_cost):
        bdt = build_bdt(dec)
        self.labels = [b.label for b in bdt.branches]
        self.children = bdt.children
        self.root = bdt.root
        depth = [0] * len(tree)
        order = tree.subtree_nodes(tree.root)
        for v in order:
            p = int(tree.parent[v])
            depth[v] = 0 if p == -1 else depth[p] + 1
        self.start_node = [b.start for b in bdt.branches]
        self.start_depth = [depth[b.start] for b in bdt.branches]
        self.subdel = [0.0] * len(bdt.branches)
        done = [False] * len(bdt.branches)

        def rec(i):
            if done[i]:
                return self.subdel[i]
            total = del_cost(self.labels[i]) + sum(rec(c) for c in self.children[i])
            self.subdel[i] = total
            done[i] = True
            return total

        rec(self.root)


def _relation(view, i, j):
    """-1, 0, +1: is branch i's start above, equal to, or below branch j's."""
    if view.start_node[i] == view.start_node[j]:
        return 0
    return -1 if view.start_depth[i] < view.start_depth[j] else 1


def _best_mapping(b1: _BdtView, b2: _BdtView, pair_cost):
    memo = {}

    def match(i, j):
        key = (i, j)
        if key in memo:
            return memo[key]
        ca = b1.children[i]
        cb = b2.children[j]
        base = pair_cost(b1.labels[i], b2.labels[j])
        best = [float("inf")]

        def rec(k, used, acc, chosen):
            if acc >= best[0]:
                return
            if k == len(ca):
                total = acc + sum(b2.subdel[cb[j2]] for j2 in range(len(cb)) if j2 not in used)
                best[0] = min(best[0], total)
                return
            c = ca[k]
            rec(k + 1, used, acc + b1.subdel[c], chosen)
            for j2, d in enumerate(cb):
                if j2 in used:
                    continue
                ok = True
                for cc, dd in chosen:
                    if _relation(b1, c, cc) != _relation(b2, d, dd):
                        ok = False
                        break
                if ok:
                    used.add(j2)
                    chosen.append((c, d))
                    rec(k + 1, used, acc + match(c, d), chosen)
                    chosen.pop()
                    used.remove(j2)

        rec(0, set(), 0.0, [])
        memo[key] = base + best[0]
        return memo[key]

    return match(b1.root, b2.root)
