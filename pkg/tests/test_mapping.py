import json

import numpy as np
import pytest

from mtdist import (
    MergeTree,
    PreconditionError,
    branch_mapping_distance,
    delete_tree_cost,
    elder_rule_decomposition,
    enumerate_branch_decompositions,
    induced_node_mapping,
    validate_branch_mapping,
)
from mtdist.mapping import BranchMapping
from mtdist.metrics import BaseMetric, aggregate
from conftest import nested_tree, random_merge_tree

BP = BaseMetric("birth-persistence")
PERS = BaseMetric("persistence")


def pair_labels(mapping):
    return sorted((a.label, b.label) for a, b in mapping.pairs)


class TestFig5:
    def test_distances_and_pairs(self, fig5a, fig5b, fig5c):
        d_ab, m_ab = branch_mapping_distance(fig5a, fig5b, BP, "sum")
        d_bc, m_bc = branch_mapping_distance(fig5b, fig5c, BP, "sum")
        d_ac, m_ac = branch_mapping_distance(fig5a, fig5c, BP, "sum")
        assert d_ab == pytest.approx(2.0, abs=1e-9)
        assert d_bc == pytest.approx(1.0, abs=1e-9)
        assert d_ac == pytest.approx(5.0, abs=1e-9)
        assert pair_labels(m_ab) == [((0.0, 10.0), (0.0, 10.0)), ((3.0, 6.0), (5.0, 8.0))]
        assert pair_labels(m_bc) == [((0.0, 8.0), (0.0, 8.0)), ((5.0, 10.0), (6.0, 11.0))]
        assert pair_labels(m_ac) == [((0.0, 10.0), (0.0, 11.0)), ((3.0, 6.0), (6.0, 8.0))]

    def test_triangle_violation_witness(self, fig5a, fig5b, fig5c):
        d_ab = branch_mapping_distance(fig5a, fig5b, BP, "sum")[0]
        d_bc = branch_mapping_distance(fig5b, fig5c, BP, "sum")[0]
        d_ac = branch_mapping_distance(fig5a, fig5c, BP, "sum")[0]
        assert d_ac > d_ab + d_bc

    def test_self_distance_zero(self, fig5a):
        d, mapping = branch_mapping_distance(fig5a, fig5a, BP, "sum")
        assert d == 0.0
        assert not mapping.deletions and not mapping.insertions


class TestFig3:
    def test_branch_based_cost_is_two(self, two_peak_asymmetric, two_peak_flat):
        d, mapping = branch_mapping_distance(two_peak_asymmetric, two_peak_flat, PERS, "sum")
        assert d == pytest.approx(2.0, abs=1e-9)
        deleted = [b.label for b in mapping.deletions]
        assert deleted == [(9.0, 11.0)]


class TestDeleteTree:
    def test_single_branch(self):
        tree = MergeTree([0.0, 10.0], [-1, 0])
        assert delete_tree_cost(tree, PERS, "sum") == 10.0

    def test_fig5a(self, fig5a):
        assert delete_tree_cost(fig5a, PERS, "sum") == pytest.approx(13.0)

    def test_empty(self):
        assert delete_tree_cost(None, PERS, "sum") == 0.0

    def test_matches_one_sided_mapping(self, fig5c):
        d, mapping = branch_mapping_distance(fig5c, None, PERS, "sum")
        assert d == delete_tree_cost(fig5c, PERS, "sum")
        assert validate_branch_mapping(mapping).ok
        assert not mapping.pairs and not mapping.insertions

    def test_invariance_across_decompositions(self):
        # total persistence does not depend on the decomposition
        rng = np.random.default_rng(3)
        for _ in range(20):
            t = random_merge_tree(rng, max_leaves=6)
            want = delete_tree_cost(t, PERS, "sum")
            for dec in enumerate_branch_decompositions(t):
                total = sum(b.persistence for b in dec.branches)
                assert total == pytest.approx(want, abs=1e-9)


class TestValidate:
    def test_dp_output_validates(self, fig5a, fig5b):
        _, mapping = branch_mapping_distance(fig5a, fig5b, BP, "sum")
        assert validate_branch_mapping(mapping).ok

    def test_missing_main_pair(self, fig5a, fig5b):
        _, good = branch_mapping_distance(fig5a, fig5b, BP, "sum")
        side_pair = next(
            (a, b) for a, b in good.pairs if a != good.decomposition1.main
        )
        costs = [BP.pair(*side_pair[0].label, *side_pair[1].label),
                 BP.deletion(*good.decomposition1.main.label),
                 BP.deletion(*good.decomposition2.main.label)]
        broken = BranchMapping(
            tree1=good.tree1,
            tree2=good.tree2,
            decomposition1=good.decomposition1,
            decomposition2=good.decomposition2,
            pairs=(side_pair,),
            pair_costs=(costs[0],),
            deletions=(good.decomposition1.main,),
            insertions=(good.decomposition2.main,),
            total_cost=aggregate(costs, "sum"),
            metric=BP,
            mode="sum",
            stats=good.stats,
        )
        report = validate_branch_mapping(broken)
        assert not report.ok
        assert any("condition 2" in v for v in report.violations)

    def test_crossed_attachment_order(self):
        # three siblings attached at distinct saddles of the main branch
        t1 = nested_tree((0, [(1, [(2, [(3, [(20, []), (12, [])]), (11, [])]), (10, [])])]))
        t2 = nested_tree((0, [(1, [(2, [(3, [(20, []), (12, [])]), (11, [])]), (10, [])])]))
        d, good = branch_mapping_distance(t1, t2, BP, "sum")
        assert d == 0.0

        dec1 = good.decomposition1
        dec2 = good.decomposition2
        by_label1 = {b.label: b for b in dec1.branches}
        by_label2 = {b.label: b for b in dec2.branches}
        crossed = []
        for a, b in good.pairs:
            if a.label == (1.0, 10.0):
                crossed.append((a, by_label2[(3.0, 12.0)]))
            elif a.label == (3.0, 12.0):
                crossed.append((a, by_label2[(1.0, 10.0)]))
            else:
                crossed.append((a, b))
        costs = [BP.pair(*a.label, *b.label) for a, b in crossed]
        broken = BranchMapping(
            tree1=t1,
            tree2=t2,
            decomposition1=dec1,
            decomposition2=dec2,
            pairs=tuple(crossed),
            pair_costs=tuple(costs),
            deletions=(),
            insertions=(),
            total_cost=aggregate(costs, "sum"),
            metric=BP,
            mode="sum",
            stats=good.stats,
        )
        report = validate_branch_mapping(broken)
        assert not report.ok
        assert any("condition 4" in v for v in report.violations)


class TestInducedNodeMapping:
    def test_fig5_ac_endpoints(self, fig5a, fig5c):
        _, mapping = branch_mapping_distance(fig5a, fig5c, BP, "sum")
        nodes = set(induced_node_mapping(mapping))
        # (0,10)<->(0,11): roots and top leaves; (3,6)<->(6,8): saddles and leaves
        assert nodes == {(0, 0), (2, 2), (1, 1), (3, 3)}

    def test_identity(self, two_peak_asymmetric):
        _, mapping = branch_mapping_distance(
            two_peak_asymmetric, two_peak_asymmetric, BP, "sum"
        )
        nodes = induced_node_mapping(mapping)
        assert all(a == b for a, b in nodes)

    def test_deletions_contribute_nothing(self, two_peak_asymmetric, two_peak_flat):
        _, mapping = branch_mapping_distance(two_peak_asymmetric, two_peak_flat, PERS, "sum")
        nodes = induced_node_mapping(mapping)
        mapped_t1 = {a for a, _ in nodes}
        deleted_leaf = mapping.deletions[0].leaf
        assert deleted_leaf not in mapped_t1

    def test_one_to_one_and_ancestor_preserving_random(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            t1 = random_merge_tree(rng, max_leaves=6)
            t2 = random_merge_tree(rng, max_leaves=6)
            _, mapping = branch_mapping_distance(t1, t2, BP, "sum")
            nodes = induced_node_mapping(mapping)
            firsts = [a for a, _ in nodes]
            seconds = [b for _, b in nodes]
            assert len(set(firsts)) == len(firsts)
            assert len(set(seconds)) == len(seconds)
            anc1 = {v: set(t1.ancestors(v)) for v in firsts}
            for (a, b) in nodes:
                for (a2, b2) in nodes:
                    if a2 in anc1[a]:
                        assert b2 in t2.ancestors(b)


class TestModesAndFixed:
    def test_l2_runs_on_squared_costs(self, fig5a, fig5c):
        d, mapping = branch_mapping_distance(fig5a, fig5c, BP, "l2")
        # under squared costs, deleting (3,6) and inserting (6,8) beats the
        # sum-optimal relabel: 3^2 + 2^2 < 4^2
        assert d == pytest.approx(np.sqrt(1.0 + 9.0 + 4.0), abs=1e-9)
        assert [b.label for b in mapping.deletions] == [(3.0, 6.0)]
        assert [b.label for b in mapping.insertions] == [(6.0, 8.0)]
        assert aggregate(mapping.edit_costs(), "l2") == pytest.approx(d, abs=1e-9)

    def test_fixed_equals_free_on_unique_decompositions(self):
        t1 = MergeTree([0.0, 10.0], [-1, 0])
        t2 = MergeTree([2.0, 7.0], [-1, 0])
        free = branch_mapping_distance(t1, t2, BP, "sum")[0]
        fixed = branch_mapping_distance(
            t1, t2, BP, "sum",
            fixed=(elder_rule_decomposition(t1), elder_rule_decomposition(t2)),
        )[0]
        assert free == fixed

    def test_free_never_exceeds_fixed(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            t1 = random_merge_tree(rng, max_leaves=6)
            t2 = random_merge_tree(rng, max_leaves=6)
            free = branch_mapping_distance(t1, t2, BP, "sum")[0]
            for d1 in enumerate_branch_decompositions(t1)[:3]:
                for d2 in enumerate_branch_decompositions(t2)[:3]:
                    fixed = branch_mapping_distance(t1, t2, BP, "sum", fixed=(d1, d2))[0]
                    assert free <= fixed + 1e-9

    def test_fixed_mapping_respects_decomposition(self, fig5a, fig5c):
        dec1 = elder_rule_decomposition(fig5a)
        dec2 = elder_rule_decomposition(fig5c)
        d, mapping = branch_mapping_distance(fig5a, fig5c, BP, "sum", fixed=(dec1, dec2))
        assert mapping.decomposition1 is dec1
        assert mapping.decomposition2 is dec2
        assert validate_branch_mapping(mapping).ok

    def test_fixed_rejects_foreign_decomposition(self, fig5a, fig5b, fig5c):
        dec_b = elder_rule_decomposition(fig5b)
        dec_c = elder_rule_decomposition(fig5c)
        with pytest.raises(PreconditionError):
            branch_mapping_distance(fig5a, fig5c, BP, "sum", fixed=(dec_b, dec_c))

    def test_symmetry(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            t1 = random_merge_tree(rng, max_leaves=6, integer=True)
            t2 = random_merge_tree(rng, max_leaves=6, integer=True)
            for kind in ("persistence", "birth-persistence", "linf"):
                m = BaseMetric(kind)
                assert (
                    branch_mapping_distance(t1, t2, m, "sum")[0]
                    == branch_mapping_distance(t2, t1, m, "sum")[0]
                )
            m = BaseMetric("euclidean")
            assert branch_mapping_distance(t1, t2, m, "sum")[0] == pytest.approx(
                branch_mapping_distance(t2, t1, m, "sum")[0], abs=1e-12
            )


class TestCostDecomposition:
    """Restriction of an optimal mapping to a matched subtree pair accounts
    for exactly its share of the total cost (sum aggregation)."""

    def test_split_additivity_random(self):
        rng = np.random.default_rng(21)
        checked = 0
        while checked < 15:
            t1 = random_merge_tree(rng, max_leaves=6)
            t2 = random_merge_tree(rng, max_leaves=6)
            d, mapping = branch_mapping_distance(t1, t2, BP, "sum")
            non_main = [
                (a, b)
                for a, b in mapping.pairs
                if a != mapping.decomposition1.main
            ]
            if not non_main:
                continue
            checked += 1
            a0, b0 = non_main[0]
            inside1 = set(t1.subtree_nodes(a0.vertex_sequence(t1)[1]))
            inside2 = set(t2.subtree_nodes(b0.vertex_sequence(t2)[1]))
            part = 0.0
            rest = 0.0
            for (a, b), c in zip(mapping.pairs, mapping.pair_costs):
                if a.leaf in inside1:
                    assert b.leaf in inside2  # no straddling
                    part += c
                else:
                    assert b.leaf not in inside2
                    rest += c
            for b in mapping.deletions:
                if b.leaf in inside1:
                    part += BP.deletion(*b.label)
                else:
                    rest += BP.deletion(*b.label)
            for b in mapping.insertions:
                if b.leaf in inside2:
                    part += BP.deletion(*b.label)
                else:
                    rest += BP.deletion(*b.label)
            assert part + rest == pytest.approx(d, abs=1e-9)


class TestMemoStats:
    def test_key_bound(self):
        rng = np.random.default_rng(14)
        for _ in range(20):
            t1 = random_merge_tree(rng, max_leaves=7)
            t2 = random_merge_tree(rng, max_leaves=7)
            _, mapping = branch_mapping_distance(t1, t2, BP, "sum")
            assert mapping.stats.keys <= mapping.stats.bound


class TestExport:
    def test_json_schema(self, fig5a, fig5c):
        _, mapping = branch_mapping_distance(fig5a, fig5c, BP, "sum")
        doc = mapping.to_json_dict()
        assert set(doc) == {"metric", "mode", "totalCost", "pairs", "deletions", "insertions"}
        assert doc["totalCost"] == 5.0
        assert {p["t1Start"] for p in doc["pairs"]} <= set(range(len(fig5a)))
        text = json.dumps(doc)
        assert json.loads(text) == doc
