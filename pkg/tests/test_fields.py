import numpy as np
import pytest

from mtdist import MTDistError, ParseError, validate_merge_tree
from mtdist.fields import (
    ScalarField2D,
    compute_merge_tree,
    local_maximum_count,
    parse_scalar_field,
    read_scalar_field,
    simplify,
    write_scalar_field,
)


def bump_field(rows=24, cols=24, centers=((6, 6), (17, 17)), sigma=2.5, amps=None):
    ys, xs = np.mgrid[0:rows, 0:cols]
    total = np.zeros((rows, cols))
    amps = amps or [1.0] * len(centers)
    for (cy, cx), a in zip(centers, amps):
        total += a * np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2 * sigma**2))
    return ScalarField2D(rows=rows, cols=cols, values=total.reshape(-1))


class TestScalarField:
    def test_shape_checks(self):
        with pytest.raises(MTDistError):
            ScalarField2D(rows=2, cols=2, values=np.zeros(3))
        with pytest.raises(MTDistError):
            ScalarField2D(rows=2, cols=2, values=np.array([0.0, 1.0, np.nan, 2.0]))
        with pytest.raises(MTDistError):
            ScalarField2D(rows=2, cols=2, values=np.zeros(4), connectivity=6)

    def test_round_trip(self, tmp_path):
        f = bump_field(rows=5, cols=7)
        path = tmp_path / "f.sf2"
        write_scalar_field(path, f)
        back = read_scalar_field(path)
        assert back.rows == 5 and back.cols == 7
        assert np.array_equal(back.values, f.values)

    def test_malformed_header_names_line(self):
        with pytest.raises(ParseError) as err:
            parse_scalar_field("SF 2 2\n0 1\n2 3\n", path="x.sf2")
        assert str(err.value).startswith("x.sf2:1:")

    def test_value_count_check(self):
        with pytest.raises(ParseError):
            parse_scalar_field("SF2 2 2\n0 1 2\n")


class TestComputeMergeTree:
    def test_constant_field(self):
        f = ScalarField2D(rows=3, cols=3, values=np.full(9, 3.0))
        t = compute_merge_tree(f)
        assert len(t) == 2
        assert validate_merge_tree(t).ok

    def test_1x4_hand_trace(self):
        f = ScalarField2D(rows=1, cols=4, values=np.array([1.0, 3.0, 2.0, 4.0]), connectivity=4)
        t = compute_merge_tree(f)
        rounded = sorted(round(v) for v in t.values)
        assert rounded == [1, 2, 3, 4]
        by_val = {round(t.values[v]): v for v in range(len(t))}
        assert t.parent[by_val[4]] == by_val[2]
        assert t.parent[by_val[3]] == by_val[2]
        assert t.parent[by_val[2]] == by_val[1]
        assert t.parent[by_val[1]] == -1

    def test_two_bumps(self):
        t = compute_merge_tree(bump_field())
        assert len(t.leaves) == 2
        assert len(t) == 4

    def test_leaf_count_equals_local_maxima(self):
        rng = np.random.default_rng(3)
        for conn in (4, 8):
            for _ in range(10):
                f = ScalarField2D(
                    rows=9, cols=11, values=rng.uniform(0, 1, 99), connectivity=conn
                )
                t = compute_merge_tree(f)
                assert len(t.leaves) == local_maximum_count(f)

    def test_plateau_ties(self):
        vals = np.array([1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0])
        f = ScalarField2D(rows=3, cols=3, values=vals, connectivity=4)
        t = compute_merge_tree(f)
        assert validate_merge_tree(t).ok
        assert len(t.leaves) == local_maximum_count(f)

    def test_minima_direction_negates(self):
        f = bump_field()
        neg = ScalarField2D(rows=f.rows, cols=f.cols, values=-f.values)
        t_max = compute_merge_tree(f, "max")
        t_min = compute_merge_tree(neg, "min")
        assert np.array_equal(t_max.parent, t_min.parent)
        assert np.allclose(t_max.values, t_min.values)

    def test_direction_flip_shape_and_negated_labels(self):
        f = bump_field()
        t_max = compute_merge_tree(f, "max")
        t_min = compute_merge_tree(f, "min")
        assert validate_merge_tree(t_min).ok
        # a two-bump field has a single minimum basin
        assert len(t_min.leaves) >= 1


class TestSimplify:
    def test_threshold_zero_is_identity(self, two_peak_asymmetric):
        assert simplify(two_peak_asymmetric, 0.0) == two_peak_asymmetric

    def test_fig3_shape(self, two_peak_asymmetric, two_peak_flat):
        s = simplify(two_peak_asymmetric, 2.5)
        assert s == two_peak_flat

    def test_total_collapse(self, two_peak_asymmetric):
        s = simplify(two_peak_asymmetric, 1000.0)
        assert len(s) == 2
        assert s.values.tolist() == [0.0, 12.0]

    def test_idempotent_and_monotone(self):
        rng = np.random.default_rng(7)
        f = ScalarField2D(rows=12, cols=12, values=rng.uniform(0, 1, 144))
        t = compute_merge_tree(f)
        last = len(t.leaves)
        for tau in (0.05, 0.1, 0.2, 0.4):
            s = simplify(t, tau)
            assert simplify(s, tau) == s
            assert len(s.leaves) <= last
            last = len(s.leaves)

    def test_surviving_elder_persistence(self):
        from mtdist.fields import elder_branch_persistences

        rng = np.random.default_rng(9)
        f = ScalarField2D(rows=12, cols=12, values=rng.uniform(0, 1, 144))
        t = simplify(compute_merge_tree(f), 0.25)
        assert all(p >= 0.25 for p in elder_branch_persistences(t))

    def test_rejects_negative_threshold(self, two_peak_flat):
        with pytest.raises(ValueError):
            simplify(two_peak_flat, -1.0)
