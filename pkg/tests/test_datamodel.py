import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from swarmcluster.datamodel import (
    AllPointsIdenticalError,
    Dataset,
    DatasetError,
    DimensionMismatchError,
    Firefly,
    NonNumericError,
    RaggedRowError,
    RngStream,
    TooFewPointsError,
    assign,
    load_dataset,
    nearest_centroid,
)


def write(tmp_path, text, name="pts.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadDataset:
    def test_three_four_five(self, tmp_path):
        d = load_dataset(write(tmp_path, "0 0\n3 4\n"))
        assert (d.n_points, d.dim) == (2, 2)
        assert d.diameter == 5.0

    def test_all_identical_rejected(self, tmp_path):
        with pytest.raises(AllPointsIdenticalError):
            load_dataset(write(tmp_path, "1 2\n1 2\n"))

    def test_eighty_rows(self, tmp_path):
        rows = "\n".join(f"{i % 9} {i // 9}" for i in range(80))
        d = load_dataset(write(tmp_path, rows + "\n"))
        assert (d.n_points, d.dim) == (80, 2)

    def test_comments_commas_and_blank_lines(self, tmp_path):
        d = load_dataset(write(tmp_path, "# header\n1,2\n\n  3 , 4\n5\t6\n"))
        np.testing.assert_array_equal(d.points, [[1, 2], [3, 4], [5, 6]])

    @pytest.mark.parametrize(
        "text, exc, line",
        [
            ("0 0\n1 2 3\n", RaggedRowError, 2),
            ("0 0\n# c\n1 x\n", NonNumericError, 3),
            ("0 0\nnan 1\n", NonNumericError, 2),
            ("# only\n4 4\n", TooFewPointsError, None),
        ],
    )
    def test_errors_carry_line_numbers(self, tmp_path, text, exc, line):
        with pytest.raises(exc) as info:
            load_dataset(write(tmp_path, text))
        if line is not None:
            assert info.value.line == line
            assert str(info.value).startswith(f"line {line}:")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DatasetError, match="cannot read"):
            load_dataset(tmp_path / "absent.txt")

    def test_one_column(self, tmp_path):
        d = load_dataset(write(tmp_path, "1\n4\n2\n"))
        assert d.dim == 1 and d.diameter == 3.0

    def test_duplicates_allowed(self, tmp_path):
        assert load_dataset(write(tmp_path, "0 0\n0 0\n1 1\n")).n_points == 3


class TestDataset:
    def test_bbox_encloses_points(self):
        pts = np.random.default_rng(0).normal(size=(40, 3))
        d = Dataset(pts)
        assert np.all(d.points >= d.bbox_min) and np.all(d.points <= d.bbox_max)

    def test_large_dataset_uses_bbox_diagonal(self):
        pts = np.random.default_rng(1).uniform(0, 1, size=(2001, 2))
        d = Dataset(pts)
        assert d.distances is None
        assert d.diameter == pytest.approx(np.linalg.norm(pts.max(0) - pts.min(0)))

    def test_immutable(self):
        d = Dataset([[0, 0], [1, 1]])
        with pytest.raises(ValueError):
            d.points[0, 0] = 5.0


class TestNearestCentroid:
    def test_zero_distance(self):
        assert nearest_centroid((0, 0), Firefly([[0, 0], [5, 5]])) == 0

    def test_tie_goes_to_lowest_index(self):
        assert nearest_centroid((2.5, 0), Firefly([[0, 0], [5, 0]])) == 0

    def test_strictly_nearer(self):
        assert nearest_centroid((4, 0), Firefly([[0, 0], [5, 0]])) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            nearest_centroid((1, 2, 3), Firefly([[0, 0]]))


class TestAssign:
    def test_unit_square_ties(self, square):
        part = assign(square, Firefly([[0, 0], [1, 1]]))
        # (1,0) and (0,1) are equidistant and go to cluster 0
        assert [list(c) for c in part.clusters] == [[0, 1, 3], [2]]
        assert part.sizes.sum() == 4

    def test_single_centroid(self, square):
        part = assign(square, Firefly([[7, 7]]))
        assert part.k == 1 and list(part.clusters[0]) == [0, 1, 2, 3]

    def test_matches_scan_oracle(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(0, 10, size=(50, 2))
        cents = rng.uniform(0, 10, size=(3, 2))
        part = assign(Dataset(pts), Firefly(cents))
        assert list(part.assignment) == oracles.labels(pts.tolist(), cents.tolist())

    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 60), k=st.integers(1, 8))
    def test_exclusive_and_exhaustive(self, seed, n, k):
        rng = np.random.default_rng(seed)
        d = Dataset(rng.integers(0, 5, size=(n, 2)).astype(float) + rng.uniform(0, 1e-3, (n, 2)))
        part = assign(d, Firefly(rng.uniform(0, 5, size=(k, 2))))
        members = np.concatenate(part.clusters)
        assert sorted(members.tolist()) == list(range(n))
        for c, idx in enumerate(part.clusters):
            assert np.all(part.assignment[idx] == c)

    def test_pure(self, blobs4):
        d, _ = blobs4
        f = Firefly(d.points[:4])
        a, b = assign(d, f), assign(d, f)
        assert np.array_equal(a.assignment, b.assignment)


class TestRngStream:
    def test_reproducible(self):
        a = RngStream(42, 3).random(5)
        b = RngStream(42, 3).random(5)
        assert np.array_equal(a, b)

    def test_streams_and_children_differ(self):
        base = RngStream(42)
        assert not np.array_equal(base.random(4), RngStream(42, 1).random(4))
        assert not np.array_equal(base.derive(0).random(4), base.derive(1).random(4))

    def test_derive_independent_of_parent_consumption(self):
        a = RngStream(9)
        a.random(100)
        assert np.array_equal(a.derive(2, 5).random(3), RngStream(9).derive(2, 5).random(3))

    def test_fixed_platform_independent_values(self):
        # PCG64 + SeedSequence output is specified bit-for-bit by numpy
        v = RngStream(0).integers(0, 2**32, size=2)
        assert v.tolist() == RngStream(0).integers(0, 2**32, size=2).tolist()

    def test_seed_range(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2**64)
