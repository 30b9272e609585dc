import io

import numpy as np
import pytest

from pald import dissim
from pald.errors import DimensionMismatch, DuplicatePoints, NegativeEntry, NonSymmetric


def test_euclidean_line():
    D = dissim.pairwise_dissimilarity([[0.0], [1.0], [3.0]])
    assert np.array_equal(D, [[0, 1, 3], [1, 0, 2], [3, 2, 0]])


def test_manhattan():
    D = dissim.pairwise_dissimilarity([[0, 0], [1, 2]], metric="manhattan")
    assert D[0, 1] == 3.0


def test_duplicate_points_rejected():
    with pytest.raises(DuplicatePoints):
        dissim.pairwise_dissimilarity([[1.0, 2.0], [1.0, 2.0], [3.0, 4.0]])


def test_precomputed_validation():
    good = np.array([[0, 1.0], [1.0, 0]])
    assert np.array_equal(dissim.pairwise_dissimilarity(good, metric="precomputed"), good)
    with pytest.raises(NonSymmetric):
        dissim.pairwise_dissimilarity([[0, 1.0], [2.0, 0]], metric="precomputed")
    with pytest.raises(NegativeEntry):
        dissim.pairwise_dissimilarity([[0, -1.0], [-1.0, 0]], metric="precomputed")
    with pytest.raises(DuplicatePoints):
        dissim.pairwise_dissimilarity([[0, 0.0], [0.0, 0]], metric="precomputed")


def test_unknown_metric():
    with pytest.raises(ValueError):
        dissim.pairwise_dissimilarity([[0.0], [1.0]], metric="cosine")


def test_point_distances_dimension_check():
    pts = np.array([[0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(DimensionMismatch):
        dissim.point_distances(pts, [1.0, 2.0, 3.0])


def test_condensed_round_trip(rng):
    pts = rng.random((7, 3))
    D = dissim.pairwise_dissimilarity(pts)
    assert np.array_equal(dissim.to_square(dissim.to_condensed(D)), D)


def test_load_points_csv_with_header_and_label():
    text = "a,b,label\n0,0,red\n1,0,red\n5,5,blue\n"
    points, labels, names = dissim.load_points_csv(io.StringIO(text))
    assert points.shape == (3, 2)
    assert labels == ["red", "red", "blue"]
    assert names == ["a", "b"]


def test_load_points_csv_headerless():
    points, labels, _ = dissim.load_points_csv(io.StringIO("0,0\n1,2\n"))
    assert labels is None
    assert np.array_equal(points, [[0, 0], [1, 2]])


def test_load_points_csv_anomaly_column():
    text = "x,y,anomaly\n0,0,0\n9,9,1\n"
    points, labels, _ = dissim.load_points_csv(io.StringIO(text))
    assert labels == ["0", "1"]
    assert points.shape == (2, 2)


def test_load_distances_csv(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("0,1,3\n1,0,2\n3,2,0\n")
    D = dissim.load_distances_csv(p)
    assert D[0, 2] == 3.0
