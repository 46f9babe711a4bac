import numpy as np
import pytest

import oracles
from topodrift import (CoverReport, DimensionMismatchError, InputError,
                       PointCloud, correspondence_distortion,
                       farthest_point_sample, greedy_cover, hausdorff_distance,
                       pairwise_distances)
from topodrift.geometry import aligned_pairing, validate_distance_matrix


def test_single_point_distance_matrix():
    D = pairwise_distances(PointCloud(np.array([[1.0, 2.0]])))
    assert D.shape == (1, 1) and D[0, 0] == 0.0


def test_three_four_five():
    D = pairwise_distances(PointCloud(np.array([[0.0, 0.0], [3.0, 4.0]])))
    assert D[0, 1] == 5.0 and D[1, 0] == 5.0


def test_distances_match_naive_oracle():
    rng = np.random.default_rng(7)
    pts = rng.normal(size=(10, 3))
    D = pairwise_distances(PointCloud(pts))
    assert np.allclose(D, oracles.naive_distance_matrix(pts), rtol=0, atol=1e-12)


def test_nonfinite_coordinates_rejected():
    with pytest.raises(InputError):
        PointCloud(np.array([[np.nan, 0.0]]))
    with pytest.raises(InputError):
        PointCloud(np.array([[np.inf, 0.0]]))


def test_precomputed_passthrough_and_validation():
    cloud = PointCloud(np.zeros((3, 2)))
    D = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0.0]])
    assert np.array_equal(pairwise_distances(cloud, "precomputed", D), D)
    with pytest.raises(InputError):
        pairwise_distances(cloud, "precomputed", D[:2, :2])
    with pytest.raises(InputError):
        validate_distance_matrix(np.array([[0, 1], [2, 0.0]]))  # asymmetric
    with pytest.raises(InputError):
        validate_distance_matrix(np.array([[1.0]]))  # nonzero diagonal


def test_hausdorff_trivials():
    A = np.array([[0.0, 0.0], [1.0, 1.0]])
    assert hausdorff_distance(A, A) == 0.0
    assert hausdorff_distance(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]])) == 1.0


def test_hausdorff_matches_bruteforce():
    rng = np.random.default_rng(11)
    for _ in range(10):
        A = rng.normal(size=(20, 3))
        B = rng.normal(size=(20, 3))
        got = hausdorff_distance(A, B)
        assert got == pytest.approx(oracles.brute_hausdorff(A, B), abs=1e-12)
        assert got == hausdorff_distance(B, A)


def test_hausdorff_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        hausdorff_distance(np.zeros((2, 2)), np.zeros((2, 3)))


def test_hausdorff_triangle_inequality():
    rng = np.random.default_rng(3)
    for _ in range(25):
        A, B, C = (rng.normal(size=(rng.integers(2, 8), 2)) for _ in range(3))
        ab = hausdorff_distance(A, B)
        bc = hausdorff_distance(B, C)
        ac = hausdorff_distance(A, C)
        assert ac <= ab + bc + 1e-9


def test_distortion_trivials():
    A = np.array([[0.0, 0.0], [1.0, 0.0]])
    assert correspondence_distortion(A, A, aligned_pairing(2)) == 0.0
    B = np.array([[0.0, 0.0], [2.0, 0.0]])
    assert correspondence_distortion(A, B, aligned_pairing(2)) == 1.0


def test_distortion_matches_bruteforce():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(rng.integers(3, 10))
        A = rng.normal(size=(n, 2))
        B = rng.normal(size=(n, 2))
        pairing = aligned_pairing(n)
        assert correspondence_distortion(A, B, pairing) == pytest.approx(
            oracles.brute_distortion(A, B, pairing), abs=0)


def test_distortion_requires_covering_pairing():
    A = np.zeros((3, 2))
    with pytest.raises(InputError):
        correspondence_distortion(A, A, [(0, 0), (1, 1)])  # index 2 uncovered


def test_distortion_bounded_by_twice_sup_displacement():
    # clouds sampled from two functions on a shared evaluation grid
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(3, 12))
        A = rng.normal(size=(n, 2))
        B = A + rng.normal(scale=0.1, size=(n, 2))
        sup = np.sqrt(((A - B) ** 2).sum(axis=1)).max()
        dist = correspondence_distortion(A, B, aligned_pairing(n))
        assert dist <= 2 * sup


def test_greedy_cover_trivials():
    pts = np.array([[0.0, 0.0], [0.3, 0.0], [0.0, 0.4]])
    D = pairwise_distances(PointCloud(pts))
    report = greedy_cover(D, radius=D.max() + 0.1)
    assert isinstance(report, CoverReport) and report.size == 1

    # two clusters separated by 10, intra-cluster diameter 0.5
    pts = np.array([[0, 0], [0.5, 0], [10, 0], [10.5, 0.0]])
    D = pairwise_distances(PointCloud(pts))
    assert greedy_cover(D, radius=1.0).size == 2


def test_greedy_cover_covers_and_dominates_optimal():
    rng = np.random.default_rng(13)
    for _ in range(15):
        n = int(rng.integers(4, 12))
        D = pairwise_distances(PointCloud(rng.normal(size=(n, 2))))
        radius = float(rng.uniform(0.2, 1.5))
        report = greedy_cover(D, radius)
        centers = report.center_indices
        assert np.all(D[centers].min(axis=0) <= radius)  # cover property
        assert report.size >= oracles.optimal_cover_size(D, radius)


def test_greedy_cover_size_monotone_in_radius():
    rng = np.random.default_rng(17)
    for _ in range(10):
        D = pairwise_distances(PointCloud(rng.normal(size=(12, 2))))
        radii = np.sort(rng.uniform(0.05, 3.0, size=6))
        sizes = [greedy_cover(D, r).size for r in radii]
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))


def test_fps_trivials():
    rng = np.random.default_rng(19)
    D = pairwise_distances(PointCloud(rng.normal(size=(8, 2))))
    idx, rad = farthest_point_sample(D, 8)
    assert rad == 0.0 and sorted(idx.tolist()) == list(range(8))
    idx, rad = farthest_point_sample(D, 1, start=3)
    assert idx.tolist() == [3] and rad == D[3].max()
    with pytest.raises(InputError):
        farthest_point_sample(D, 0)
    with pytest.raises(InputError):
        farthest_point_sample(D, 9)


def test_fps_two_approximation():
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(5, 11))
        D = pairwise_distances(PointCloud(rng.normal(size=(n, 2))))
        for k in range(1, 5):
            _, rad = farthest_point_sample(D, k)
            assert rad <= 2.0 * oracles.optimal_kcenter_radius(D, k) + 1e-12
