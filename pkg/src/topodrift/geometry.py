"""Finite-metric-space primitives.

Point clouds, distance matrices, Hausdorff distance, correspondence
distortion (which upper-bounds twice the Gromov-Hausdorff distance), and
greedy covers / farthest-point sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InputError


@dataclass
class PointCloud:
    """A finite set of points in a common ambient space at one time step.

    Parameters
    ----------
    points : (n, d) float array
        One point per row; all coordinates must be finite, n >= 1, d >= 1.
    time_index : int
        1-based position of the cloud in its series.
    """

    points: np.ndarray
    time_index: int = 1

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"points must be a (n>=1, d>=1) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InputError("point coordinates must be finite")
        if self.time_index < 1:
            raise InputError(f"time_index must be >= 1, got {self.time_index}")
        self.points = pts

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass
class CoverReport:
    """Result of covering a cloud with metric balls centered at data points."""

    center_indices: np.ndarray
    radius: float
    size: int = field(init=False)

    def __post_init__(self):
        self.center_indices = np.asarray(self.center_indices, dtype=np.int64)
        self.size = int(self.center_indices.size)


def validate_distance_matrix(D: np.ndarray, atol: float = 0.0) -> np.ndarray:
    """Check that ``D`` is a square, symmetric, zero-diagonal matrix.

    Entries may be ``+inf`` (points in no finite relation); NaN is rejected.
    Returns the validated float64 array.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {D.shape}")
    if np.any(np.isnan(D)):
        raise InputError("distance matrix contains NaN")
    finite = D[np.isfinite(D)]
    if finite.size and finite.min() < -atol:
        raise InputError("distance matrix has negative entries")
    if not np.allclose(D, D.T, rtol=0.0, atol=atol, equal_nan=False):
        raise InputError("distance matrix is not symmetric")
    if np.any(np.abs(np.diag(D)) > atol):
        raise InputError("distance matrix diagonal is not zero")
    return D


def pairwise_distances(cloud: PointCloud, metric: str = "euclidean",
                       precomputed: np.ndarray | None = None) -> np.ndarray:
    """Euclidean distance matrix of a cloud, or a validated passthrough.

    With ``metric="precomputed"`` the caller supplies the matrix and only
    validation is performed (the cloud's point count must match).
    """
    if metric == "precomputed":
        if precomputed is None:
            raise InputError("metric='precomputed' requires the matrix")
        D = validate_distance_matrix(precomputed)
        if D.shape[0] != cloud.n_points:
            raise InputError(
                f"precomputed matrix size {D.shape[0]} != cloud size {cloud.n_points}")
        return D
    if metric != "euclidean":
        raise InputError(f"unknown metric {metric!r}")
    pts = cloud.points
    diff = pts[:, None, :] - pts[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(D, 0.0)
    return D


def _as_points(obj) -> np.ndarray:
    if isinstance(obj, PointCloud):
        return obj.points
    return PointCloud(np.asarray(obj, dtype=np.float64)).points


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two clouds in a common ambient space."""
    A, B = _as_points(a), _as_points(b)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    cross = np.sqrt(((A[:, None, :] - B[None, :, :]) ** 2).sum(axis=2))
    return float(max(cross.min(axis=1).max(), cross.min(axis=0).max()))


def correspondence_distortion(a, b, pairing) -> float:
    """Distortion of a correspondence between two clouds.

    ``pairing`` is a sequence of index pairs ``(i, j)`` that must cover every
    index of both clouds.  The value is the supremum over pairs of pairs of
    ``|d_A(x, x') - d_B(y, y')|``; half of it upper-bounds the
    Gromov-Hausdorff distance between the clouds.
    """
    A, B = _as_points(a), _as_points(b)
    pairs = np.asarray(list(pairing), dtype=np.int64)
    if pairs.ndim != 2 or pairs.shape[1] != 2 or pairs.shape[0] == 0:
        raise InputError("pairing must be a non-empty sequence of (i, j) pairs")
    ia, ib = pairs[:, 0], pairs[:, 1]
    if ia.min() < 0 or ia.max() >= A.shape[0] or ib.min() < 0 or ib.max() >= B.shape[0]:
        raise InputError("pairing index out of range")
    if set(ia.tolist()) != set(range(A.shape[0])):
        raise InputError("pairing does not cover every index of the first cloud")
    if set(ib.tolist()) != set(range(B.shape[0])):
        raise InputError("pairing does not cover every index of the second cloud")
    DA = np.sqrt(((A[ia][:, None, :] - A[ia][None, :, :]) ** 2).sum(axis=2))
    DB = np.sqrt(((B[ib][:, None, :] - B[ib][None, :, :]) ** 2).sum(axis=2))
    return float(np.abs(DA - DB).max())


def aligned_pairing(n: int):
    """Identity correspondence for two clouds sampled on a shared grid."""
    return [(i, i) for i in range(n)]


def farthest_point_sample(D: np.ndarray, k: int, start: int = 0):
    """Gonzalez farthest-point sampling.

    Returns ``(indices, covering_radius)`` where ``covering_radius`` is the
    largest distance from any point to the chosen set.  Deterministic given
    the starting index.
    """
    D = validate_distance_matrix(D)
    n = D.shape[0]
    if not 1 <= k <= n:
        raise InputError(f"k must lie in [1, {n}], got {k}")
    if not 0 <= start < n:
        raise InputError(f"start index {start} out of range")
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = start
    mindist = D[start].copy()
    for i in range(1, k):
        nxt = int(np.argmax(mindist))
        chosen[i] = nxt
        np.minimum(mindist, D[nxt], out=mindist)
    return chosen, float(mindist.max())


def greedy_cover(D: np.ndarray, radius: float) -> CoverReport:
    """Greedy (farthest-first) cover of a finite metric space.

    Centers are added in farthest-point order until every point lies within
    ``radius`` of some center.  The size is monotonically non-increasing in
    the radius and at least the optimal cover number.
    """
    D = validate_distance_matrix(D)
    if not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    n = D.shape[0]
    centers = [0]
    mindist = D[0].copy()
    while mindist.max() > radius:
        if len(centers) == n:  # unreachable: n centers give radius 0
            break
        nxt = int(np.argmax(mindist))
        centers.append(nxt)
        np.minimum(mindist, D[nxt], out=mindist)
    return CoverReport(center_indices=np.array(centers), radius=float(radius))
