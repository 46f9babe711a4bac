"""Distances between persistence diagrams and the pairwise barcode matrix.

The bottleneck distance is computed exactly: binary search over the finite
candidate-cost set (all pairwise sup-norm costs plus all half-persistences)
with bipartite-matching feasibility checks, so the returned value is always
an element of the candidate set.  Essential classes match essential classes
only; if the essential counts differ the distance is ``+inf``.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._speed import kuhn_cover
from .diagrams import PersistenceDiagram
from .errors import DimensionMismatchError, InputError, SchemaError, TopodriftError

MATRIX_FORMAT_VERSION = 1


def _sup_cost_matrix(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Pairwise sup-norm costs between finite pairs of two diagrams."""
    db = np.abs(P[:, 0][:, None] - Q[:, 0][None, :])
    dd = np.abs(P[:, 1][:, None] - Q[:, 1][None, :])
    return np.maximum(db, dd)


def _essential_cost(e1: np.ndarray, e2: np.ndarray, power: float | None = None):
    """Optimal matching cost between essential-birth multisets (sorted 1D)."""
    if e1.size != e2.size:
        return np.inf
    if e1.size == 0:
        return 0.0
    diffs = np.abs(e1 - e2)
    if power is None:  # bottleneck: max matched difference
        return float(diffs.max())
    return float((diffs ** power).sum())


def _feasible(costs: np.ndarray, half1: np.ndarray, half2: np.ndarray,
              c: float) -> bool:
    adj = np.ascontiguousarray((costs <= c).astype(np.uint8))
    must1 = np.ascontiguousarray((half1 > c).astype(np.uint8))
    if np.any(must1) and not kuhn_cover(adj, must1):
        return False
    must2 = np.ascontiguousarray((half2 > c).astype(np.uint8))
    if np.any(must2) and not kuhn_cover(np.ascontiguousarray(adj.T), must2):
        return False
    return True


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exact bottleneck distance between two diagrams of equal dimension."""
    if d1.homology_dim != d2.homology_dim:
        raise DimensionMismatchError(
            f"homology dimensions differ: {d1.homology_dim} vs {d2.homology_dim}")
    ess = _essential_cost(d1.essential_births, d2.essential_births)
    if np.isinf(ess):
        return float("inf")

    P, Q = d1.finite, d2.finite
    half1 = (P[:, 1] - P[:, 0]) / 2.0
    half2 = (Q[:, 1] - Q[:, 0]) / 2.0
    if P.shape[0] == 0 and Q.shape[0] == 0:
        return float(ess)
    costs = _sup_cost_matrix(P, Q)
    candidates = np.unique(np.concatenate(
        [[0.0], costs.ravel(), half1, half2]))

    lo, hi = 0, len(candidates) - 1
    # the largest candidate (max half-persistence or max pair cost) is feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(costs, half1, half2, float(candidates[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(max(ess, candidates[lo]))


def wasserstein_q(d1: PersistenceDiagram, d2: PersistenceDiagram, q: float = 2.0) -> float:
    """q-Wasserstein distance (sup-norm ground metric, diagonal allowed)."""
    from scipy.optimize import linear_sum_assignment

    if d1.homology_dim != d2.homology_dim:
        raise DimensionMismatchError(
            f"homology dimensions differ: {d1.homology_dim} vs {d2.homology_dim}")
    if not q >= 1:
        raise InputError(f"q must be >= 1, got {q}")
    ess = _essential_cost(d1.essential_births, d2.essential_births, power=q)
    if np.isinf(ess):
        return float("inf")
    P, Q = d1.finite, d2.finite
    m1, m2 = P.shape[0], Q.shape[0]
    if m1 == 0 and m2 == 0:
        return float(ess ** (1.0 / q))
    half1 = (P[:, 1] - P[:, 0]) / 2.0
    half2 = (Q[:, 1] - Q[:, 0]) / 2.0
    size = m1 + m2
    M = np.zeros((size, size))
    if m1 and m2:
        M[:m1, :m2] = _sup_cost_matrix(P, Q) ** q
    M[:m1, m2:] = (half1 ** q)[:, None]
    M[m1:, :m2] = (half2 ** q)[None, :]
    rows, cols = linear_sum_assignment(M)
    return float((M[rows, cols].sum() + ess) ** (1.0 / q))


@dataclass
class BarcodeDistanceMatrix:
    """Pairwise bottleneck distances over a diagram series (one dimension)."""

    entries: np.ndarray
    homology_dim: int

    def __post_init__(self):
        E = np.asarray(self.entries, dtype=np.float64)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise InputError(f"entries must be square, got shape {E.shape}")
        self.entries = E

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# topodrift-barcode-distance-matrix {MATRIX_FORMAT_VERSION} "
                     f"dim={self.homology_dim}\n")
            for row in self.entries:
                fh.write(",".join("inf" if np.isinf(x) else format(x, ".17g")
                                  for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "BarcodeDistanceMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
            if not header.startswith("# topodrift-barcode-distance-matrix"):
                raise SchemaError(f"{path}: missing distance-matrix header")
            parts = header.split()
            if int(parts[2]) != MATRIX_FORMAT_VERSION:
                raise SchemaError(f"{path}: unsupported version {parts[2]}")
            dim = int(parts[3].split("=")[1])
            rows = [[float(tok) for tok in line.strip().split(",")]
                    for line in fh if line.strip()]
        return cls(np.array(rows, dtype=np.float64), dim)

    def to_json_obj(self) -> dict:
        return {
            "format_version": MATRIX_FORMAT_VERSION,
            "homology_dim": self.homology_dim,
            "entries": [[None if np.isinf(x) else x for x in row]
                        for row in self.entries],
        }

    @classmethod
    def from_json_obj(cls, obj) -> "BarcodeDistanceMatrix":
        if obj.get("format_version") != MATRIX_FORMAT_VERSION:
            raise SchemaError(
                f"unsupported matrix format_version {obj.get('format_version')!r}")
        entries = [[np.inf if x is None else x for x in row]
                   for row in obj["entries"]]
        return cls(np.array(entries, dtype=np.float64), int(obj["homology_dim"]))


def _pair_block(args):
    diagrams, pairs = args
    out = []
    for (i, j) in pairs:
        try:
            out.append((i, j, bottleneck(diagrams[i], diagrams[j])))
        except TopodriftError as exc:
            raise TopodriftError(f"bottleneck failed for pair ({i}, {j}): {exc}") from exc
    return out


def pairwise_bottleneck(diagrams, jobs: int = 1) -> BarcodeDistanceMatrix:
    """All pairwise bottleneck distances of a diagram series.

    Pairs are independent; with ``jobs > 1`` they are distributed over worker
    processes.  The assembled matrix does not depend on the worker count.
    """
    diagrams = list(diagrams)
    if not diagrams:
        raise InputError("empty diagram series")
    dims = {d.homology_dim for d in diagrams}
    if len(dims) != 1:
        raise DimensionMismatchError(f"mixed homology dimensions {sorted(dims)}")
    T = len(diagrams)
    out = np.zeros((T, T))
    pairs = [(i, j) for i in range(T) for j in range(i + 1, T)]
    if jobs > 1 and len(pairs) > 1:
        chunks = [pairs[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_pair_block, [(diagrams, c) for c in chunks])
        for block in results:
            for i, j, val in block:
                out[i, j] = out[j, i] = val
    else:
        for i, j, val in _pair_block((diagrams, pairs)):
            out[i, j] = out[j, i] = val
    return BarcodeDistanceMatrix(out, diagrams[0].homology_dim)
