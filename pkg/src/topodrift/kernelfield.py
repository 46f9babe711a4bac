"""Indicator-kernel field over a barcode distance matrix.

Houses the kernel ``h(t, s, r) = 1{ d(t, s) <= r }`` on a radius grid, with
exact integer prefix structures so partial sums over index squares and
column rectangles are O(1) lookups.  All indicator accumulation is integer;
division happens at the last step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .geometry import validate_distance_matrix
from .metrics import BarcodeDistanceMatrix

DEFAULT_GRID_COUNT = 100


@dataclass
class RadiusGrid:
    """Strictly increasing radii in (0, r_max]; r_max is the range cap."""

    r_max: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise InputError("radius grid must be a non-empty 1-D array")
        if not self.r_max > 0:
            raise InputError(f"r_max must be positive, got {self.r_max}")
        if vals[0] <= 0 or np.any(np.diff(vals) <= 0):
            raise InputError("radius grid must be strictly increasing and positive")
        if vals[-1] > self.r_max:
            raise InputError("radius grid exceeds r_max")
        self.values = vals

    @property
    def count(self) -> int:
        return self.values.size

    @classmethod
    def default(cls, dB: np.ndarray, count: int | None = None,
                r_max: float | None = None) -> "RadiusGrid":
        """Equally spaced grid r_i = i * r_max / R.

        ``r_max`` defaults to the largest finite entry of ``dB``; ``count``
        to min(T, 100).
        """
        dB = np.asarray(dB)
        T = dB.shape[0]
        if r_max is None:
            finite = dB[np.isfinite(dB)]
            r_max = float(finite.max()) if finite.size else 0.0
        if not r_max > 0:
            raise InputError(
                "cannot build a radius grid: no positive finite distance "
                "(degenerate input)")
        R = count if count is not None else min(T, DEFAULT_GRID_COUNT)
        if R < 1:
            raise InputError(f"grid count must be >= 1, got {R}")
        values = r_max * (np.arange(1, R + 1) / R)
        values[-1] = r_max
        return cls(r_max=float(r_max), values=values)


@dataclass
class KernelField:
    """Distance matrix + radius grid + exact integer prefix counts.

    ``pair_counts[j, k-1]`` is the number of ordered pairs ``(s, t)`` with
    ``s, t <= k`` and ``d(t, s) <= r_j`` (diagonal included, so the kernel
    satisfies h(t, t, r) = 1).  ``col_counts[j, i-1]`` counts ordered pairs
    with ``t <= T`` and ``s <= i``.
    """

    dB: np.ndarray
    grid: RadiusGrid
    pair_counts: np.ndarray = field(repr=False)
    col_counts: np.ndarray = field(repr=False)
    homology_dim: int | None = None
    n_infinite: int = 0

    @property
    def T(self) -> int:
        return self.dB.shape[0]

    @property
    def R(self) -> int:
        return self.grid.count

    @classmethod
    def build(cls, distances, grid: RadiusGrid | None = None,
              grid_count: int | None = None,
              grid_r_max: float | None = None) -> "KernelField":
        hom_dim = None
        if isinstance(distances, BarcodeDistanceMatrix):
            hom_dim = distances.homology_dim
            dB = distances.entries
        else:
            dB = np.asarray(distances, dtype=np.float64)
        dB = validate_distance_matrix(dB)
        T = dB.shape[0]
        if T < 2:
            raise InputError(f"kernel field needs T >= 2 time steps, got {T}")
        if grid is None:
            grid = RadiusGrid.default(dB, count=grid_count, r_max=grid_r_max)
        R = grid.count

        # J[t, s] = smallest grid index j with dB <= r_j (R if none, incl. inf)
        J = np.searchsorted(grid.values, dB, side="left")
        row_hist = np.zeros((T, R + 1), dtype=np.int64)
        col_hist = np.zeros((T, R + 1), dtype=np.int64)
        for t in range(T):
            if t:
                row_hist[t] = np.bincount(J[t, :t], minlength=R + 1)
            col_hist[t] = np.bincount(J[:, t], minlength=R + 1)
        strict_lower = np.cumsum(row_hist[:, :R], axis=1)      # (T, R)
        new_per_t = 1 + 2 * strict_lower                       # adds row/col/diag of t
        pair_counts = np.cumsum(new_per_t, axis=0).T.copy()    # (R, T)
        col_full = np.cumsum(col_hist[:, :R], axis=1)          # (T, R)
        col_counts = np.cumsum(col_full, axis=0).T.copy()      # (R, T)
        n_infinite = int(np.isinf(dB).sum() // 2)
        return cls(dB=dB, grid=grid, pair_counts=pair_counts,
                   col_counts=col_counts, homology_dim=hom_dim,
                   n_infinite=n_infinite)

    # -- kernel and sums -------------------------------------------------

    def kernel_value(self, t: int, s: int, r: float) -> int:
        """h(t, s, r) with 1-based time indices."""
        return int(self.dB[t - 1, s - 1] <= r)

    def radius_index(self, r: float) -> int | None:
        """Grid position of radius ``r``, or None if off-grid."""
        j = int(np.searchsorted(self.grid.values, r))
        if j < self.R and self.grid.values[j] == r:
            return j
        return None

    def square_count(self, k: int, r: float) -> int:
        """Ordered pairs (s, t <= k) with d <= r; exact integer."""
        if not 0 <= k <= self.T:
            raise InputError(f"k must lie in [0, {self.T}], got {k}")
        if k == 0:
            return 0
        j = self.radius_index(r)
        if j is not None:
            return int(self.pair_counts[j, k - 1])
        return int((self.dB[:k, :k] <= r).sum())

    def s_values(self, r: float) -> np.ndarray:
        """S_T(k/T, r) for k = 1..T as floats (counts / T^2)."""
        j = self.radius_index(r)
        if j is not None:
            counts = self.pair_counts[j]
        else:
            mask = self.dB <= r
            new = 1 + 2 * np.array([mask[t, :t].sum() for t in range(self.T)],
                                   dtype=np.int64)
            counts = np.cumsum(new)
        return counts / float(self.T) ** 2

    def u_matrix(self) -> np.ndarray:
        """U_T(k/T, r_j) on the full (R, T) lattice.

        Computed as S(k/T, r) - (k/T)^2 S(1, r), matching the composed-oracle
        evaluation bit for bit.
        """
        T = self.T
        S = self.pair_counts / float(T) ** 2
        uk = np.arange(1, T + 1) / T
        return S - (uk * uk)[None, :] * S[:, -1][:, None]


def partial_sum_S(field: KernelField, u: float, r: float) -> float:
    """Partial-sum process S_T(u, r) = T^-2 sum_{s,t <= floor(uT)} h(t,s,r)."""
    if not 0.0 <= u <= 1.0:
        raise InputError(f"u must lie in [0, 1], got {u}")
    k = int(np.floor(u * field.T))
    return field.square_count(k, r) / float(field.T) ** 2


def u_process(field: KernelField, u: float, r: float) -> float:
    """U_T(u, r) = S_T(u, r) - u^2 S_T(1, r), with u snapped to floor(uT)/T."""
    if not 0.0 <= u <= 1.0:
        raise InputError(f"u must lie in [0, 1], got {u}")
    T = field.T
    k = int(np.floor(u * T))
    uk = k / T
    s_k = field.square_count(k, r) / float(T) ** 2
    s_1 = field.square_count(T, r) / float(T) ** 2
    return s_k - uk * uk * s_1
