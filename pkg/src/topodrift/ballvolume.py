"""Empirical ball-volume curves and the correlation-dimension estimator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import validate_distance_matrix


@dataclass
class BallVolumeCurve:
    """psi_hat(r) over an increasing radius list; values lie in [0, 1]."""

    radii: np.ndarray
    values: np.ndarray
    basis: str = "cloud_distance"  # or "barcode_distance"

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if r.ndim != 1 or r.size == 0 or r.shape != v.shape:
            raise InputError("radii/values must be matching non-empty 1-D arrays")
        if np.any(np.diff(r) <= 0):
            raise InputError("radii must be strictly increasing")
        if np.any(v < 0) or np.any(v > 1) or np.any(np.diff(v) < 0):
            raise InputError("values must be non-decreasing within [0, 1]")
        self.radii, self.values = r, v

    def to_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# topodrift-ball-volume 1 basis={self.basis}\n")
            fh.write("r,psi\n")
            for r, v in zip(self.radii, self.values):
                fh.write(f"{format(r, '.17g')},{format(v, '.17g')}\n")


def empirical_ball_volume(D: np.ndarray, radii, basis: str = "cloud_distance") -> BallVolumeCurve:
    """U-statistic estimate psi_hat(r) = (T(T-1))^-1 sum_{t != s} 1{D[t,s] <= r}.

    The diagonal is excluded (U-statistic convention); counts are exact
    integers before the final division.
    """
    D = validate_distance_matrix(D)
    T = D.shape[0]
    if T < 2:
        raise InputError(f"ball volume needs at least 2 elements, got {T}")
    radii = np.asarray(radii, dtype=np.float64)
    off = D[~np.eye(T, dtype=bool)]
    off_sorted = np.sort(off[np.isfinite(off)])
    counts = np.searchsorted(off_sorted, radii, side="right")
    values = counts / float(T * (T - 1))
    return BallVolumeCurve(radii=radii, values=values, basis=basis)


def default_fit_range(D: np.ndarray, lo_pct: float = 5.0, hi_pct: float = 50.0):
    """Default log-log fit window: [5th, 50th] percentile of positive distances."""
    D = validate_distance_matrix(D)
    off = D[~np.eye(D.shape[0], dtype=bool)]
    pos = off[np.isfinite(off) & (off > 0)]
    if pos.size == 0:
        raise InputError("no positive finite distances to build a fit range")
    return float(np.percentile(pos, lo_pct)), float(np.percentile(pos, hi_pct))


def correlation_dimension(curve: BallVolumeCurve, fit_range):
    """Least-squares slope of log psi_hat(r) against log r over the window.

    Radii with psi_hat = 0 are excluded; fewer than 3 usable radii is an
    error.  Returns ``(slope, stderr)``.
    """
    lo, hi = float(fit_range[0]), float(fit_range[1])
    if not lo < hi:
        raise InputError(f"fit range must satisfy lo < hi, got ({lo}, {hi})")
    sel = (curve.radii >= lo) & (curve.radii <= hi) & (curve.values > 0)
    if sel.sum() < 3:
        raise InputError(
            f"need >= 3 radii with positive volume in the fit range, have {int(sel.sum())}")
    x = np.log(curve.radii[sel])
    y = np.log(curve.values[sel])
    m = x.size
    xc = x - x.mean()
    sxx = float(np.sum(xc * xc))
    slope = float(np.sum(xc * y) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    dof = max(m - 2, 1)
    stderr = float(np.sqrt(np.sum(resid * resid) / dof / sxx))
    return slope, stderr
