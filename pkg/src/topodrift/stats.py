"""Self-normalized change statistics over a kernel field.

Three statistics are provided, each asymptotically pivotal under the null
of a time-constant barcode distribution:

* ``stat_dmax`` -- sup-type statistic: per radius, the sup over the u-grid of
  ``sqrt(T) |U_T(u, r)|`` divided by the square root of the running
  self-normalizer ``V_T(r)``; then the sup over radii.
* ``stat_dl`` -- Cramer-von-Mises-type statistic: grid double sum of
  ``U_T^2`` over (u, r), divided by the fourth-moment normalizer ``V^L_T``.
* ``stat_q`` -- sup of ``T U_T(k/T, r)^2 / (V_1 + V_2)(k, r)`` over a trimmed
  u-grid, with forward/backward normalizers that are invariant under an
  abrupt change at the evaluated split point.

The ``sqrt(T)`` (respectively ``T``) factor on the numerators makes each
statistic converge to the Brownian functional simulated in
:mod:`topodrift.limits`; without it the sup-type ratio is bounded by 1 and
cannot be calibrated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStatisticError, InputError
from .kernelfield import KernelField

STAT_DMAX = "dmax"
STAT_DL = "dl"
STAT_Q = "q"
ALL_STATISTICS = (STAT_DMAX, STAT_DL, STAT_Q)

DEFAULT_TRIM = 0.05


def trimmed_k_range(T: int, trim: float):
    """Inclusive k-range [ceil(trim*T), floor((1-trim)*T)] for the Q sup.

    A 1e-9 guard absorbs float representation error in ``trim * T``.
    """
    if not 0.0 < trim < 0.5:
        raise InputError(f"trim must lie in (0, 0.5), got {trim}")
    lo = int(np.ceil(trim * T - 1e-9))
    hi = int(np.floor((1.0 - trim) * T + 1e-9))
    lo = max(lo, 1)
    hi = min(hi, T - 1)
    if lo > hi:
        raise InputError(f"trimmed range empty for T={T}, trim={trim}")
    return lo, hi


def _centered_square_sums(field: KernelField, j: int) -> np.ndarray:
    """A_k = sum_{s,t<=k} (h - hbar) for k = 1..T at grid radius index j."""
    T = field.T
    P = field.pair_counts[j].astype(np.float64)
    grand = P[-1] / float(T) ** 2
    k = np.arange(1, T + 1, dtype=np.float64)
    return P - k * k * grand


def var_vt(field: KernelField, r: float | None = None, *,
           radius_index: int | None = None, demeaned: bool = False) -> float:
    """Running self-normalizer V_T(r) = T^-1 sum_k T^-3 A_k(r)^2.

    ``A_k`` is the grand-mean-centered square sum of the kernel up to k.
    The ``demeaned`` flag selects the diagnostic variant whose kernel is
    h - E h with E h estimated by the grand mean; the internal centering
    makes it numerically identical to the plain-kernel variant, so both
    flags return the same value (asserted in the test suite).
    """
    del demeaned  # grand-mean demeaning cancels in the centered sums
    j = _resolve_radius(field, r, radius_index)
    T = field.T
    if T < 2:
        raise InputError("V_T requires T >= 2")
    A = _centered_square_sums(field, j)
    return float(np.sum(A * A / float(T) ** 3) / T)


def var_vl(field: KernelField, *, demeaned: bool = False) -> float:
    """Fourth-moment normalizer V^L_T over the whole radius grid.

    Literal grid formula with the configured radius count R in place of T:
    (r_max / R) * sum_j ( T^-1 sum_k T^-6 A_k(r_j)^4 )^(1/2).
    """
    del demeaned
    T, R = field.T, field.R
    if T < 2:
        raise InputError("V^L_T requires T >= 2")
    total = 0.0
    for j in range(R):
        A = _centered_square_sums(field, j)
        total += np.sqrt(np.sum(A ** 4 / float(T) ** 6) / T)
    return float(field.grid.r_max / R * total)


def _forward_backward_sums(field: KernelField, j: int):
    """P_k (leading squares) and D_k (trailing squares) as int64 arrays.

    ``P[k]`` counts pairs in [1, k]^2 and ``D[k]`` pairs in [k+1, T]^2,
    k = 0..T.
    """
    T = field.T
    P = np.zeros(T + 1, dtype=np.int64)
    P[1:] = field.pair_counts[j]
    C = np.zeros(T + 1, dtype=np.int64)
    C[1:] = field.col_counts[j]
    D = P[T] + P - 2 * C
    return P, D


def var_v1v2(field: KernelField, k: int, r: float | None = None, *,
             radius_index: int | None = None, demeaned: bool = False):
    """Split-point normalizers (V_1, V_2) at change candidate k.

    V_1 contrasts the forward partial sums up to k against their scaled
    block total; V_2 does the same backward from k+1.  The backward scale
    factor is ((T-i)/(T-k))^2, matching the (T-i)^2 pair count of the
    trailing square so both contrasts vanish exactly for a kernel constant
    in (t, s).
    """
    del demeaned
    T = field.T
    if not 1 <= k <= T - 1:
        raise InputError(f"k must lie in [1, {T - 1}], got {k}")
    j = _resolve_radius(field, r, radius_index)
    P, D = _forward_backward_sums(field, j)
    T4 = float(T) ** 4

    # scale factors as exactly-divisible integer ratios (i^2 * P_k) / k^2 so
    # constant kernels cancel to exactly zero
    i_fwd = np.arange(1, k + 1, dtype=np.float64)
    fwd = P[1:k + 1] - (i_fwd * i_fwd) * float(P[k]) / float(k * k)
    v1 = float(np.sum(fwd * fwd) / T4)

    i_bwd = np.arange(k + 1, T + 1, dtype=np.float64)
    ti = T - i_bwd
    bwd = D[k + 1:] - (ti * ti) * float(D[k]) / float((T - k) * (T - k))
    v2 = float(np.sum(bwd * bwd) / T4)
    return v1, v2


def _resolve_radius(field: KernelField, r, radius_index) -> int:
    if (r is None) == (radius_index is None):
        raise InputError("give exactly one of r or radius_index")
    if radius_index is not None:
        if not 0 <= radius_index < field.R:
            raise InputError(f"radius_index {radius_index} out of range")
        return radius_index
    j = field.radius_index(r)
    if j is None:
        raise InputError(f"radius {r} is not on the grid")
    return j


@dataclass
class StatResult:
    """Value of one statistic plus evaluation diagnostics."""

    statistic_id: str
    value: float
    degenerate_radius_indices: list
    argmax: dict


def _u_and_vt(field: KernelField):
    U = field.u_matrix()
    T = field.T
    Vt = np.empty(field.R)
    for j in range(field.R):
        A = _centered_square_sums(field, j)
        Vt[j] = np.sum(A * A / float(T) ** 3) / T
    return U, Vt


def stat_dmax(field: KernelField, skip_degenerate: bool = True) -> StatResult:
    """Sup-type statistic D^max_T over the (u, r) grid."""
    U, Vt = _u_and_vt(field)
    T = field.T
    degenerate = np.nonzero(Vt == 0.0)[0]
    if degenerate.size and not skip_degenerate:
        raise DegenerateStatisticError(
            f"V_T vanishes at radii indices {degenerate.tolist()} "
            "(constant kernel); rerun with skip_degenerate")
    ok = Vt > 0.0
    if not np.any(ok):
        raise DegenerateStatisticError(
            "V_T(r) = 0 at every grid radius: the kernel is constant and "
            "D^max is undefined")
    per_radius = np.sqrt(T) * np.abs(U[ok]).max(axis=1) / np.sqrt(Vt[ok])
    jbest = int(np.argmax(per_radius))
    jglobal = int(np.nonzero(ok)[0][jbest])
    kbest = int(np.argmax(np.abs(U[jglobal]))) + 1
    return StatResult(
        statistic_id=STAT_DMAX,
        value=float(per_radius[jbest]),
        degenerate_radius_indices=degenerate.tolist(),
        argmax={"radius": float(field.grid.values[jglobal]), "k": kbest},
    )


def stat_dl(field: KernelField) -> StatResult:
    """Integral-type statistic D^L_T with the literal grid normalization."""
    U = field.u_matrix()
    R = field.R
    denom = var_vl(field)
    if denom == 0.0:
        raise DegenerateStatisticError(
            "V^L_T = 0: the kernel is constant and D^L is undefined")
    numerator = field.grid.r_max / R * float(np.sum(U * U))
    return StatResult(statistic_id=STAT_DL, value=float(numerator / denom),
                      degenerate_radius_indices=[], argmax={})


def stat_q(field: KernelField, trim: float = DEFAULT_TRIM,
           skip_degenerate: bool = True) -> StatResult:
    """Change-point statistic Q_T = sup_{r, k} T U_T(k/T, r)^2 / V_T(k, r).

    The sup runs over the trimmed k-range; (k, r) cells with a vanishing
    normalizer are excluded (they carry no information), and the statistic
    errors out if every cell is degenerate.
    """
    T = field.T
    lo, hi = trimmed_k_range(T, trim)
    U = field.u_matrix()
    best = -np.inf
    best_at = {}
    n_degenerate = 0
    n_cells = 0
    T4 = float(T) ** 4
    ks = np.arange(lo, hi + 1)
    kk = ks.astype(np.float64)
    ii = np.arange(1, T + 1, dtype=np.float64)
    fwd_mask = ii[None, :] <= kk[:, None]
    bwd_mask = ~fwd_mask
    ii2 = ii * ii
    ti2 = (T - ii) * (T - ii)
    for j in range(field.R):
        P, D = _forward_backward_sums(field, j)
        Pf = P.astype(np.float64)
        Df = D.astype(np.float64)
        fwd = Pf[None, 1:] - ii2[None, :] * Pf[ks][:, None] / (kk * kk)[:, None]
        v1 = np.sum((fwd * fwd_mask) ** 2, axis=1) / T4
        bwd = (Df[None, 1:]
               - ti2[None, :] * Df[ks][:, None] / ((T - kk) * (T - kk))[:, None])
        v2 = np.sum((bwd * bwd_mask) ** 2, axis=1) / T4
        denom = v1 + v2
        numer = T * U[j, ks - 1] ** 2
        n_cells += ks.size
        bad = denom <= 0.0
        n_degenerate += int(bad.sum())
        if np.all(bad):
            continue
        vals = numer[~bad] / denom[~bad]
        jarg = int(np.argmax(vals))
        if vals[jarg] > best:
            best = float(vals[jarg])
            kbest = int(ks[~bad][jarg])
            best_at = {"radius": float(field.grid.values[j]), "k": kbest}
    if not np.isfinite(best):
        raise DegenerateStatisticError(
            "V_T(k, r) = 0 at every trimmed (k, r): Q_T is undefined")
    if n_degenerate and not skip_degenerate:
        raise DegenerateStatisticError(
            f"{n_degenerate}/{n_cells} trimmed (k, r) cells have a vanishing "
            "normalizer; rerun with skip_degenerate")
    return StatResult(statistic_id=STAT_Q, value=best,
                      degenerate_radius_indices=[], argmax=best_at)


@dataclass
class TestReport:
    """Decision record for one statistic at one level."""

    statistic_id: str
    value: float
    quantile_used: float
    alpha: float
    p_value_mc: float
    reject: bool
    trim: float | None
    mc_params: dict
    diagnostics: dict

    def __post_init__(self):
        if self.reject != (self.value > self.quantile_used):
            raise InputError("reject flag inconsistent with value/quantile")
        if not 0.0 <= self.p_value_mc <= 1.0:
            raise InputError("p_value_mc outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "statistic_id": self.statistic_id,
            "value": self.value,
            "quantile_used": self.quantile_used,
            "alpha": self.alpha,
            "p_value_mc": self.p_value_mc,
            "reject": self.reject,
            "trim": self.trim,
            "mc_params": dict(self.mc_params),
            "diagnostics": dict(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "TestReport":
        return cls(statistic_id=obj["statistic_id"], value=obj["value"],
                   quantile_used=obj["quantile_used"], alpha=obj["alpha"],
                   p_value_mc=obj["p_value_mc"], reject=obj["reject"],
                   trim=obj.get("trim"), mc_params=obj.get("mc_params", {}),
                   diagnostics=obj.get("diagnostics", {}))
