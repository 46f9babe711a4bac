"""Synthetic locally stationary point-cloud series for size/power studies.

Each scenario realizes a circle-valued latent function observed at fixed
evaluation angles, with temporal dependence injected through a finite
moving average of an iid innovation stream (a Bernoulli shift truncated to
finitely many lags).  Scenarios:

* ``stationary_circle`` -- circle of radius rho_t = rho_0 + MA_t (null).
* ``gradual_drift``     -- radius additionally drifts by magnitude * (t/T),
  a Lipschitz-in-rescaled-time alternative.
* ``abrupt_bifurcation``-- one circle up to floor(change_u * T), then two
  circles of half radius with centers ``magnitude`` apart (a topological
  change: one loop becomes two).  ``magnitude = 0`` means no change and
  runs the exact stationary code path (null embedding).
* ``dependent_shift``   -- fixed-radius circle whose phase rotates by the
  MA process (a dependent null).

Everything is deterministic given the config: the innovation stream, the
evaluation grid, and the measurement noise are drawn in a fixed order from
one seeded generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import PointCloud

SCENARIOS = ("stationary_circle", "gradual_drift", "abrupt_bifurcation",
             "dependent_shift")
ANGLE_POLICIES = ("uniform_angles", "iid_uniform", "farthest_point")


@dataclass(frozen=True)
class ProcessConfig:
    scenario: str
    T: int
    n: int
    noise_sd: float = 0.0
    ma_weights: tuple = (1.0,)
    change_u: float = 0.5
    magnitude: float = 0.0
    seed: int = 0
    base_radius: float = 1.0
    angle_policy: str = "uniform_angles"

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise InputError(f"unknown scenario {self.scenario!r}")
        if self.T < 2:
            raise InputError(f"T must be >= 2, got {self.T}")
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if self.noise_sd < 0:
            raise InputError("noise_sd must be >= 0")
        w = tuple(float(x) for x in self.ma_weights)
        if not all(np.isfinite(w)):
            raise InputError("ma_weights must be finite")
        if not w:
            w = (0.0,)  # empty list: no stochastic component
        object.__setattr__(self, "ma_weights", w)
        if not 0.0 < self.change_u < 1.0:
            raise InputError(f"change_u must lie in (0, 1), got {self.change_u}")
        if self.magnitude < 0:
            raise InputError(f"magnitude must be >= 0, got {self.magnitude}")
        if not self.base_radius > 0:
            raise InputError("base_radius must be positive")
        if self.angle_policy not in ANGLE_POLICIES:
            raise InputError(f"unknown angle policy {self.angle_policy!r}")


def sample_evaluation_grid(n: int, policy: str = "uniform_angles",
                           seed: int | None = None,
                           rng: np.random.Generator | None = None) -> np.ndarray:
    """Evaluation angles m_1..m_n in [0, 2*pi) for the circle scenarios.

    ``farthest_point`` splits the largest remaining arc gap, realizing a
    greedy cover of the circle with arc covering radius <= 2*pi/n.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if policy == "uniform_angles":
        return 2.0 * np.pi * np.arange(n) / n
    if policy == "iid_uniform":
        if rng is None:
            rng = np.random.default_rng(0 if seed is None else seed)
        return rng.uniform(0.0, 2.0 * np.pi, size=n)
    if policy == "farthest_point":
        angles = [0.0]
        while len(angles) < n:
            pts = sorted(angles)
            gaps = [(pts[(i + 1) % len(pts)] - pts[i]) % (2.0 * np.pi) or 2.0 * np.pi
                    for i in range(len(pts))]
            i = int(np.argmax(gaps))
            angles.append((pts[i] + gaps[i] / 2.0) % (2.0 * np.pi))
        return np.array(angles)
    raise InputError(f"unknown angle policy {policy!r}")


def _latent(config: ProcessConfig):
    """Innovation-driven latent state, drawn in a fixed order."""
    rng = np.random.default_rng(config.seed)
    w = np.asarray(config.ma_weights)
    zeta = rng.standard_normal(config.T + w.size - 1)
    ma = np.convolve(zeta, w, mode="valid")  # ma[t-1] = sum_j w_j zeta_{t-j}
    angles = sample_evaluation_grid(config.n, config.angle_policy, rng=rng)
    if config.noise_sd > 0:
        noise = rng.standard_normal((config.T, config.n, 2)) * config.noise_sd
    else:
        noise = np.zeros((config.T, config.n, 2))
    return ma, angles, noise


def _circle(radius: float, angles: np.ndarray, center=(0.0, 0.0)) -> np.ndarray:
    pts = np.empty((angles.size, 2))
    pts[:, 0] = center[0] + radius * np.cos(angles)
    pts[:, 1] = center[1] + radius * np.sin(angles)
    return pts


def _cloud_at(config: ProcessConfig, t: int, u: float, ma, angles, noise):
    """Point cloud of X_t evaluated at rescaled time u (the auxiliary process)."""
    ma_t = ma[t - 1]
    sc = config.scenario
    if sc == "dependent_shift":
        pts = _circle(config.base_radius, angles + ma_t)
    else:
        rho = config.base_radius + ma_t
        if sc == "gradual_drift":
            rho = rho + config.magnitude * u
        if rho <= 0:
            raise InputError(
                f"latent radius {rho:.4g} <= 0 at t={t}; shrink ma_weights")
        if sc == "abrupt_bifurcation" and config.magnitude > 0 and u > config.change_u:
            half = config.magnitude / 2.0
            even, odd = angles[0::2], angles[1::2]
            pts = np.empty((config.n, 2))
            pts[0::2] = _circle(rho / 2.0, even, center=(-half, 0.0))
            pts[1::2] = _circle(rho / 2.0, odd, center=(half, 0.0))
        else:
            pts = _circle(rho, angles)
    return PointCloud(pts + noise[t - 1], time_index=t)


def generate_series(config: ProcessConfig):
    """The observed triangular-array path: clouds at u = t/T, t = 1..T.

    The abrupt scenario switches after t = floor(change_u * T).
    """
    ma, angles, noise = _latent(config)
    clouds = []
    k_star = int(np.floor(config.change_u * config.T))
    for t in range(1, config.T + 1):
        if config.scenario == "abrupt_bifurcation":
            # exact change index floor(change_u * T): post-change iff t > k*
            u = 1.0 if t > k_star else 0.0
        else:
            u = t / config.T
        clouds.append(_cloud_at(config, t, u, ma, angles, noise))
    return clouds


def generate_at(config: ProcessConfig, t: int, u: float) -> PointCloud:
    """Auxiliary stationary cloud X_t(u): same innovations as the series.

    For ``gradual_drift`` with shared seed, clouds at rescaled times u and v
    differ only by the radial drift, so their Hausdorff distance is exactly
    ``magnitude * |u - v|``.
    """
    if not 1 <= t <= config.T:
        raise InputError(f"t must lie in [1, {config.T}], got {t}")
    if not 0.0 <= u <= 1.0:
        raise InputError(f"u must lie in [0, 1], got {u}")
    ma, angles, noise = _latent(config)
    return _cloud_at(config, t, u, ma, angles, noise)
