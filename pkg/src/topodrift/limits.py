"""Monte-Carlo simulation of the pivotal limit laws and quantile tables.

Each statistic converges under the null to a functional of a standard
Brownian motion ``B`` built from ``f(u) = u B(u) - u^2 B(1)``:

* ``dmax``: sup |f| / sqrt(int f^2)
* ``dl``:   int f^2 / sqrt(int f^4)
* ``q``:    sup over the trimmed range of f(u)^2 / Vbar(u), where
  ``Vbar(u)`` is the forward/backward self-normalizer limit
  ``int_0^u (v B(v) - (v^2/u) B(u))^2 dv
  + int_u^1 (m(v) - ((1-v)/(1-u))^2 m(u))^2 dv`` with
  ``m(x) = B(1) + x B(x) - 2 x B(1)`` (the weak limit of the trailing
  square sums).  The kernel long-run scale cancels in every ratio, so the
  laws are parameter free.

Integrals use the left-endpoint rectangle rule on the simulation grid; all
three integrands vanish at both endpoints, so the rule choice is immaterial
at the boundary.  Draws are keyed per index so tables are reproducible and
order-independent under parallel evaluation.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (CacheVersionError, DegeneratePathError, InputError,
                     SchemaError)
from .stats import ALL_STATISTICS, STAT_Q, trimmed_k_range

TABLE_FORMAT_VERSION = 1
DEFAULT_MC_PATHS = 20_000
DEFAULT_MC_GRID = 1_000


def brownian_path(n_grid: int, rng: np.random.Generator) -> np.ndarray:
    """Standard Brownian motion on {0, 1/N, ..., 1}: B[0] = 0, iid increments
    N(0, 1/N)."""
    if n_grid < 2:
        raise InputError(f"n_grid must be >= 2, got {n_grid}")
    steps = rng.standard_normal(n_grid) / np.sqrt(n_grid)
    path = np.empty(n_grid + 1)
    path[0] = 0.0
    np.cumsum(steps, out=path[1:])
    return path


def _bridge_functional(path: np.ndarray) -> np.ndarray:
    """f(u) = u B(u) - u^2 B(1) on the path grid."""
    n = path.shape[0] - 1
    u = np.arange(n + 1) / n
    return u * path - u * u * path[-1]


def _check_path(path: np.ndarray) -> np.ndarray:
    path = np.asarray(path, dtype=np.float64)
    if path.ndim != 1 or path.shape[0] < 3:
        raise InputError("path must be a 1-D array with grid size N >= 2")
    if not np.any(path):
        raise DegeneratePathError("path is identically zero")
    return path


def draw_dmax(path: np.ndarray) -> float:
    """One draw of the sup-type limit from a Brownian path."""
    path = _check_path(path)
    f = _bridge_functional(path)
    n = f.shape[0] - 1
    denom_sq = np.mean(f[:n] ** 2)
    if denom_sq == 0.0:
        return float("inf")
    return float(np.abs(f).max() / np.sqrt(denom_sq))


def draw_dl(path: np.ndarray) -> float:
    """One draw of the integral-type limit."""
    path = _check_path(path)
    f = _bridge_functional(path)
    n = f.shape[0] - 1
    num = np.mean(f[:n] ** 2)
    den = np.sqrt(np.mean(f[:n] ** 4))
    if den == 0.0:
        return float("inf")
    return float(num / den)


def draw_q(path: np.ndarray, trim: float) -> float:
    """One draw of the trimmed sup of f(u)^2 / Vbar(u)."""
    path = _check_path(path)
    n = path.shape[0] - 1
    lo, hi = trimmed_k_range(n, trim)
    u = np.arange(n + 1) / n
    B1 = path[-1]
    a = u * path                     # v B(v)
    f = a - u * u * B1
    m = B1 + a - 2.0 * u * B1

    # prefix sums over j < i of: a^2, a v^2, v^4 (left rule on [0, u])
    pa = np.concatenate([[0.0], np.cumsum(a * a)])
    pav = np.concatenate([[0.0], np.cumsum(a * u * u)])
    pv4 = np.concatenate([[0.0], np.cumsum(u ** 4)])
    # suffix sums over j in [i, n-1] of: m^2, m w, w^2 with w = (1-v)^2
    w = (1.0 - u) ** 2
    sm2 = np.concatenate([np.cumsum((m * m)[:n][::-1])[::-1], [0.0, 0.0]])
    smw = np.concatenate([np.cumsum((m * w)[:n][::-1])[::-1], [0.0, 0.0]])
    sw2 = np.concatenate([np.cumsum((w * w)[:n][::-1])[::-1], [0.0, 0.0]])

    idx = np.arange(lo, hi + 1)
    ui, Bi, mi, wi = u[idx], path[idx], m[idx], w[idx]
    c1 = Bi / ui
    v1 = (pa[idx] - 2.0 * c1 * pav[idx] + c1 * c1 * pv4[idx]) / n
    c2 = mi / wi
    v2 = (sm2[idx] - 2.0 * c2 * smw[idx] + c2 * c2 * sw2[idx]) / n
    denom = v1 + v2
    ok = denom > 0.0
    if not np.any(ok):
        raise DegeneratePathError("self-normalizer vanished on the whole grid")
    return float(np.max(f[idx][ok] ** 2 / denom[ok]))


def _draw(statistic_id: str, path: np.ndarray, trim: float | None) -> float:
    if statistic_id == "dmax":
        return draw_dmax(path)
    if statistic_id == "dl":
        return draw_dl(path)
    if statistic_id == STAT_Q:
        if trim is None:
            raise InputError("the Q limit requires a trim value")
        return draw_q(path, trim)
    raise InputError(f"unknown statistic_id {statistic_id!r}")


def rng_for_draw(seed: int, index: int) -> np.random.Generator:
    """Independent, order-free RNG stream for draw ``index``."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(ss))


def simulate_draws(statistic_id: str, n_paths: int, n_grid: int, seed: int,
                   trim: float | None = None) -> np.ndarray:
    """M independent draws of a limit law; deterministic in (seed, M, N, trim)."""
    if statistic_id not in ALL_STATISTICS:
        raise InputError(f"unknown statistic_id {statistic_id!r}")
    draws = np.empty(n_paths)
    for i in range(n_paths):
        path = brownian_path(n_grid, rng_for_draw(seed, i))
        try:
            draws[i] = _draw(statistic_id, path, trim)
        except DegeneratePathError as exc:  # pragma: no cover - prob. zero
            raise DegeneratePathError(f"draw {i}: {exc}") from exc
    return draws


@dataclass
class QuantileTable:
    """Cached Monte-Carlo quantiles of one limit law."""

    statistic_id: str
    alphas: list
    quantiles: list
    mc_params: dict  # paths, grid, seed, trim
    format_version: int = TABLE_FORMAT_VERSION

    def __post_init__(self):
        if len(self.alphas) != len(self.quantiles):
            raise InputError("alphas and quantiles length mismatch")
        order = np.argsort(self.alphas)
        q = np.asarray(self.quantiles)[order]
        if np.any(np.diff(q) > 0):  # larger alpha => smaller quantile
            raise InputError("quantiles must be non-increasing in alpha")

    def quantile(self, alpha: float) -> float:
        for a, q in zip(self.alphas, self.quantiles):
            if a == alpha:
                return float(q)
        raise InputError(f"alpha {alpha} not tabulated (have {self.alphas})")

    def to_json_obj(self) -> dict:
        return {
            "format_version": self.format_version,
            "statistic_id": self.statistic_id,
            "alphas": list(self.alphas),
            "quantiles": [float(q) for q in self.quantiles],
            "mc_params": dict(self.mc_params),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "QuantileTable":
        missing = {"format_version", "statistic_id", "alphas", "quantiles",
                   "mc_params"} - set(obj)
        if missing:
            raise SchemaError(f"quantile table missing fields {sorted(missing)}")
        if obj["format_version"] != TABLE_FORMAT_VERSION:
            raise CacheVersionError(
                f"quantile table format_version {obj['format_version']} != "
                f"supported {TABLE_FORMAT_VERSION}")
        return cls(statistic_id=obj["statistic_id"], alphas=list(obj["alphas"]),
                   quantiles=list(obj["quantiles"]),
                   mc_params=dict(obj["mc_params"]),
                   format_version=obj["format_version"])


def build_table(statistic_id: str, n_paths: int, n_grid: int, seed: int,
                alphas, trim: float | None = None) -> QuantileTable:
    """Empirical (1-alpha) quantiles from M keyed draws.

    Deterministic given (seed, M, N, trim); draws are independent streams so
    the result does not depend on evaluation order.
    """
    if n_paths < 1000:
        raise InputError(f"n_paths must be >= 1000, got {n_paths}")
    if n_grid < 100:
        raise InputError(f"n_grid must be >= 100, got {n_grid}")
    alphas = [float(a) for a in alphas]
    if not alphas or not all(0.0 < a < 1.0 for a in alphas):
        raise InputError("alphas must be a non-empty list inside (0, 1)")
    draws = simulate_draws(statistic_id, n_paths, n_grid, seed, trim)
    quantiles = [float(np.quantile(draws, 1.0 - a)) for a in alphas]
    mc_params = {"paths": int(n_paths), "grid": int(n_grid), "seed": int(seed),
                 "trim": None if trim is None else float(trim)}
    return QuantileTable(statistic_id=statistic_id, alphas=alphas,
                         quantiles=quantiles, mc_params=mc_params)


def p_value_from_draws(draws: np.ndarray, value: float) -> float:
    """Monte-Carlo p-value P(limit >= value)."""
    return float(np.mean(draws >= value))


def _dump_json_bytes(obj: dict) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def cache_store(table: QuantileTable, path) -> None:
    """Write a table as canonical JSON (byte-stable for identical inputs)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(_dump_json_bytes(table.to_json_obj()))


def cache_load(path) -> QuantileTable:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: corrupt quantile cache: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: corrupt quantile cache (not an object)")
    return QuantileTable.from_json_obj(obj)


def default_cache_dir() -> Path:
    env = os.environ.get("TOPODRIFT_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "topodrift"


def table_cache_path(cache_dir, statistic_id: str, n_paths: int, n_grid: int,
                     seed: int, trim: float | None, alphas) -> Path:
    key = json.dumps([TABLE_FORMAT_VERSION, statistic_id, n_paths, n_grid,
                      seed, trim, sorted(float(a) for a in alphas)],
                     separators=(",", ":"))
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    return Path(cache_dir) / f"quantiles_{statistic_id}_{digest}.json"


def get_or_build_table(statistic_id: str, n_paths: int, n_grid: int, seed: int,
                       alphas, trim: float | None = None,
                       cache_dir=None) -> QuantileTable:
    """Load a cached table when present and matching, else build and store."""
    cache_dir = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = table_cache_path(cache_dir, statistic_id, n_paths, n_grid, seed,
                            trim, alphas)
    if path.exists():
        table = cache_load(path)
        params_match = (
            table.statistic_id == statistic_id
            and table.mc_params.get("paths") == n_paths
            and table.mc_params.get("grid") == n_grid
            and table.mc_params.get("seed") == seed
            and table.mc_params.get("trim") == (None if trim is None else float(trim))
        )
        if params_match:
            return table
    table = build_table(statistic_id, n_paths, n_grid, seed, alphas, trim)
    cache_store(table, path)
    return table
