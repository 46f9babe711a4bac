"""End-to-end orchestration: series -> diagrams -> kernel field -> decisions.

The full report content is a pure function of (input series bytes, run
configuration); worker counts only change wall time, never results.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import limits
from .errors import InputError
from .geometry import pairwise_distances
from .ingest import REPORT_FORMAT_VERSION
from .kernelfield import KernelField
from .metrics import pairwise_bottleneck
from .rips import DEFAULT_SIMPLEX_BUDGET, rips_diagrams
from .stats import (ALL_STATISTICS, DEFAULT_TRIM, STAT_DL, STAT_DMAX, STAT_Q,
                    TestReport, stat_dl, stat_dmax, stat_q)


@dataclass
class RunConfig:
    """Everything `analyze` needs beyond the input series."""

    homology_dim: int = 1
    r_max: float | None = None          # filtration cap (None: cloud diameter)
    grid_count: int | None = None       # radius-grid size R (None: min(T, 100))
    grid_r_max: float | None = None     # kernel radius cap (None: max finite d_B)
    statistics: tuple = ALL_STATISTICS
    alpha: float = 0.05
    trim: float = DEFAULT_TRIM
    mc_paths: int = limits.DEFAULT_MC_PATHS
    mc_grid: int = limits.DEFAULT_MC_GRID
    seed: int = 0
    jobs: int = 1
    skip_degenerate: bool = True
    budget: int = DEFAULT_SIMPLEX_BUDGET
    dump_surface: str | None = None     # optional CSV of the (u, r) surface
    extra_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.homology_dim < 0:
            raise InputError("homology_dim must be >= 0")
        stats = tuple(self.statistics)
        if not stats or any(s not in ALL_STATISTICS for s in stats):
            raise InputError(
                f"statistics must be a non-empty subset of {ALL_STATISTICS}")
        self.statistics = stats
        if self.jobs < 1:
            raise InputError("jobs must be >= 1")

    def echo(self) -> dict:
        return {
            "homology_dim": self.homology_dim,
            "r_max": self.r_max,
            "grid_count": self.grid_count,
            "grid_r_max": self.grid_r_max,
            "statistics": list(self.statistics),
            "alpha": self.alpha,
            "trim": self.trim,
            "mc_paths": self.mc_paths,
            "mc_grid": self.mc_grid,
            "seed": self.seed,
            "skip_degenerate": self.skip_degenerate,
            "budget": self.budget,
            **self.extra_echo,
        }


def _diagram_worker(args):
    points, k, r_max, budget = args
    D = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    np.fill_diagonal(D, 0.0)
    return rips_diagrams(D, k, r_max=r_max, budget=budget)


def diagrams_for_series(series, homology_dim: int, r_max: float | None = None,
                        budget: int = DEFAULT_SIMPLEX_BUDGET, jobs: int = 1):
    """Diagram of dimension ``homology_dim`` for every cloud (parallel map)."""
    payload = [(c.points, homology_dim, r_max, budget) for c in series]
    if jobs > 1 and len(series) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            all_dims = list(pool.map(_diagram_worker, payload, chunksize=4))
    else:
        all_dims = [_diagram_worker(p) for p in payload]
    return [dims[homology_dim] for dims in all_dims]


def kernel_field_for_series(series, cfg: RunConfig):
    """Series -> diagrams -> pairwise bottleneck -> KernelField."""
    if len(series) < 2:
        raise InputError(f"analysis needs T >= 2 clouds, got {len(series)}")
    for cloud in series:
        pairwise_distances(cloud)  # validates coordinates early
    diagrams = diagrams_for_series(series, cfg.homology_dim, cfg.r_max,
                                   cfg.budget, cfg.jobs)
    matrix = pairwise_bottleneck(diagrams, jobs=cfg.jobs)
    field_ = KernelField.build(matrix, grid_count=cfg.grid_count,
                               grid_r_max=cfg.grid_r_max)
    return diagrams, matrix, field_


_STAT_FNS = {
    STAT_DMAX: lambda f, cfg: stat_dmax(f, skip_degenerate=cfg.skip_degenerate),
    STAT_DL: lambda f, cfg: stat_dl(f),
    STAT_Q: lambda f, cfg: stat_q(f, trim=cfg.trim,
                                  skip_degenerate=cfg.skip_degenerate),
}


def decide(field_, cfg: RunConfig, cache_dir=None):
    """Evaluate the selected statistics and compare to simulated quantiles."""
    reports = []
    for stat_id in cfg.statistics:
        result = _STAT_FNS[stat_id](field_, cfg)
        trim = cfg.trim if stat_id == STAT_Q else None
        table = limits.get_or_build_table(
            stat_id, cfg.mc_paths, cfg.mc_grid, cfg.seed,
            alphas=[cfg.alpha], trim=trim, cache_dir=cache_dir)
        quantile = table.quantile(cfg.alpha)
        draws = limits.simulate_draws(stat_id, cfg.mc_paths, cfg.mc_grid,
                                      cfg.seed, trim)
        p_value = limits.p_value_from_draws(draws, result.value)
        reports.append(TestReport(
            statistic_id=stat_id,
            value=result.value,
            quantile_used=quantile,
            alpha=cfg.alpha,
            p_value_mc=p_value,
            reject=result.value > quantile,
            trim=trim,
            mc_params=dict(table.mc_params),
            diagnostics={
                "degenerate_radius_indices": result.degenerate_radius_indices,
                "argmax": result.argmax,
            },
        ))
    return reports


def surface_csv(field_, path) -> None:
    """Dump the (u, r, U_T) surface for external plotting."""
    U = field_.u_matrix()
    T = field_.T
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# topodrift-u-surface 1\n")
        fh.write("u,r,U\n")
        for j, r in enumerate(field_.grid.values):
            for k in range(1, T + 1):
                fh.write(f"{format(k / T, '.17g')},{format(r, '.17g')},"
                         f"{format(U[j, k - 1], '.17g')}\n")


def analyze_series(series, cfg: RunConfig, cache_dir=None) -> dict:
    """Full pipeline; returns the report object (see ingest.save_report)."""
    diagrams, matrix, field_ = kernel_field_for_series(series, cfg)
    reports = decide(field_, cfg, cache_dir=cache_dir)
    if cfg.dump_surface:
        surface_csv(field_, cfg.dump_surface)
    T = field_.T
    return {
        "format_version": REPORT_FORMAT_VERSION,
        "statistics": [r.to_dict() for r in reports],
        "radius_grid": {
            "r_max": field_.grid.r_max,
            "values": [float(v) for v in field_.grid.values],
        },
        "u_grid": [k / T for k in range(1, T + 1)],
        "mc_params": {"paths": cfg.mc_paths, "grid": cfg.mc_grid,
                      "seed": cfg.seed, "trim": cfg.trim},
        "config": cfg.echo(),
        "diagnostics": {
            "T": T,
            "n_infinite_distances": field_.n_infinite,
            "diagram_sizes": [len(d) for d in diagrams],
        },
    }
