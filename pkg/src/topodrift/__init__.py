"""topodrift: change detection for time series of point clouds.

Pipeline: point clouds -> Vietoris-Rips persistence barcodes -> pairwise
bottleneck distances -> indicator-kernel U-statistic processes ->
self-normalized test statistics calibrated against simulated Brownian
functionals.
"""

__version__ = "0.1.0"

from ._speed import HAVE_COMPILED, IMPLEMENTATION
from .ballvolume import BallVolumeCurve, correlation_dimension, empirical_ball_volume
from .diagrams import PersistenceDiagram
from .errors import (CacheVersionError, DegeneratePathError,
                     DegenerateStatisticError, DimensionMismatchError,
                     InputError, SchemaError, SimplexBudgetError,
                     TopodriftError)
from .geometry import (CoverReport, PointCloud, correspondence_distortion,
                       farthest_point_sample, greedy_cover, hausdorff_distance,
                       pairwise_distances)
from .kernelfield import KernelField, RadiusGrid, partial_sum_S, u_process
from .limits import (QuantileTable, brownian_path, build_table, cache_load,
                     cache_store, draw_dl, draw_dmax, draw_q)
from .metrics import (BarcodeDistanceMatrix, bottleneck, pairwise_bottleneck,
                      wasserstein_q)
from .pipeline import RunConfig, analyze_series
from .procgen import ProcessConfig, generate_at, generate_series, sample_evaluation_grid
from .rips import (Filtration, build_rips, compute_persistence,
                   connected_components_h0, rips_diagrams)
from .stats import (StatResult, TestReport, stat_dl, stat_dmax, stat_q,
                    var_v1v2, var_vl, var_vt)

__all__ = [name for name in dir() if not name.startswith("_")]
