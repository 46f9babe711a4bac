import numpy as np
import pytest

from topodrift import (InputError, KernelField, PointCloud,
                       correlation_dimension, empirical_ball_volume,
                       pairwise_distances)
from topodrift.ballvolume import BallVolumeCurve, default_fit_range
from topodrift.kernelfield import partial_sum_S


def test_step_function_for_equidistant_points():
    T = 6
    D = np.ones((T, T)) - np.eye(T)
    curve = empirical_ball_volume(D, [0.5, 0.999, 1.0, 1.5])
    assert curve.values.tolist() == [0.0, 0.0, 1.0, 1.0]


def test_zero_radius_with_distinct_points():
    rng = np.random.default_rng(1)
    D = pairwise_distances(PointCloud(rng.normal(size=(8, 2))))
    curve = empirical_ball_volume(D, [0.0, 1e-9])
    assert curve.values[0] == 0.0


def test_matches_double_loop_exactly():
    rng = np.random.default_rng(2)
    for _ in range(10):
        T = int(rng.integers(2, 15))
        D = rng.uniform(0, 2, size=(T, T))
        D = np.triu(D, 1)
        D = D + D.T
        radii = np.sort(rng.uniform(0, 2.2, size=6))
        radii = np.unique(radii)
        curve = empirical_ball_volume(D, radii)
        for r, v in zip(radii, curve.values):
            count = sum(1 for t in range(T) for s in range(T)
                        if t != s and D[t, s] <= r)
            assert v == count / (T * (T - 1))


def test_identity_with_partial_sum_process():
    # psi_hat(r) = (T * S_T(1, r) - 1) / (T - 1): U- vs V-statistic conversion.
    # The identity is exact on the integer counts (off-diagonal = total - T);
    # the float forms agree to a unit in the last place.
    from fractions import Fraction

    rng = np.random.default_rng(3)
    T = 12
    D = rng.uniform(0.1, 2, size=(T, T))
    D = np.triu(D, 1)
    D = D + D.T
    field = KernelField.build(D)
    curve = empirical_ball_volume(D, field.grid.values, basis="barcode_distance")
    for j, (r, v) in enumerate(zip(field.grid.values, curve.values)):
        total = int(field.pair_counts[j, T - 1])  # V-statistic count (diagonal in)
        off = round(v * T * (T - 1))              # U-statistic count
        assert off == total - T                   # exact integer identity
        assert Fraction(off, T * (T - 1)) == \
            (T * Fraction(total, T * T) - 1) / (T - 1)
        s1 = partial_sum_S(field, 1.0, r)
        assert v == pytest.approx((T * s1 - 1.0) / (T - 1), rel=1e-15)


def test_monotone_and_bounded():
    rng = np.random.default_rng(4)
    D = pairwise_distances(PointCloud(rng.normal(size=(20, 3))))
    radii = np.linspace(0.01, 5, 40)
    curve = empirical_ball_volume(D, radii)
    assert np.all(np.diff(curve.values) >= 0)
    assert curve.values[0] >= 0 and curve.values[-1] <= 1


def test_input_errors():
    with pytest.raises(InputError):
        empirical_ball_volume(np.zeros((1, 1)), [0.1])
    with pytest.raises(InputError):
        BallVolumeCurve(radii=np.array([0.2, 0.1]), values=np.array([0.1, 0.2]))


def test_slope_exact_power_law():
    radii = np.linspace(0.1, 0.9, 12)
    curve = BallVolumeCurve(radii=radii, values=radii ** 2)
    slope, stderr = correlation_dimension(curve, (0.05, 1.0))
    assert slope == pytest.approx(2.0, abs=1e-9)
    assert stderr == pytest.approx(0.0, abs=1e-9)


def test_slope_constant_curve():
    radii = np.linspace(0.1, 0.9, 10)
    curve = BallVolumeCurve(radii=radii, values=np.full(10, 0.5))
    slope, _ = correlation_dimension(curve, (0.05, 1.0))
    assert slope == pytest.approx(0.0, abs=1e-12)


def test_slope_needs_three_usable_radii():
    curve = BallVolumeCurve(radii=np.array([0.1, 0.2, 0.3]),
                            values=np.array([0.0, 0.0, 0.5]))
    with pytest.raises(InputError):
        correlation_dimension(curve, (0.05, 0.4))


def test_default_fit_range_percentiles():
    rng = np.random.default_rng(5)
    D = pairwise_distances(PointCloud(rng.normal(size=(30, 2))))
    lo, hi = default_fit_range(D)
    off = D[~np.eye(30, dtype=bool)]
    assert lo == pytest.approx(np.percentile(off[off > 0], 5))
    assert hi == pytest.approx(np.percentile(off[off > 0], 50))
