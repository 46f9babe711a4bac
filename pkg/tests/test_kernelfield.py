import numpy as np
import pytest

import oracles
from topodrift import InputError, KernelField, RadiusGrid, partial_sum_S, u_process
from topodrift.metrics import BarcodeDistanceMatrix


def random_field(rng, T=None, R=None, with_inf=False):
    T = T or int(rng.integers(3, 20))
    D = rng.uniform(0.05, 2.0, size=(T, T))
    D = np.triu(D, 1)
    D = D + D.T
    if with_inf:
        i, j = rng.integers(0, T, size=2)
        if i != j:
            D[i, j] = D[j, i] = np.inf
    grid = RadiusGrid.default(D, count=R)
    return D, KernelField.build(D, grid=grid)


def test_grid_defaults():
    rng = np.random.default_rng(1)
    D, field = random_field(rng, T=12)
    finite_max = D[np.isfinite(D)].max()
    assert field.grid.r_max == finite_max
    assert field.grid.count == 12  # min(T, 100)
    assert field.grid.values[-1] == finite_max


def test_grid_validation():
    with pytest.raises(InputError):
        RadiusGrid(r_max=1.0, values=np.array([0.5, 0.5]))
    with pytest.raises(InputError):
        RadiusGrid(r_max=1.0, values=np.array([0.0, 0.5]))
    with pytest.raises(InputError):
        RadiusGrid(r_max=1.0, values=np.array([0.5, 1.5]))
    with pytest.raises(InputError):
        RadiusGrid.default(np.zeros((3, 3)))  # no positive finite distance


def test_partial_sum_trivials():
    rng = np.random.default_rng(2)
    D, field = random_field(rng, T=9)
    r = field.grid.values[3]
    assert partial_sum_S(field, 0.0, r) == 0.0
    assert partial_sum_S(field, 1.0, field.grid.r_max) == 1.0  # all indicators 1


def test_partial_sum_matches_double_loop_exactly():
    rng = np.random.default_rng(3)
    for _ in range(8):
        D, field = random_field(rng)
        for _ in range(6):
            u = float(rng.uniform(0, 1))
            r = float(rng.choice(np.concatenate([field.grid.values,
                                                 rng.uniform(0, 2.2, 3)])))
            assert partial_sum_S(field, u, r) == oracles.oracle_S(D, u, r)


def test_u_process_identities_and_oracle():
    rng = np.random.default_rng(4)
    D, field = random_field(rng, T=14)
    for r in field.grid.values[::3]:
        assert u_process(field, 0.0, r) == 0.0
        assert u_process(field, 1.0, r) == 0.0
        for u in rng.uniform(0, 1, size=5):
            assert u_process(field, float(u), r) == oracles.oracle_U(D, float(u), r)


def test_u_matrix_matches_oracle_composition_bitwise():
    rng = np.random.default_rng(5)
    D, field = random_field(rng, T=17, R=9)
    U = field.u_matrix()
    T = field.T
    for j, r in enumerate(field.grid.values):
        for k in range(1, T + 1):
            assert U[j, k - 1] == oracles.oracle_U(D, k / T, r)


def test_monotonicity_in_u_and_r():
    rng = np.random.default_rng(6)
    D, field = random_field(rng, T=15)
    S = field.pair_counts  # integer counts: monotone in both axes
    assert np.all(np.diff(S, axis=0) >= 0)  # increasing radius
    assert np.all(np.diff(S, axis=1) >= 0)  # increasing k


def test_infinite_distances_never_counted():
    rng = np.random.default_rng(7)
    D, field = random_field(rng, T=10, with_inf=True)
    assert field.n_infinite == 1
    i, j = np.argwhere(np.isinf(D))[0]
    # the infinite pair contributes 0 at every grid radius
    for r in field.grid.values:
        assert field.kernel_value(int(i) + 1, int(j) + 1, r) == 0


def test_kernel_diagonal_is_one():
    rng = np.random.default_rng(8)
    D, field = random_field(rng, T=6)
    for t in range(1, 7):
        assert field.kernel_value(t, t, 0.0) == 1


def test_build_from_barcode_matrix_carries_dim():
    rng = np.random.default_rng(9)
    D, _ = random_field(rng, T=5)
    m = BarcodeDistanceMatrix(D, homology_dim=1)
    field = KernelField.build(m)
    assert field.homology_dim == 1


def test_prefix_fuzz_against_naive():
    rng = np.random.default_rng(10)
    D, field = random_field(rng, T=20, R=7)
    T = field.T
    for j, r in enumerate(field.grid.values):
        h = (D <= r)
        np.fill_diagonal(h, True)
        for k in (1, 3, T // 2, T):
            assert field.pair_counts[j, k - 1] == int(h[:k, :k].sum())
        for i in (1, 2, T - 1, T):
            assert field.col_counts[j, i - 1] == int(h[:, :i].sum())


def test_t1_rejected():
    with pytest.raises(InputError):
        KernelField.build(np.zeros((1, 1)))
