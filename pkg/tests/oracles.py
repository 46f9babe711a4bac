"""Naive reference implementations used as test oracles.

Everything here is deliberately independent of the package's optimized
paths: plain loops, subset enumeration, textbook global matrix reduction.
"""

import itertools

import numpy as np

from topodrift.diagrams import PersistenceDiagram


# -- geometry ---------------------------------------------------------------

def naive_distance_matrix(points):
    n = len(points)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            D[i, j] = np.sqrt(np.sum((points[i] - points[j]) ** 2))
    return D


def brute_hausdorff(A, B):
    def directed(P, Q):
        return max(min(np.sqrt(np.sum((p - q) ** 2)) for q in Q) for p in P)
    return max(directed(A, B), directed(B, A))


def brute_distortion(A, B, pairing):
    best = 0.0
    for (i, j) in pairing:
        for (i2, j2) in pairing:
            da = np.sqrt(np.sum((A[i] - A[i2]) ** 2))
            db = np.sqrt(np.sum((B[j] - B[j2]) ** 2))
            best = max(best, abs(da - db))
    return best


def optimal_cover_size(D, radius):
    """Smallest number of data-point-centered balls covering everything."""
    n = D.shape[0]
    masks = [sum(1 << j for j in range(n) if D[i, j] <= radius) for i in range(n)]
    full = (1 << n) - 1
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            acc = 0
            for i in subset:
                acc |= masks[i]
            if acc == full:
                return size
    return n


def optimal_kcenter_radius(D, k):
    n = D.shape[0]
    best = np.inf
    for subset in itertools.combinations(range(n), k):
        radius = D[list(subset)].min(axis=0).max()
        best = min(best, radius)
    return best


# -- persistence (textbook global reduction) --------------------------------

def full_reduction_diagrams(D, max_dim, r_max=None):
    """Global boundary-matrix reduction over GF(2), straight from the book."""
    n = D.shape[0]
    if r_max is None:
        r_max = D.max() if D.max() > 0 else 1.0
    simplices = []
    for dim in range(0, max_dim + 2):
        for verts in itertools.combinations(range(n), dim + 1):
            if dim == 0:
                value = 0.0
            else:
                value = max(D[a, b] for a, b in itertools.combinations(verts, 2))
            if value <= r_max:
                simplices.append((value, dim, verts))
    simplices.sort()
    index = {s[2]: i for i, s in enumerate(simplices)}
    m = len(simplices)
    columns = []
    for value, dim, verts in simplices:
        if dim == 0:
            columns.append(set())
        else:
            columns.append({index[verts[:i] + verts[i + 1:]]
                            for i in range(len(verts))})
    low_of = {}
    pairs = []
    for j in range(m):
        col = columns[j]
        while col:
            low = max(col)
            if low not in low_of:
                break
            col ^= columns[low_of[low]]
        columns[j] = col
        if col:
            low_of[max(col)] = j
            pairs.append((max(col), j))
    killed = {i for i, _ in pairs} | {j for _, j in pairs}
    by_dim = {k: [] for k in range(max_dim + 1)}
    for i, j in pairs:
        value_i, dim_i, _ = simplices[i]
        value_j = simplices[j][0]
        if dim_i <= max_dim and value_i < value_j:
            by_dim[dim_i].append([value_i, value_j])
    for i, (value, dim, _) in enumerate(simplices):
        if dim <= max_dim and i not in killed:
            by_dim[dim].append([value, np.inf])
    return [PersistenceDiagram(k, np.array(by_dim[k]).reshape(-1, 2))
            for k in range(max_dim + 1)]


# -- diagram distances ------------------------------------------------------

def exhaustive_bottleneck(d1, d2):
    """Min over all partial matchings of the max cost; diagonal allowed."""
    e1, e2 = d1.essential_births, d2.essential_births
    if e1.size != e2.size:
        return np.inf
    ess = float(np.max(np.abs(e1 - e2))) if e1.size else 0.0
    P, Q = d1.finite, d2.finite
    half1 = [(d - b) / 2.0 for b, d in P]
    half2 = [(d - b) / 2.0 for b, d in Q]
    cost = [[max(abs(P[i, 0] - Q[j, 0]), abs(P[i, 1] - Q[j, 1]))
             for j in range(len(Q))] for i in range(len(P))]
    best = [np.inf]

    def rec(i, used, cur):
        if cur >= best[0]:
            return
        if i == len(P):
            rest = cur
            for j in range(len(Q)):
                if j not in used:
                    rest = max(rest, half2[j])
                    if rest >= best[0]:
                        return
            best[0] = rest
            return
        rec(i + 1, used, max(cur, half1[i]))  # send i to the diagonal
        for j in range(len(Q)):
            if j not in used:
                rec(i + 1, used | {j}, max(cur, cost[i][j]))

    rec(0, frozenset(), 0.0)
    return max(ess, best[0])


def exhaustive_wasserstein(d1, d2, q):
    e1, e2 = d1.essential_births, d2.essential_births
    if e1.size != e2.size:
        return np.inf
    ess = float(np.sum(np.abs(e1 - e2) ** q)) if e1.size else 0.0
    P, Q = d1.finite, d2.finite
    n1, n2 = len(P), len(Q)
    size = n1 + n2
    M = np.zeros((size, size))
    for i in range(n1):
        for j in range(n2):
            M[i, j] = max(abs(P[i, 0] - Q[j, 0]), abs(P[i, 1] - Q[j, 1])) ** q
        M[i, n2:] = ((P[i, 1] - P[i, 0]) / 2.0) ** q
    for j in range(n2):
        M[n1:, j] = ((Q[j, 1] - Q[j, 0]) / 2.0) ** q
    best = np.inf
    for perm in itertools.permutations(range(size)):
        total = sum(M[i, perm[i]] for i in range(size))
        best = min(best, total)
    return (best + ess) ** (1.0 / q)


# -- U-statistic engine (direct sums over the kernel matrix) ----------------

def kernel_matrix(dB, r):
    return (dB <= r).astype(np.int64)


def _square_sum(dB, k, r):
    h = kernel_matrix(dB, r)
    total = 0
    for t in range(k):
        for s in range(k):
            total += h[t, s]
    return total


def oracle_S(dB, u, r):
    T = dB.shape[0]
    k = int(np.floor(u * T))
    return _square_sum(dB, k, r) / float(T) ** 2


def oracle_U(dB, u, r):
    T = dB.shape[0]
    k = int(np.floor(u * T))
    uk = k / T
    s_k = _square_sum(dB, k, r) / float(T) ** 2
    s_1 = _square_sum(dB, T, r) / float(T) ** 2
    return s_k - uk * uk * s_1


def oracle_vt(dB, r):
    T = dB.shape[0]
    h = kernel_matrix(dB, r).astype(np.float64)
    hbar = h.sum() / float(T) ** 2
    g = h - hbar
    total = 0.0
    for k in range(1, T + 1):
        inner = g[:k, :k].sum()
        total += inner * inner / float(T) ** 3
    return total / T


def oracle_vl(dB, grid_values, r_cal):
    T = dB.shape[0]
    R = len(grid_values)
    total = 0.0
    for r in grid_values:
        h = kernel_matrix(dB, r).astype(np.float64)
        hbar = h.sum() / float(T) ** 2
        g = h - hbar
        acc = 0.0
        for k in range(1, T + 1):
            inner = g[:k, :k].sum()
            acc += inner ** 4 / float(T) ** 6
        total += np.sqrt(acc / T)
    return r_cal / R * total


def oracle_v1v2(dB, k, r):
    # scale factors written as (i^2 * block) / k^2: exact arithmetic makes the
    # contrasts vanish for constant kernels, and this evaluation order keeps
    # that cancellation exact in floats too
    T = dB.shape[0]
    h = kernel_matrix(dB, r).astype(np.float64)
    v1 = 0.0
    block_fwd = h[:k, :k].sum()
    for i in range(1, k + 1):
        inner = h[:i, :i].sum() - i * i * block_fwd / (k * k)
        v1 += inner * inner
    v2 = 0.0
    block_bwd = h[k:, k:].sum()
    for i in range(k + 1, T + 1):
        inner = h[i:, i:].sum() - (T - i) ** 2 * block_bwd / ((T - k) * (T - k))
        v2 += inner * inner
    return v1 / float(T) ** 4, v2 / float(T) ** 4


def reference_dmax(dB, grid_values):
    """No-prefix reference implementation of the sup statistic."""
    T = dB.shape[0]
    vals = []
    for r in grid_values:
        vt = oracle_vt(dB, r)
        if vt == 0.0:
            continue
        sup_u = max(abs(oracle_U(dB, k / T, r)) for k in range(1, T + 1))
        vals.append(np.sqrt(T) * sup_u / np.sqrt(vt))
    if not vals:
        raise ZeroDivisionError("all radii degenerate")
    return max(vals)


def reference_dl(dB, grid_values, r_cal):
    T = dB.shape[0]
    R = len(grid_values)
    num = 0.0
    for r in grid_values:
        for k in range(1, T + 1):
            num += oracle_U(dB, k / T, r) ** 2
    num *= r_cal / R
    den = oracle_vl(dB, grid_values, r_cal)
    return num / den


def reference_q(dB, grid_values, trim):
    T = dB.shape[0]
    lo = int(np.ceil(trim * T - 1e-9))
    hi = int(np.floor((1 - trim) * T + 1e-9))
    best = -np.inf
    for r in grid_values:
        for k in range(max(lo, 1), min(hi, T - 1) + 1):
            v1, v2 = oracle_v1v2(dB, k, r)
            if v1 + v2 <= 0:
                continue
            best = max(best, T * oracle_U(dB, k / T, r) ** 2 / (v1 + v2))
    return best


def random_diagram(rng, max_points=6, dim=1, essential=0):
    m = rng.integers(0, max_points + 1)
    births = rng.uniform(0, 2, size=m)
    pers = rng.uniform(0.01, 2, size=m)
    pairs = np.column_stack([births, births + pers])
    if essential:
        ess = np.column_stack([rng.uniform(0, 2, size=essential),
                               np.full(essential, np.inf)])
        pairs = np.vstack([pairs, ess]) if m else ess
    return PersistenceDiagram(dim, pairs)
