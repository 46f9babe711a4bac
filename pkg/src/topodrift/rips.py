"""Vietoris-Rips filtrations and persistent homology over the two-element field."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._speed import reduce_boundary
from .diagrams import PersistenceDiagram
from .errors import InputError, SimplexBudgetError
from .geometry import validate_distance_matrix

DEFAULT_SIMPLEX_BUDGET = 30_000_000


@dataclass
class Filtration:
    """A Rips filtration, stored per dimension.

    ``simplices[d]`` is a pair ``(verts, values)`` where ``verts`` is an
    ``(m_d, d+1)`` int32 array of strictly increasing vertex indices and
    ``values`` the filtration values, both sorted by ``(value, lexicographic
    vertices)``.  Concatenating dimensions in that order with ties broken by
    dimension yields a global ordering in which faces precede cofaces.
    """

    n_points: int
    max_dim: int
    r_max: float
    simplices: list

    def simplex_count(self) -> int:
        return sum(v.shape[0] for v, _ in self.simplices)

    def iter_simplices(self):
        """Yield ``(vertex_tuple, value)`` in global filtration order."""
        items = []
        for verts, vals in self.simplices:
            for row, val in zip(verts, vals):
                items.append((float(val), len(row), tuple(int(x) for x in row)))
        items.sort()
        for val, _, row in items:
            yield row, val


def _sorted_by_value_lex(verts: np.ndarray, values: np.ndarray):
    if verts.shape[0] == 0:
        return verts, values
    keys = tuple(verts[:, c] for c in range(verts.shape[1] - 1, -1, -1)) + (values,)
    order = np.lexsort(keys)
    return np.ascontiguousarray(verts[order]), np.ascontiguousarray(values[order])


def build_rips(D: np.ndarray, max_dim: int, r_max: float | None = None,
               budget: int = DEFAULT_SIMPLEX_BUDGET) -> Filtration:
    """Build the Rips filtration of a finite metric space.

    Simplices are enumerated up to dimension ``max_dim + 1`` (cofaces are
    needed to resolve deaths in dimension ``max_dim``).  A simplex enters at
    the maximum pairwise distance of its vertices; edges longer than
    ``r_max`` are excluded.  ``r_max`` defaults to the cloud diameter (full
    filtration); deaths beyond it appear as essential classes.

    Raises :class:`SimplexBudgetError` when the enumeration would exceed
    ``budget`` simplices.
    """
    D = validate_distance_matrix(D)
    n = D.shape[0]
    if max_dim < 0:
        raise InputError(f"max_dim must be >= 0, got {max_dim}")
    if r_max is None:
        finite = D[np.isfinite(D)]
        diam = float(finite.max()) if finite.size else 0.0
        r_max = diam if diam > 0 else 1.0
    if not r_max > 0:
        raise InputError(f"r_max must be positive, got {r_max}")

    simplices = [(np.arange(n, dtype=np.int32).reshape(-1, 1),
                  np.zeros(n, dtype=np.float64))]
    total = n
    if total > budget:
        raise SimplexBudgetError(
            f"{n} vertices exceed the simplex budget {budget}",
            n_points=n, dim=0, budget=budget)

    adj = (D <= r_max)
    np.fill_diagonal(adj, False)

    top = min(max_dim + 1, n - 1)
    for dim in range(1, top + 1):
        if dim == 1:
            iu, ju = np.triu_indices(n, 1)
            vals = D[iu, ju]
            keep = vals <= r_max
            verts = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int32)
            values = vals[keep]
        elif dim == 2:
            verts, values = _enumerate_triangles(D, adj, budget - total)
        else:
            verts, values = _extend_simplices(D, adj, simplices[dim - 1],
                                              budget - total)
        total += verts.shape[0]
        if total > budget:
            raise SimplexBudgetError(
                f"dimension-{dim} simplices push the count past the budget "
                f"{budget} (n={n})", n_points=n, dim=dim, budget=budget)
        verts, values = _sorted_by_value_lex(verts, values)
        simplices.append((verts, values))

    # pad dimensions with no simplices (small clouds)
    while len(simplices) < max_dim + 2:
        d = len(simplices)
        simplices.append((np.empty((0, d + 1), dtype=np.int32),
                          np.empty(0, dtype=np.float64)))

    return Filtration(n_points=n, max_dim=max_dim, r_max=float(r_max),
                      simplices=simplices)


def _enumerate_triangles(D, adj, remaining_budget):
    verts_parts, value_parts = [], []
    n = D.shape[0]
    count = 0
    for i in range(n - 2):
        nbrs = np.nonzero(adj[i, i + 1:])[0] + i + 1
        if nbrs.size < 2:
            continue
        sub = np.triu(adj[np.ix_(nbrs, nbrs)], 1)
        aa, bb = np.nonzero(sub)
        if aa.size == 0:
            continue
        j, k = nbrs[aa], nbrs[bb]
        count += j.size
        if count > remaining_budget:
            raise SimplexBudgetError(
                f"triangle enumeration exceeds the simplex budget",
                n_points=n, dim=2, budget=remaining_budget)
        tri = np.empty((j.size, 3), dtype=np.int32)
        tri[:, 0] = i
        tri[:, 1] = j
        tri[:, 2] = k
        verts_parts.append(tri)
        value_parts.append(np.maximum(np.maximum(D[i, j], D[i, k]), D[j, k]))
    if not verts_parts:
        return np.empty((0, 3), dtype=np.int32), np.empty(0, dtype=np.float64)
    return np.concatenate(verts_parts), np.concatenate(value_parts)


def _extend_simplices(D, adj, lower, remaining_budget):
    """Extend (d-1)-simplices by one vertex beyond their largest index."""
    lverts, lvals = lower
    d = lverts.shape[1]  # vertex count of the lower simplices
    rows, vals = [], []
    n = D.shape[0]
    count = 0
    for row, val in zip(lverts, lvals):
        last = row[-1]
        if last + 1 >= n:
            continue
        cand = np.nonzero(np.all(adj[row, last + 1:], axis=0))[0] + last + 1
        if cand.size == 0:
            continue
        count += cand.size
        if count > remaining_budget:
            raise SimplexBudgetError(
                f"dimension-{d} simplex enumeration exceeds the budget",
                n_points=n, dim=d, budget=remaining_budget)
        ext = np.empty((cand.size, d + 1), dtype=np.int32)
        ext[:, :d] = row
        ext[:, d] = cand
        rows.append(ext)
        vals.append(np.maximum(val, D[np.ix_(row, cand)].max(axis=0)))
    if not rows:
        return np.empty((0, d + 1), dtype=np.int32), np.empty(0, dtype=np.float64)
    return np.concatenate(rows), np.concatenate(vals)


class _UnionFind:
    __slots__ = ("parent", "size")

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, i):
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:  # path compression
            parent[i], i = root, parent[i]
        return root

    def union(self, i, j):
        """Merge the sets of i and j; returns False if already joined."""
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        return True


def _h0_from_edges(n, edge_values):
    """Dim-0 diagram and per-edge merge flags from sorted edges."""
    verts, values = edge_values
    uf = _UnionFind(n)
    merged = np.zeros(verts.shape[0], dtype=bool)
    deaths = []
    for idx in range(verts.shape[0]):
        if uf.union(int(verts[idx, 0]), int(verts[idx, 1])):
            merged[idx] = True
            deaths.append(values[idx])
    n_components = n - int(merged.sum())
    pairs = [[0.0, d] for d in deaths] + [[0.0, np.inf]] * n_components
    return PersistenceDiagram(0, np.array(pairs)), merged


def connected_components_h0(D: np.ndarray, r_max: float | None = None) -> PersistenceDiagram:
    """Dim-0 persistence via union-find (fast path).

    Output is identical to the dim-0 diagram of :func:`compute_persistence`.
    """
    D = validate_distance_matrix(D)
    n = D.shape[0]
    if r_max is None:
        finite = D[np.isfinite(D)]
        diam = float(finite.max()) if finite.size else 0.0
        r_max = diam if diam > 0 else 1.0
    iu, ju = np.triu_indices(n, 1)
    vals = D[iu, ju]
    keep = vals <= r_max
    verts = np.stack([iu[keep], ju[keep]], axis=1).astype(np.int32)
    verts, values = _sorted_by_value_lex(verts, vals[keep])
    diagram, _ = _h0_from_edges(n, (verts, values))
    return diagram


def _boundary_columns(row_simplices, col_simplices, n_points):
    """Row indices (ascending per column) of each column simplex's facets."""
    rverts, _ = row_simplices
    cverts, _ = col_simplices
    m_cols = cverts.shape[0]
    width = cverts.shape[1]
    if m_cols == 0:
        return (np.empty(0, dtype=np.int32),
                np.zeros(1, dtype=np.int64))
    if width == 3:  # triangles over edges: dense rank lookup
        rank = np.full((n_points, n_points), -1, dtype=np.int64)
        rank[rverts[:, 0], rverts[:, 1]] = np.arange(rverts.shape[0])
        faces = np.stack([
            rank[cverts[:, 0], cverts[:, 1]],
            rank[cverts[:, 0], cverts[:, 2]],
            rank[cverts[:, 1], cverts[:, 2]],
        ], axis=1)
    else:
        lookup = {tuple(int(x) for x in row): i for i, row in enumerate(rverts)}
        faces = np.empty((m_cols, width), dtype=np.int64)
        for i, row in enumerate(cverts):
            t = tuple(int(x) for x in row)
            for drop in range(width):
                faces[i, drop] = lookup[t[:drop] + t[drop + 1:]]
    faces.sort(axis=1)
    entries = np.ascontiguousarray(faces.reshape(-1).astype(np.int32))
    offsets = np.arange(m_cols + 1, dtype=np.int64) * width
    return entries, offsets


def compute_persistence(filtration: Filtration):
    """Persistence diagrams PH_k, k = 0..max_dim, by column reduction.

    Dimension 0 uses the union-find path; higher dimensions reduce the
    boundary of the (k+1)-simplices.  Classes alive at ``r_max`` are
    reported with death ``+inf``.  Zero-persistence pairs are dropped.
    """
    diagrams = []
    h0, merged = _h0_from_edges(filtration.n_points, filtration.simplices[1])
    diagrams.append(h0)

    positive = ~merged  # positivity of the current row dimension
    for k in range(1, filtration.max_dim + 1):
        rows = filtration.simplices[k]
        cols = filtration.simplices[k + 1]
        entries, offsets = _boundary_columns(rows, cols, filtration.n_points)
        pivots = reduce_boundary(entries, offsets, rows[0].shape[0])
        rvals, cvals = rows[1], cols[1]
        pairs = []
        paired = np.zeros(rows[0].shape[0], dtype=bool)
        hit = pivots >= 0
        for p, j in zip(pivots[hit], np.nonzero(hit)[0]):
            paired[p] = True
            if rvals[p] < cvals[j]:
                pairs.append([rvals[p], cvals[j]])
        for p in np.nonzero(positive & ~paired)[0]:
            pairs.append([rvals[p], np.inf])
        diagrams.append(PersistenceDiagram(k, np.array(pairs).reshape(-1, 2)))
        positive = ~hit  # column positivity feeds the next dimension

    return diagrams


def rips_diagrams(D: np.ndarray, max_dim: int, r_max: float | None = None,
                  budget: int = DEFAULT_SIMPLEX_BUDGET):
    """Convenience: Rips filtration + persistence in one call."""
    return compute_persistence(build_rips(D, max_dim, r_max=r_max, budget=budget))
