"""Pure-Python implementations of the speed-critical kernels.

Selected at import time by :mod:`topodrift._speed` when the compiled
extension is unavailable (or disabled via ``TOPODRIFT_PURE_PYTHON=1``).
Must stay output-identical to :mod:`topodrift._kernels`.
"""

from __future__ import annotations

import numpy as np

IMPLEMENTATION = "python"


def _symdiff(a: list, b: list) -> list:
    """Symmetric difference of two ascending integer lists."""
    out = []
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        x, y = a[i], b[j]
        if x == y:
            i += 1
            j += 1
        elif x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            j += 1
    if i < na:
        out.extend(a[i:])
    if j < nb:
        out.extend(b[j:])
    return out


def reduce_boundary(entries: np.ndarray, offsets: np.ndarray,
                    n_rows: int = -1) -> np.ndarray:
    """Column reduction of a boundary matrix over the two-element field.

    ``entries[offsets[j]:offsets[j+1]]`` holds the ascending row indices of
    column ``j``; columns must be in filtration order.  Returns the pivot
    (largest remaining row index) per column, or -1 for columns that reduce
    to zero.  ``n_rows`` is accepted for signature parity with the compiled
    kernel and is not needed here.
    """
    n_cols = len(offsets) - 1
    pivots = np.full(n_cols, -1, dtype=np.int64)
    owner_of_pivot: dict[int, int] = {}
    stored: dict[int, list] = {}
    entries = np.asarray(entries)
    for j in range(n_cols):
        col = entries[offsets[j]:offsets[j + 1]].tolist()
        while col:
            p = col[-1]
            owner = owner_of_pivot.get(p)
            if owner is None:
                break
            col = _symdiff(col, stored[owner])
        if col:
            pivots[j] = col[-1]
            owner_of_pivot[col[-1]] = j
            stored[j] = col
    return pivots


def kuhn_cover(adj: np.ndarray, must: np.ndarray) -> bool:
    """Whether a bipartite matching covering all ``must`` rows exists.

    ``adj`` is a (n_rows, n_cols) boolean adjacency matrix; any column may be
    used by at most one row.  Standard augmenting-path (Kuhn) search started
    from the required rows only.
    """
    n_rows, n_cols = adj.shape
    match_col = np.full(n_cols, -1, dtype=np.int64)
    adj_lists = [np.nonzero(adj[r])[0] for r in range(n_rows)]

    def augment(r: int, visited: np.ndarray) -> bool:
        for c in adj_lists[r]:
            if visited[c]:
                continue
            visited[c] = True
            if match_col[c] < 0 or augment(int(match_col[c]), visited):
                match_col[c] = r
                return True
        return False

    for r in np.nonzero(must)[0]:
        visited = np.zeros(n_cols, dtype=bool)
        if not augment(int(r), visited):
            return False
    return True
