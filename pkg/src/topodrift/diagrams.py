"""Persistence diagrams and their JSON serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, SchemaError

DIAGRAM_FORMAT_VERSION = 1


@dataclass
class PersistenceDiagram:
    """Multiset of (birth, death) pairs in one homology dimension.

    Deaths may be ``+inf`` (essential classes).  Zero-length pairs are not
    stored; constructors drop them.
    """

    homology_dim: int
    pairs: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=np.float64).reshape(-1, 2)
        if arr.size:
            if np.any(np.isnan(arr)):
                raise InputError("diagram contains NaN")
            if np.any(arr[:, 0] > arr[:, 1]):
                raise InputError("diagram has birth > death")
            if np.any(arr[:, 0] < 0):
                raise InputError("diagram has negative birth")
            arr = arr[arr[:, 0] < arr[:, 1]]  # drop zero-persistence pairs
        if self.homology_dim < 0:
            raise InputError("homology_dim must be >= 0")
        # canonical order: by (birth, death), inf last
        if arr.size:
            arr = arr[np.lexsort((arr[:, 1], arr[:, 0]))]
        self.pairs = arr

    @property
    def births(self) -> np.ndarray:
        return self.pairs[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self.pairs[:, 1]

    @property
    def finite(self) -> np.ndarray:
        """The finite (non-essential) pairs, shape (m, 2)."""
        return self.pairs[np.isfinite(self.pairs[:, 1])]

    @property
    def essential_births(self) -> np.ndarray:
        """Births of essential classes (death = +inf), sorted."""
        return np.sort(self.pairs[~np.isfinite(self.pairs[:, 1]), 0])

    def persistence(self) -> np.ndarray:
        return self.deaths - self.births

    def __len__(self) -> int:
        return self.pairs.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return (self.homology_dim == other.homology_dim
                and self.pairs.shape == other.pairs.shape
                and bool(np.array_equal(self.pairs, other.pairs)))

    def to_dict(self) -> dict:
        return {
            "dim": self.homology_dim,
            "pairs": [[b, None if np.isinf(d) else d] for b, d in self.pairs],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PersistenceDiagram":
        try:
            dim = int(obj["dim"])
            pairs = [[b, np.inf if d is None else d] for b, d in obj["pairs"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed diagram object: {exc}") from exc
        return cls(dim, np.array(pairs, dtype=np.float64).reshape(-1, 2))


def diagrams_to_json_obj(diagrams) -> dict:
    return {
        "format_version": DIAGRAM_FORMAT_VERSION,
        "diagrams": [d.to_dict() for d in diagrams],
    }


def diagrams_from_json_obj(obj: dict):
    if obj.get("format_version") != DIAGRAM_FORMAT_VERSION:
        raise SchemaError(
            f"unsupported diagram format_version {obj.get('format_version')!r}")
    return [PersistenceDiagram.from_dict(d) for d in obj["diagrams"]]
