"""Ingestion and serialization of series, diagrams, and reports.

Reals are written as decimal text with 17 significant digits, which
round-trips 64-bit floats exactly; ``inf`` encodes +infinity in CSV and
``null`` encodes it in JSON.  Every format carries a version marker.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, SchemaError
from .geometry import PointCloud

SERIES_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

_CSV_NAME = re.compile(r"^t_(\d+)\.csv$")


def format_float(x: float) -> str:
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


@dataclass
class SeriesManifest:
    format: str
    T: int
    point_counts: list
    ambient_dim: int
    source_paths: list
    checksum: str

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "T": self.T,
            "point_counts": list(self.point_counts),
            "ambient_dim": self.ambient_dim,
            "source_paths": list(self.source_paths),
            "checksum": self.checksum,
        }


def _checksum(chunks) -> str:
    h = hashlib.sha256()
    for chunk in chunks:
        h.update(chunk)
    return h.hexdigest()


def save_series(series, path, fmt: str = "csv_dir") -> SeriesManifest:
    """Write a point-cloud series; returns the manifest of what was written."""
    series = list(series)
    if not series:
        raise InputError("empty series")
    path = Path(path)
    if fmt == "csv_dir":
        path.mkdir(parents=True, exist_ok=True)
        paths = []
        for cloud in series:
            p = path / f"t_{cloud.time_index}.csv"
            lines = [f"# topodrift-series {SERIES_FORMAT_VERSION}"]
            lines += [",".join(format_float(x) for x in row)
                      for row in cloud.points]
            p.write_text("\n".join(lines) + "\n", encoding="utf-8")
            paths.append(str(p))
    elif fmt == "jsonl":
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [json.dumps({"format_version": SERIES_FORMAT_VERSION})]
        for cloud in series:
            pts = [[float(x) for x in row] for row in cloud.points]
            lines.append(json.dumps({"t": cloud.time_index, "points": pts}))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths = [str(path)]
    else:
        raise InputError(f"unknown series format {fmt!r}")
    _, manifest = load_series(path, fmt=fmt)
    return manifest


def _parse_csv_cloud(p: Path, t: int) -> np.ndarray:
    rows = []
    width = None
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        toks = line.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise InputError(f"{p}:{lineno}: ragged row ({len(toks)} vs {width} columns)")
        try:
            row = [float(tok) for tok in toks]
        except ValueError as exc:
            raise InputError(f"{p}:{lineno}: {exc}") from exc
        if not all(np.isfinite(row)):
            raise InputError(f"{p}:{lineno}: non-finite coordinate")
        rows.append(row)
    if not rows:
        raise InputError(f"{p}: no points for time step {t}")
    return np.array(rows, dtype=np.float64)


def load_series(path, fmt: str | None = None):
    """Load a series; returns ``(clouds, manifest)``.

    Times must be contiguous from 1.  Errors carry file/line positions.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv_dir" if path.is_dir() else "jsonl"
    if fmt == "csv_dir":
        if not path.is_dir():
            raise InputError(f"{path}: not a directory")
        indexed = {}
        for p in sorted(path.iterdir()):
            m = _CSV_NAME.match(p.name)
            if m:
                indexed[int(m.group(1))] = p
        if not indexed:
            raise InputError(f"{path}: no time steps (no t_<index>.csv files)")
        T = max(indexed)
        missing = sorted(set(range(1, T + 1)) - set(indexed))
        if missing:
            raise InputError(f"{path}: missing time indices {missing}")
        clouds, raw = [], []
        for t in range(1, T + 1):
            pts = _parse_csv_cloud(indexed[t], t)
            clouds.append(PointCloud(pts, time_index=t))
            raw.append(indexed[t].read_bytes())
        source_paths = [str(indexed[t]) for t in range(1, T + 1)]
    elif fmt == "jsonl":
        if not path.is_file():
            raise InputError(f"{path}: not a file")
        by_t = {}
        raw = [path.read_bytes()]
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            if "format_version" in obj and "t" not in obj:
                if obj["format_version"] != SERIES_FORMAT_VERSION:
                    raise SchemaError(
                        f"{path}:{lineno}: unsupported series version "
                        f"{obj['format_version']}")
                continue
            if "t" not in obj or "points" not in obj:
                raise InputError(f"{path}:{lineno}: object needs 't' and 'points'")
            t = obj["t"]
            if t in by_t:
                raise InputError(f"{path}:{lineno}: duplicate time index {t}")
            pts = np.asarray(obj["points"], dtype=np.float64)
            if pts.ndim != 2 or not np.all(np.isfinite(pts)):
                raise InputError(f"{path}:{lineno}: malformed points for t={t}")
            by_t[t] = pts
        if not by_t:
            raise InputError(f"{path}: no time steps")
        T = max(by_t)
        missing = sorted(set(range(1, T + 1)) - set(by_t))
        if missing:
            raise InputError(f"{path}: missing time indices {missing}")
        clouds = [PointCloud(by_t[t], time_index=t) for t in range(1, T + 1)]
        source_paths = [str(path)]
    else:
        raise InputError(f"unknown series format {fmt!r}")

    dims = {c.ambient_dim for c in clouds}
    if len(dims) != 1:
        raise InputError(f"inconsistent ambient dimensions across times: {sorted(dims)}")
    manifest = SeriesManifest(
        format=fmt, T=len(clouds),
        point_counts=[c.n_points for c in clouds],
        ambient_dim=clouds[0].ambient_dim,
        source_paths=source_paths,
        checksum=_checksum(raw),
    )
    return clouds, manifest


def dump_canonical_json(obj: dict) -> bytes:
    """Canonical JSON bytes: sorted keys, fixed separators, trailing newline."""
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def save_report(report_obj: dict, path) -> None:
    """Write a versioned run report; content is fully determined by inputs."""
    required = {"format_version", "statistics", "radius_grid", "u_grid",
                "mc_params", "config"}
    missing = required - set(report_obj)
    if missing:
        raise SchemaError(f"report missing fields {sorted(missing)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_canonical_json(report_obj))


def load_report(path) -> dict:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: corrupt report: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: report is not an object")
    if obj.get("format_version") != REPORT_FORMAT_VERSION:
        raise SchemaError(
            f"{path}: unsupported report format_version {obj.get('format_version')!r}")
    required = {"format_version", "statistics", "radius_grid", "u_grid",
                "mc_params", "config"}
    missing = required - set(obj)
    if missing:
        raise SchemaError(f"{path}: report missing fields {sorted(missing)}")
    return obj
