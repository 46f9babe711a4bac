import json

import numpy as np
import pytest

from topodrift import InputError, PointCloud, SchemaError
from topodrift.ingest import (dump_canonical_json, load_report, load_series,
                              save_report, save_series)


def random_series(rng, T=4, n=3, d=2):
    # include awkward floats to stress the decimal round-trip
    clouds = []
    for t in range(1, T + 1):
        pts = rng.normal(size=(n, d)) * 10.0 ** rng.integers(-6, 6)
        pts[0, 0] = np.pi
        clouds.append(PointCloud(pts, time_index=t))
    return clouds


@pytest.mark.parametrize("fmt", ["csv_dir", "jsonl"])
def test_series_roundtrip_bit_exact(tmp_path, fmt):
    rng = np.random.default_rng(1)
    series = random_series(rng)
    target = tmp_path / ("dir" if fmt == "csv_dir" else "series.jsonl")
    manifest = save_series(series, target, fmt=fmt)
    back, manifest2 = load_series(target)
    assert manifest.T == 4 and manifest2.checksum == manifest.checksum
    for a, b in zip(series, back):
        assert a.time_index == b.time_index
        assert np.array_equal(a.points, b.points)  # 17 digits: exact


def test_empty_directory_errors(tmp_path):
    d = tmp_path / "empty"
    d.mkdir()
    with pytest.raises(InputError, match="no time steps"):
        load_series(d)


def test_two_file_directory(tmp_path):
    (tmp_path / "t_1.csv").write_text("0.5,1.5\n")
    (tmp_path / "t_2.csv").write_text("1.0,2.0\n")
    series, manifest = load_series(tmp_path)
    assert manifest.T == 2 and manifest.point_counts == [1, 1]


def test_missing_index_errors(tmp_path):
    (tmp_path / "t_1.csv").write_text("0,0\n")
    (tmp_path / "t_3.csv").write_text("1,1\n")
    with pytest.raises(InputError, match="missing time indices"):
        load_series(tmp_path)


def test_ragged_and_nonfinite_rows(tmp_path):
    p = tmp_path / "t_1.csv"
    p.write_text("0,0\n1,2,3\n")
    with pytest.raises(InputError, match="ragged"):
        load_series(tmp_path)
    p.write_text("0,0\nnan,1\n")
    with pytest.raises(InputError, match="non-finite"):
        load_series(tmp_path)


def test_jsonl_duplicate_time(tmp_path):
    p = tmp_path / "s.jsonl"
    p.write_text('{"t": 1, "points": [[0,0]]}\n{"t": 1, "points": [[1,1]]}\n')
    with pytest.raises(InputError, match="duplicate"):
        load_series(p)


def _minimal_report():
    return {
        "format_version": 1,
        "statistics": [{
            "statistic_id": "dmax", "value": 1.0, "quantile_used": 2.0,
            "alpha": 0.05, "p_value_mc": 0.4, "reject": False, "trim": None,
            "mc_params": {"paths": 1000, "grid": 100, "seed": 0, "trim": None},
            "diagnostics": {},
        }],
        "radius_grid": {"r_max": 1.0, "values": [0.5, 1.0]},
        "u_grid": [0.5, 1.0],
        "mc_params": {"paths": 1000, "grid": 100, "seed": 0, "trim": 0.05},
        "config": {"alpha": 0.05},
        "diagnostics": {},
    }


def test_report_roundtrip_and_schema(tmp_path):
    obj = _minimal_report()
    p = tmp_path / "report.json"
    save_report(obj, p)
    assert load_report(p) == obj

    bad = _minimal_report()
    del bad["mc_params"]
    with pytest.raises(SchemaError, match="mc_params"):
        save_report(bad, tmp_path / "bad.json")
    (tmp_path / "manual.json").write_text(json.dumps(bad))
    with pytest.raises(SchemaError):
        load_report(tmp_path / "manual.json")


def test_report_bytes_deterministic(tmp_path):
    obj = _minimal_report()
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_report(obj, a)
    save_report(json.loads(json.dumps(obj)), b)
    assert a.read_bytes() == b.read_bytes()


def test_canonical_json_floats_roundtrip():
    vals = [np.pi, 1e-300, 1.0 / 3.0, 6.02e23]
    obj = {"x": vals}
    back = json.loads(dump_canonical_json(obj))
    assert back["x"] == vals
