"""Command-line front end: simulate, persistence, analyze, quantiles.

Exit codes: 0 = completed without rejection, 2 = null hypothesis rejected
(analyze only), 1 = any error.  Configuration comes from flags, optionally
seeded by a flat TOML-style ``--config`` file; flags always win.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, ingest, limits, pipeline, procgen
from .diagrams import diagrams_to_json_obj
from .errors import InputError, TopodriftError
from .stats import ALL_STATISTICS


def _parse_scalar(token: str):
    token = token.strip()
    if token.lower() in ("true", "false"):
        return token.lower() == "true"
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise InputError(f"cannot parse config value {token!r}")


def read_flat_config(path) -> dict:
    """Flat ``key = value`` TOML-style config: scalars and [a, b] lists."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if value.startswith("[") and value.endswith("]"):
            inner = value[1:-1].strip()
            out[key] = [_parse_scalar(t) for t in inner.split(",")] if inner else []
        else:
            out[key] = _parse_scalar(value)
    return out


def _merge_config(ctx: click.Context, config_path) -> None:
    """Overlay file values onto params the user did not set on the CLI.

    File keys are the long flag names (hyphens or underscores) or the
    parameter names themselves.
    """
    if not config_path:
        return
    file_vals = read_flat_config(config_path)
    flag_to_param = {}
    for param in ctx.command.params:
        flag_to_param[param.name] = param.name
        for opt in getattr(param, "opts", []):
            if opt.startswith("--"):
                flag_to_param[opt[2:].replace("-", "_")] = param.name
    for key, value in file_vals.items():
        name = flag_to_param.get(key)
        if name is None or name == "config" or name not in ctx.params:
            continue
        src = ctx.get_parameter_source(name)
        if src is not None and src.name == "COMMANDLINE":
            continue
        ctx.params[name] = value


def _weights(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip() != "")
    except ValueError as exc:
        raise InputError(f"bad ma-weights {text!r}: {exc}")


@click.group()
@click.version_option(__version__, prog_name="topodrift")
def cli():
    """Topological change detection for time series of point clouds."""


@cli.command()
@click.option("--scenario", type=click.Choice(procgen.SCENARIOS), required=True)
@click.option("--T", "series_length", type=int, required=True, help="series length")
@click.option("--n", "cloud_size", type=int, required=True, help="points per cloud")
@click.option("--noise-sd", type=float, default=0.0, show_default=True)
@click.option("--ma-weights", default="1.0", show_default=True,
              help="comma-separated MA weights of the innovation stream")
@click.option("--change-u", type=float, default=0.5, show_default=True)
@click.option("--magnitude", type=float, default=0.0, show_default=True)
@click.option("--base-radius", type=float, default=1.0, show_default=True)
@click.option("--angle-policy", type=click.Choice(procgen.ANGLE_POLICIES),
              default="uniform_angles", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv_dir", "jsonl"]),
              default="csv_dir", show_default=True)
@click.option("--out", required=True, type=click.Path())
def simulate(scenario, series_length, cloud_size, noise_sd, ma_weights,
             change_u, magnitude, base_radius, angle_policy, seed, fmt, out):
    """Generate a synthetic point-cloud series and write it to OUT."""
    config = procgen.ProcessConfig(
        scenario=scenario, T=series_length, n=cloud_size, noise_sd=noise_sd,
        ma_weights=_weights(ma_weights), change_u=change_u,
        magnitude=magnitude, seed=seed, base_radius=base_radius,
        angle_policy=angle_policy)
    series = procgen.generate_series(config)
    manifest = ingest.save_series(series, out, fmt=fmt)
    click.echo(f"wrote {manifest.T} clouds ({manifest.ambient_dim}-d, "
               f"{min(manifest.point_counts)}..{max(manifest.point_counts)} points) "
               f"to {out} [checksum {manifest.checksum[:12]}]")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=1, show_default=True,
              help="homology dimension")
@click.option("--rmax", type=float, default=None,
              help="filtration cap (default: cloud diameter)")
@click.option("--budget", type=int, default=pipeline.DEFAULT_SIMPLEX_BUDGET,
              show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path())
def persistence(in_path, k, rmax, budget, jobs, out):
    """Compute one persistence diagram per time step of the series at IN."""
    series, manifest = ingest.load_series(in_path)
    try:
        diagrams = pipeline.diagrams_for_series(series, k, rmax, budget, jobs)
    except TopodriftError as exc:
        raise TopodriftError(f"persistence failed: {exc}") from exc
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for t, diagram in enumerate(diagrams, 1):
        obj = diagrams_to_json_obj([diagram])
        (out_dir / f"diagram_{t}.json").write_bytes(ingest.dump_canonical_json(obj))
    combined = diagrams_to_json_obj(diagrams)
    (out_dir / "diagrams.json").write_bytes(ingest.dump_canonical_json(combined))
    click.echo(f"wrote {manifest.T} diagrams (dim {k}) to {out_dir}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=1, show_default=True)
@click.option("--rmax", type=float, default=None)
@click.option("--grid-R", "grid_count", type=int, default=None,
              help="radius-grid size (default min(T, 100))")
@click.option("--grid-rmax", type=float, default=None,
              help="kernel radius cap (default: max finite barcode distance)")
@click.option("--statistics", default="dmax,dl,q", show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--trim", type=float, default=0.05, show_default=True)
@click.option("--mc-paths", type=int, default=limits.DEFAULT_MC_PATHS,
              show_default=True)
@click.option("--mc-grid", type=int, default=limits.DEFAULT_MC_GRID,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--skip-degenerate/--no-skip-degenerate", default=True,
              show_default=True)
@click.option("--budget", type=int, default=pipeline.DEFAULT_SIMPLEX_BUDGET,
              show_default=True)
@click.option("--dump-surface", type=click.Path(), default=None,
              help="also write the (u, r, U_T) surface as CSV")
@click.option("--cache-dir", type=click.Path(), default=None,
              help="quantile cache dir (default $TOPODRIFT_CACHE_DIR)")
@click.option("--config", type=click.Path(exists=True), default=None,
              help="flat TOML-style config file; flags override it")
@click.option("--out", required=True, type=click.Path())
@click.pass_context
def analyze(ctx, **kwargs):
    """Run the full change test on the series at IN; write a report to OUT.

    Exits 0 when no statistic rejects, 2 when any does, 1 on error.
    """
    _merge_config(ctx, kwargs.pop("config", None))
    p = dict(ctx.params)
    p.pop("config", None)
    statistics = tuple(s.strip() for s in str(p["statistics"]).split(",") if s.strip())
    cfg = pipeline.RunConfig(
        homology_dim=p["k"], r_max=p["rmax"], grid_count=p["grid_count"],
        grid_r_max=p["grid_rmax"], statistics=statistics, alpha=p["alpha"],
        trim=p["trim"], mc_paths=p["mc_paths"], mc_grid=p["mc_grid"],
        seed=p["seed"], jobs=p["jobs"], skip_degenerate=p["skip_degenerate"],
        budget=p["budget"], dump_surface=p["dump_surface"])
    series, manifest = ingest.load_series(p["in_path"])
    cfg.extra_echo = {"input_checksum": manifest.checksum,
                      "input_format": manifest.format}
    report = pipeline.analyze_series(series, cfg, cache_dir=p["cache_dir"])
    ingest.save_report(report, p["out"])
    any_reject = False
    for stat in report["statistics"]:
        any_reject |= stat["reject"]
        click.echo(
            f"{stat['statistic_id']}: value={stat['value']:.6g} "
            f"q_{{1-{stat['alpha']}}}={stat['quantile_used']:.6g} "
            f"p={stat['p_value_mc']:.4g} reject={stat['reject']} "
            f"[u-grid k/T, T={report['diagnostics']['T']}; "
            f"radius grid R={len(report['radius_grid']['values'])}, "
            f"cal_rmax={report['radius_grid']['r_max']:.6g}; "
            f"MC paths={stat['mc_params']['paths']}, grid={stat['mc_params']['grid']}, "
            f"seed={stat['mc_params']['seed']}]")
    click.echo(f"report written to {p['out']}")
    ctx.exit(2 if any_reject else 0)


@cli.command()
@click.option("--statistic", type=click.Choice(list(ALL_STATISTICS)), required=True)
@click.option("--mc-paths", type=int, default=limits.DEFAULT_MC_PATHS,
              show_default=True)
@click.option("--mc-grid", type=int, default=limits.DEFAULT_MC_GRID,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trim", type=float, default=None,
              help="required for the q statistic")
@click.option("--alphas", default="0.01,0.05,0.1", show_default=True)
@click.option("--out", required=True, type=click.Path())
def quantiles(statistic, mc_paths, mc_grid, seed, trim, alphas, out):
    """Simulate a limit law and write its quantile table to OUT."""
    alpha_list = [float(a) for a in alphas.split(",") if a.strip()]
    if statistic == "q" and trim is None:
        raise InputError("--trim is required for the q statistic")
    table = limits.build_table(statistic, mc_paths, mc_grid, seed,
                               alphas=alpha_list, trim=trim)
    limits.cache_store(table, out)
    pairs = ", ".join(f"q_{{1-{a}}}={q:.6g}"
                      for a, q in zip(table.alphas, table.quantiles))
    click.echo(f"{statistic}: {pairs} [MC paths={mc_paths}, grid={mc_grid}, "
               f"seed={seed}, trim={trim}] -> {out}")


def main(argv=None) -> int:
    """Entry point with the documented exit-code contract."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return int(rv) if isinstance(rv, int) else 0
    except SystemExit as exc:  # raised by ctx.exit(...)
        code = exc.code if exc.code is not None else 0
        return int(code)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except (TopodriftError, OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
