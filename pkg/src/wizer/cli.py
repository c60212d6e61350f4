"""Command-line interface: ``wizer smooth | map | persist | verify | quantile``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure
(including failed verification checks).
"""

from __future__ import annotations

import csv
import functools
import io
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import plotting
from .circle import AngleGrid
from .config import RunConfig
from .errors import InputError, NumericError
from .ingest import export_json, read_filaments, to_histogram, to_sample
from .inference import MonteCarloConfig, bootstrap_quantile, estimate_covariance, signature_map, sup_quantile
from .persistence import (build_diagram, persistence_bandwidths, records_to_csv, records_to_json,
                          rows_to_csv, summarize)
from .scalespace import BandwidthGrid, kde

EXIT_INPUT = 1
EXIT_NUMERIC = 2


def _guard(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except InputError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except NumericError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(EXIT_NUMERIC)
    return wrapper


def _common(func):
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False),
                     help="JSON run configuration; flags override it."),
        click.option("-o", "--out", "output_dir", help="Output directory."),
        click.option("--grid-size", type=int, help="Number of angle grid nodes (default 512)."),
        click.option("--h0", type=float, help="Smallest bandwidth (default 0.01)."),
        click.option("--hmax", type=float, help="Largest bandwidth (default 2)."),
        click.option("--steps", type=int, help="Number of log-spaced bandwidths (default 200)."),
        click.option("--m", type=int, help="Derivative order tested (default 1)."),
        click.option("--alpha", type=float, help="Family-wise level (default 0.05)."),
        click.option("--draws", type=int, help="Monte Carlo draws for the quantile (default 10000)."),
        click.option("--seed", type=int, help="Random seed (default 0)."),
        click.option("--mc-backend", type=click.Choice(["gaussian", "bootstrap"]), default=None),
        click.option("--weighting", type=click.Choice(["length", "length*width"]), default=None),
        click.option("--doubling/--no-doubling", "axial_doubling", default=None,
                     help="Double axial orientations onto the full circle (default on)."),
        click.option("--ess-threshold", type=float, help="Mask cells with ESS <= this (default 5)."),
        click.option("--svg-timestamp", is_flag=True, default=None, help="Embed the date in SVG output."),
        click.option("--format", "formats", multiple=True, type=click.Choice(["csv", "json", "svg"]),
                     help="Output format; repeat for several (default all three)."),
    ]
    for opt in reversed(options):
        func = opt(func)
    return func


def _resolve(config_path, inputs=None, **overrides):
    cfg = RunConfig.load(config_path) if config_path else RunConfig()
    overrides = {k: (list(v) or None) if isinstance(v, tuple) else v for k, v in overrides.items()}
    if inputs:
        overrides["inputs"] = list(inputs)
    cfg = cfg.updated(**overrides)
    if not cfg.inputs and inputs is not None:
        raise InputError("no input files given")
    return cfg


def _outdir(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json() + "\n")
    return out


def _split_input(spec):
    """``CONDITION=PATH`` or plain ``PATH``."""
    if "=" in spec and not Path(spec).exists():
        cond, path = spec.split("=", 1)
        return cond, path
    return None, spec


def _load_sample(cfg, path):
    records = read_filaments(path)
    if not records:
        raise InputError(f"{path}: no filament records")
    return records, to_sample(records, cfg.weighting, cfg.axial_doubling)


def _grids(cfg):
    return AngleGrid(cfg.grid_size), BandwidthGrid(cfg.h0, cfg.hmax, cfg.steps)


def _mc(cfg):
    return MonteCarloConfig(cfg.draws, cfg.seed, cfg.mc_backend)


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Circular SiZer: wrapped-Gaussian scale-space inference for circular data."""


@main.command()
@click.argument("inputs", nargs=-1)
@_common
@click.option("--degrees", "smooth_degrees", multiple=True, type=float,
              help="Angular scale in degrees of each smoothed curve (h = radians(deg)^2).")
@click.option("--bins", type=int, help="Histogram bins (even, default 180).")
@_guard
def smooth(inputs, config_path, smooth_degrees, **opts):
    """Histogram and wrapped-Gaussian smoothed densities of filament tables."""
    cfg = _resolve(config_path, inputs, smooth_degrees=smooth_degrees, **opts)
    out = _outdir(cfg)
    grid = AngleGrid(cfg.grid_size)
    for path in cfg.inputs:
        stem = Path(path).stem
        records, sample = _load_sample(cfg, path)
        hist = to_histogram(records, cfg.bins, cfg.weighting, cfg.axial_doubling)
        curves = {}
        for deg, h in zip(cfg.smooth_degrees, cfg.smooth_bandwidths):
            curves[f"{deg:g} deg (h={h:.5g})"] = kde(sample, h, 0, grid).values.values
        if "csv" in cfg.formats:
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["angle"] + [f"h={h:.10g}" for h in cfg.smooth_bandwidths])
            for g, t in enumerate(grid.nodes):
                writer.writerow([f"{t:.10g}"] + [f"{v[g]:.12g}" for v in curves.values()])
            (out / f"{stem}_density.csv").write_text(buf.getvalue())
        if "json" in cfg.formats:
            (out / f"{stem}_histogram.json").write_text(export_json(sample, hist) + "\n")
        if "svg" in cfg.formats:
            plotting.density_svg(out / f"{stem}_density.svg", grid.nodes, curves, hist,
                                 title=stem, timestamp=cfg.svg_timestamp)
        click.echo(f"{path}: {len(records)} filaments, n_eff={sample.effective_n:g}")


def _compute_map(cfg, path):
    records, sample = _load_sample(cfg, path)
    grid, bws = _grids(cfg)
    sig = signature_map(sample, bws, cfg.m, grid, cfg.alpha, _mc(cfg),
                        ess_threshold=cfg.ess_threshold)
    return sample, sig


def _write_map(cfg, out, stem, sig):
    if "csv" in cfg.formats:
        (out / f"{stem}_signature.csv").write_text(sig.to_csv())
    if "json" in cfg.formats and sig.quantile is not None:
        payload = dict(sig.quantile.to_dict(), threshold=sig.threshold,
                       signature=[int(w) for w in sig.signature])
        (out / f"{stem}_quantile.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if "svg" in cfg.formats:
        hl = [h for h in cfg.smooth_bandwidths if cfg.h0 <= h <= cfg.hmax]
        plotting.signature_map_svg(out / f"{stem}_signature.svg", sig, title=stem, hlines=hl,
                                   timestamp=cfg.svg_timestamp)


@main.command("map")
@click.argument("inputs", nargs=-1)
@_common
@_guard
def map_(inputs, config_path, **opts):
    """Signature map (significant increase / decrease) over angle x bandwidth."""
    cfg = _resolve(config_path, inputs, **opts)
    out = _outdir(cfg)
    for path in cfg.inputs:
        stem = Path(path).stem
        _, sig = _compute_map(cfg, path)
        _write_map(cfg, out, stem, sig)
        click.echo(f"{path}: q={sig.quantile.q:.6g}, threshold={sig.threshold:.6g}, "
                   f"w(h0)={int(sig.signature[0])}")


@main.command()
@click.argument("inputs", nargs=-1)
@_common
@click.option("--kmax", type=int, help="Number of modes to report (default 4).")
@click.option("--units", type=click.Choice(["log-radians", "degrees"]), default=None)
@_guard
def persist(inputs, config_path, **opts):
    """Inferred persistence bandwidths, diagram and per-condition summaries.

    Inputs may be given as CONDITION=PATH to group records by condition.
    """
    cfg = _resolve(config_path, inputs, **opts)
    out = _outdir(cfg)
    groups, records = {}, []
    for spec in cfg.inputs:
        cond, path = _split_input(spec)
        stem = Path(path).stem
        _, sig = _compute_map(cfg, path)
        _write_map(cfg, out, stem, sig)
        rec = persistence_bandwidths(sig, cfg.kmax, label=stem)
        records.append(rec)
        groups.setdefault(cond or "all", []).append(rec)
    diagram = build_diagram(records, cfg.kmax)
    rows = summarize(groups, cfg.kmax, units=cfg.units)
    if "csv" in cfg.formats:
        (out / "persistence.csv").write_text(records_to_csv(records))
        (out / "summary.csv").write_text(rows_to_csv(rows))
    if "json" in cfg.formats:
        (out / "persistence.json").write_text(records_to_json(records) + "\n")
        (out / "summary.json").write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n")
        (out / "diagram.json").write_text(json.dumps(diagram.to_dict(), indent=2, sort_keys=True) + "\n")
    if "svg" in cfg.formats:
        plotting.diagram_svg(out / "diagram.svg", diagram, timestamp=cfg.svg_timestamp)
    for rec in records:
        hs = ", ".join(f"{h:.4g}{'' if f == 'detected' else '*'}" for h, f in zip(rec.bandwidths, rec.flags))
        click.echo(f"{rec.label}: h^(k) = {hs}")


@main.command()
@click.argument("inputs", nargs=-1)
@_common
@_guard
def quantile(inputs, config_path, **opts):
    """Print the simultaneous-test quantile q for each input as JSON."""
    cfg = _resolve(config_path, inputs, **opts)
    grid = AngleGrid(cfg.grid_size)
    for path in cfg.inputs:
        _, sample = _load_sample(cfg, path)
        if cfg.mc_backend == "bootstrap":
            est = bootstrap_quantile(sample, cfg.h0, cfg.m, grid, cfg.alpha, cfg.draws, cfg.seed)
        else:
            cov = estimate_covariance(sample, cfg.h0, cfg.m, grid)
            est = sup_quantile(cov, cfg.alpha, cfg.draws, cfg.seed)
        payload = dict(est.to_dict(), input=path, effective_n=sample.effective_n,
                       threshold=est.q / float(np.sqrt(sample.effective_n)))
        click.echo(json.dumps(payload, sort_keys=True))


@main.command()
@click.option("-o", "--out", "output_dir", default=None, help="Write the report here.")
@click.option("--densities", type=int, default=500, show_default=True,
              help="Random mixture densities in the causality sweep.")
@click.option("--kappa", type=float, default=6.0, show_default=True,
              help="Concentration for the von Mises counterexample.")
@click.option("--vd-kappa", type=float, default=0.3, show_default=True,
              help="Concentration for the sampled variation-diminishing check.")
@click.option("--search/--fixture", default=False,
              help="Re-run the counterexample search instead of loading the shipped fixture.")
@click.option("--seed", type=int, default=0, show_default=True)
@_guard
def verify(output_dir, densities, kappa, vd_kappa, search, seed):
    """Numerical checks of the scale-space axioms."""
    from .verify import run_suite

    reports = run_suite(densities=densities, seed=seed, vm_kappa=kappa, vd_kappa=vd_kappa,
                        use_fixture=not search)
    text = "\n".join(r.to_text() for r in reports)
    click.echo(text)
    if output_dir:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "verify_report.json").write_text(
            json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n")
        (out / "verify_report.txt").write_text(text + "\n")
    if not all(r.passed for r in reports):
        sys.exit(EXIT_NUMERIC)


if __name__ == "__main__":  # pragma: no cover
    main()
