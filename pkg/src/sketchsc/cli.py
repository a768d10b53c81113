"""Command-line interface.

Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical failure.
"""

import json
import sys

import click

from .pipeline import (ConfigError, DataError, NumericalError,
                       PipelineConfig, run_pipeline, run_sweep)

_EXIT = {ConfigError: 2, DataError: 3, NumericalError: 4}


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    sys.exit(_EXIT.get(type(exc), 1))


def _build_config(config_file, **flags):
    base = {}
    if config_file:
        with open(config_file) as f:
            base = json.load(f)
    for key, value in flags.items():
        if value is not None:
            base[key] = value
    synth = base.get("synth")
    if isinstance(synth, str):
        base["synth"] = json.loads(synth)
    try:
        cfg = PipelineConfig(**base)
        cfg.validate()
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


_shared = [
    click.option("--config", "config_file", type=click.Path(exists=True),
                 default=None, help="JSON config file; flags override it."),
    click.option("--input", "input_path", default=None,
                 help="Path to a data matrix file."),
    click.option("--format", "input_format",
                 type=click.Choice(["csv", "matrix-market", "raw-binary"]),
                 default=None),
    click.option("--labels/--no-labels", "input_labels", default=None,
                 help="CSV rows carry a trailing integer label column."),
    click.option("--synth", default=None,
                 help='Synthesis spec as JSON, e.g. '
                      '\'{"K":3,"D":20,"d":2,"per_cluster":50}\'.'),
    click.option("--method", type=click.Choice(["lsr", "ssc", "lrr"]),
                 default=None),
    click.option("--n", type=int, default=None, help="Sketch size."),
    click.option("--d", type=int, default=None,
                 help="Reduced dimension; enables the left sketch."),
    click.option("--sketch", "sketch_kind",
                 type=click.Choice(["rademacher", "gaussian",
                                    "sparse-embedding", "hadamard-fjlt"]),
                 default=None),
    click.option("--dim-sketch", "dim_sketch_kind",
                 type=click.Choice(["rademacher", "gaussian",
                                    "sparse-embedding", "hadamard-fjlt"]),
                 default=None),
    click.option("--lambda", "lam", type=float, default=None),
    click.option("--nu0", type=float, default=None),
    click.option("--p", type=float, default=None),
    click.option("--nu-max", "nu_max", type=float, default=None),
    click.option("--tol", type=float, default=None),
    click.option("--max-iter", "max_iter", type=int, default=None),
    click.option("--knn", type=int, default=None),
    click.option("--affinity", type=click.Choice(["binary", "heat"]),
                 default=None),
    click.option("--sigma", default=None,
                 help='Heat-kernel bandwidth or "auto".'),
    click.option("--K", "K", type=int, default=None),
    click.option("--seed", type=int, default=None),
    click.option("--normalize/--no-normalize", default=None),
    click.option("--out", "output_dir", default=None),
]


def _with_shared(f):
    for opt in reversed(_shared):
        f = opt(f)
    return f


def _parse_sigma(flags):
    if flags.get("sigma") not in (None, "auto"):
        flags["sigma"] = float(flags["sigma"])
    return flags


@click.group()
def main():
    """Sketched subspace clustering."""


@main.command()
@_with_shared
def run(config_file, **flags):
    """Run one clustering pipeline and write its report."""
    try:
        cfg = _build_config(config_file, **_parse_sigma(flags))
        report, _ = run_pipeline(cfg)
    except (ConfigError, DataError, NumericalError) as exc:
        _fail(exc)
    click.echo(report.to_json())


@main.command()
@_with_shared
@click.option("--n-values", required=True,
              help="Comma-separated sketch sizes, e.g. 20,40,80.")
@click.option("--seeds", "seed_list", required=True,
              help="Comma-separated seeds, e.g. 0,1,2.")
@click.option("--workers", type=int, default=1)
@click.option("--figures/--no-figures", default=True)
def sweep(config_file, n_values, seed_list, workers, figures, **flags):
    """Run a (n, seed) grid; write sweep.csv and figures."""
    try:
        flags = _parse_sigma(flags)
        cfg = _build_config(config_file, **flags)
        ns = [int(v) for v in n_values.split(",")]
        seeds = [int(v) for v in seed_list.split(",")]
        rows = run_sweep(cfg, ns, seeds, out_dir=cfg.output_dir,
                         workers=workers, figures=figures)
    except (ConfigError, DataError, NumericalError) as exc:
        _fail(exc)
    except ValueError as exc:
        _fail(ConfigError(str(exc)))
    ok = sum(r["status"] == "ok" for r in rows)
    click.echo(f"{ok}/{len(rows)} runs ok; results in {cfg.output_dir}")


@main.command()
@click.argument("csv_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", default=None,
              help="Directory for figures (default: alongside the CSV).")
def plot(csv_path, out_dir):
    """Re-render sweep figures from an existing sweep CSV."""
    import os
    from .plots import render_sweep_figures
    out_dir = out_dir or (os.path.dirname(csv_path) or ".")
    written = render_sweep_figures(csv_path, out_dir)
    for path in written:
        click.echo(path)


if __name__ == "__main__":
    main()
