"""Command line front end.

    scoregraph sweep   edge-count sweep, RMSE + misclassification CSVs
    scoregraph social  same sweep pinned to the graded-state model
    scoregraph single  one instance with full per-agent exports
    scoregraph check   fast invariant self-test, nonzero exit on failure
"""

from __future__ import annotations

from dataclasses import replace

import click

from .experiments import (ExperimentConfig, emit_outputs, emit_single_outputs,
                          parse_config_file, run_invariant_checks, run_single,
                          run_social_ranking_suite, run_sweep)


def _load_config(config_path, seed, out, trials, full_scale, **overrides) -> ExperimentConfig:
    cfg = parse_config_file(config_path) if config_path else ExperimentConfig()
    if seed is not None:
        cfg = replace(cfg, master_seed=seed)
    if out is not None:
        cfg = replace(cfg, out_dir=out)
    if trials is not None:
        cfg = replace(cfg, trials=trials)
    if full_scale:
        cfg = replace(cfg, full_scale=True)
    for key, value in overrides.items():
        if value is not None:
            cfg = replace(cfg, **{key: value})
    return cfg


def _shared_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True),
                      default=None, help="Key-value config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Master seed.")(fn)
    fn = click.option("--out", type=click.Path(), default=None,
                      help="Output directory.")(fn)
    fn = click.option("--trials", type=int, default=None,
                      help="Monte Carlo trials per sweep point.")(fn)
    fn = click.option("--full-scale", is_flag=True, default=False,
                      help="Use the large network size (slow).")(fn)
    return fn


def _report_sweep(result, paths):
    click.echo(f"model: {result.model_name}")
    for point in result.points:
        parts = [f"n={point.n_edges}"]
        for est in result.estimator_names:
            rmses = ", ".join(f"{k}={v:.4g}" for k, v in point.rmse[est].items())
            parts.append(f"{est}[{rmses}]")
        parts.append(f"oracle-misclass={point.misclass['oracle']:.4g}")
        click.echo("  " + "  ".join(parts))
    for key, path in paths.items():
        click.echo(f"wrote {path}")


@click.group()
@click.version_option(package_name="scoregraph")
def main() -> None:
    """Distributed parameter estimation and self-classification on score graphs."""


@main.command()
@_shared_options
def sweep(config_path, seed, out, trials, full_scale) -> None:
    """Run an edge-count sweep (reliability model by default)."""
    try:
        cfg = _load_config(config_path, seed, out, trials, full_scale)
        result = run_sweep(cfg)
        paths = emit_outputs(result, cfg.out_dir or "out")
        _report_sweep(result, paths)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)


@main.command()
@_shared_options
def social(config_path, seed, out, trials, full_scale) -> None:
    """Run the graded-state ranking sweep (three states, three scores)."""
    try:
        cfg = _load_config(config_path, seed, out, trials, full_scale,
                           model="social-ranking")
        if not cfg.theta:
            cfg = replace(cfg, theta=(0.5,))
        result = run_social_ranking_suite(cfg)
        paths = emit_outputs(result, cfg.out_dir or "out")
        _report_sweep(result, paths)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)


@main.command()
@_shared_options
def single(config_path, seed, out, trials, full_scale) -> None:
    """Run one instance and export the graph, states, estimates, and traces."""
    try:
        cfg = _load_config(config_path, seed, out, trials, full_scale)
        result = run_single(cfg)
        paths = emit_single_outputs(result, cfg.out_dir or "out")
        for name, (theta_hat, gamma_hat) in result.estimates.items():
            values = list(theta_hat) + list(gamma_hat)
            pairs = ", ".join(f"{k}={v:.6g}" for k, v in zip(result.param_names, values))
            click.echo(f"{name}: {pairs}")
        for key, path in paths.items():
            click.echo(f"wrote {path}")
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)


@main.command()
@click.option("--seed", type=int, default=0, help="Master seed.")
def check(seed) -> None:
    """Run fast internal consistency checks; exit 1 if any fail."""
    try:
        results = run_invariant_checks(seed)
    except Exception as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name}"
        if res.detail:
            line += f" ({res.detail})"
        click.echo(line)
        failed += 0 if res.passed else 1
    if failed:
        click.echo(f"{failed} of {len(results)} checks failed", err=True)
        raise SystemExit(1)
    click.echo(f"all {len(results)} checks passed")


if __name__ == "__main__":
    main()
