"""Command-line interface: dataset generation, headless runs, and the service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .core import PoolPartition
from .data import (
    dataset_hash,
    load_dataset,
    lusms_synth_v1,
    lusms_synth_v1_config,
    report_series_to_csv,
    save_dataset,
    stratified_warm_start,
    write_report_series,
)
from .driver import ALConfig, baseline as run_baseline, run as run_loop
from .selection import SelectionStrategy, StrategyKind


def _partition(dataset, test_fraction: float, warm_start: int):
    """Deterministic head/tail split with an optional stratified seed set."""
    ids = dataset.ids()
    n_test = int(round(len(ids) * test_fraction))
    if n_test < 1 or n_test >= len(ids):
        raise click.UsageError("test fraction leaves no pool or no test set")
    pool, test = ids[:-n_test], ids[-n_test:]
    labeled = stratified_warm_start(dataset, pool, warm_start) if warm_start else {}
    return PoolPartition(
        candidate=frozenset(set(pool) - set(labeled)),
        labeled=labeled,
        test=frozenset(test),
    )


def _resolve(dataset_path: str | None, test_fraction: float, warm_start: int):
    if dataset_path is None:
        return lusms_synth_v1()
    dataset = load_dataset(dataset_path)
    return dataset, _partition(dataset, test_fraction, warm_start)


def _config(strategy, k_max, iterations, threshold, seed, validate, **extra) -> ALConfig:
    return lusms_synth_v1_config(
        strategy=SelectionStrategy(kind=StrategyKind(strategy)),
        k_max=k_max,
        max_iterations=iterations,
        threshold=threshold,
        seed=seed,
        validate=validate,
        **extra,
    )


_shared = [
    click.option("--dataset", "dataset_path", type=click.Path(exists=True),
                 default=None, help="Dataset file (default: built-in benchmark)."),
    click.option("--test-fraction", default=0.2, show_default=True),
    click.option("--warm-start", default=25, show_default=True,
                 help="Stratified seed-label count for file datasets."),
    click.option("--strategy", type=click.Choice([k.value for k in StrategyKind]),
                 default="mlm", show_default=True),
    click.option("--k-max", default=25, show_default=True),
    click.option("--iterations", default=5, show_default=True),
    click.option("--threshold", default=0.5, show_default=True),
    click.option("--seed", default=42, show_default=True),
    click.option("--validate/--no-validate", default=True, show_default=True,
                 help="Correlation-table confidence validation."),
]


def shared_options(fn):
    for opt in reversed(_shared):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Pool-based active-learning workbench for multi-label classification."""


@main.command()
@click.option("--out", type=click.Path(), required=True)
@click.option("--seed", default=42, show_default=True)
def generate(out, seed):
    """Write the built-in synthetic benchmark dataset to a file."""
    dataset, _ = lusms_synth_v1(seed=seed)
    save_dataset(dataset, out)
    click.echo(f"wrote {len(dataset)} samples to {out} (hash {dataset_hash(dataset)[:12]})")


@main.command()
@shared_options
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="Write the per-iteration report series to this file.")
def run(dataset_path, test_fraction, warm_start, strategy, k_max, iterations,
        threshold, seed, validate, report_path):
    """Headless active-learning run with the simulated oracle."""
    dataset, partition = _resolve(dataset_path, test_fraction, warm_start)
    config = _config(strategy, k_max, iterations, threshold, seed, validate)
    state = run_loop(config, dataset, partition)
    for r in state.reports:
        click.echo(
            f"iteration {r.iteration}: labeled {r.labeled_fraction:.1%} "
            f"corrected {r.corrected_fraction:.1%} macro-acc {r.macro_accuracy:.4f}"
        )
    if report_path:
        write_report_series(report_path, config, state.reports, dataset_hash(dataset))
        click.echo(f"report series written to {report_path}")


@main.command()
@shared_options
def baseline(dataset_path, test_fraction, warm_start, strategy, k_max, iterations,
             threshold, seed, validate):
    """Train on the whole candidate pool with ground truth; same metrics."""
    dataset, partition = _resolve(dataset_path, test_fraction, warm_start)
    config = _config(strategy, k_max, iterations, threshold, seed, validate)
    _, per_label, macro = run_baseline(config, dataset, partition)
    for name, lm in zip(dataset.schema.labels, per_label):
        click.echo(
            f"{name}: acc {lm.accuracy:.4f} sen {lm.sensitivity:.4f} "
            f"spe {lm.specificity:.4f} auc {lm.auc:.4f}"
        )
    click.echo(f"macro-accuracy {macro:.4f}")


@main.command()
@shared_options
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(dataset_path, test_fraction, warm_start, strategy, k_max, iterations,
          threshold, seed, validate, port, host):
    """Start the human-in-the-loop annotation service."""
    import uvicorn

    from .service import AnnotationSession, create_app

    dataset, partition = _resolve(dataset_path, test_fraction, warm_start)
    config = _config(strategy, k_max, iterations, threshold, seed, validate)
    session = AnnotationSession(config, dataset, partition)
    uvicorn.run(create_app(session), host=host, port=port)


@main.command()
@click.argument("series", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None,
              help="CSV output path (default: stdout).")
def report(series, out):
    """Flatten a report series file into CSV rows for plotting."""
    csv = report_series_to_csv(series)
    if out:
        Path(out).write_text(csv)
        click.echo(f"wrote {out}")
    else:
        sys.stdout.write(csv)


if __name__ == "__main__":
    main()
