"""Command-line entry points.

Exit codes: 0 success, 1 failure (experiment or verification), 2 config
error. The CLI stays a thin layer over the library; ``serve`` hosts the
FastAPI service that backs the operator console.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .harness.config import ConfigError, RunConfig, load_config
from .harness.experiment import ExperimentError, run_experiment, sweep as run_sweep
from .harness.transcripts import adapter_conformance, agreement_check
from .harness.verify import verify_suite


def _load(path: str) -> RunConfig:
    try:
        return load_config(path)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


@click.group()
def main() -> None:
    """Context-aware MPC experiments, verification and live sessions."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="override the seed list")
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--instructions", type=click.Path(exists=True), default=None,
              help="JSON instruction log to replay")
def run(config_path: str, seed, out_dir, instructions) -> None:
    """Run all configured (variant x seed) episodes and write traces."""
    config = _load(config_path)
    if seed is not None:
        config.seeds = [seed]
    if instructions:
        config.instructions = json.loads(Path(instructions).read_text())
    try:
        summary = run_experiment(config, out_dir=out_dir)
    except ExperimentError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    for variant, block in summary["variants"].items():
        click.echo(f"{variant}: mean cost {block['mean_cost']:.4f} "
                   f"({len(block['episodes'])} episodes)")
    click.echo(f"summary written ({summary['runtime_s']:.1f}s)")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--param", required=True, help='sweep spec, e.g. "k=2..10"')
@click.option("--seeds", type=int, default=None, help="number of seeds from 0")
@click.option("--out", "out_dir", type=click.Path(), default=None)
def sweep(config_path: str, param: str, seeds, out_dir) -> None:
    """Sweep a parameter over a range of values."""
    config = _load(config_path)
    if seeds is not None:
        config.seeds = list(range(seeds))
    try:
        table = run_sweep(config, param, out_dir=out_dir)
    except ExperimentError as exc:
        click.echo(str(exc), err=True)
        sys.exit(1)
    for row in table["values"]:
        means = ", ".join(f"{k}={v:.3f}" for k, v in row["mean_cost"].items())
        click.echo(f"k={row['k']}: {means}")


@main.command()
@click.option("--filter", "name_filter", default=None,
              help="run only criteria whose id contains this substring")
@click.option("--report", "report_path", type=click.Path(), default=None,
              help="write the machine-readable report here")
def verify(name_filter, report_path) -> None:
    """Run the numerical acceptance suite."""
    report = verify_suite(name_filter)
    for item in report["criteria"]:
        status = "PASS" if item["passed"] else "FAIL"
        click.echo(f"[{status}] {item['id']}: {item['title']} "
                   f"({item['runtime_s']:.2f}s)")
        if not item["passed"] and item.get("details"):
            click.echo(f"       {item['details']}")
    if report_path:
        Path(report_path).write_text(json.dumps(report, indent=2))
    sys.exit(0 if report["passed"] else 1)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--port", type=int, default=8700)
@click.option("--host", default="127.0.0.1")
@click.option("--out", "out_dir", type=click.Path(), default=None)
def serve(config_path: str, port: int, host: str, out_dir) -> None:
    """Host the live session service for the operator console."""
    import uvicorn

    from .service.app import create_app

    config = _load(config_path)
    app = create_app(config, out_dir=out_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command("adapter-test")
@click.option("--cmd", required=True, help="command line launching the adapter")
@click.option("--scenarios", default=None,
              help="comma-separated scenario ids (defaults to the fixture set)")
@click.option("--weights", "weights_file", type=click.Path(exists=True), default=None,
              help="weights JSON for the prediction agreement check")
@click.option("--report", "report_path", type=click.Path(), default=None)
def adapter_test(cmd: str, scenarios, weights_file, report_path) -> None:
    """Protocol conformance (and optional agreement) checks for an adapter."""
    kwargs = {}
    if scenarios:
        kwargs["scenarios"] = tuple(s.strip() for s in scenarios.split(","))
    report = adapter_conformance(cmd, **kwargs)
    for ex in report.exchanges:
        status = "ok " if ex.ok else "FAIL"
        click.echo(f"[{status}] -> {ex.sent['type']}: {ex.detail or 'as expected'}")
    passed = report.passed
    output = report.to_dict()
    if weights_file:
        contexts = [
            "conditions calm, tracking nominal",
            "strong northeast wind expected within 2 steps",
            "strong southwest wind expected within 2 steps",
        ]
        agreement = agreement_check(cmd, weights_file, contexts)
        output["agreement"] = agreement
        status = "ok " if agreement["passed"] else "FAIL"
        click.echo(f"[{status}] prediction agreement: "
                   f"max |diff| = {agreement['max_abs_difference']:.2e}")
        passed = passed and agreement["passed"]
    if report_path:
        Path(report_path).write_text(json.dumps(output, indent=2))
    click.echo("conformance " + ("PASSED" if passed else "FAILED"))
    sys.exit(0 if passed else 1)


if __name__ == "__main__":
    main()
