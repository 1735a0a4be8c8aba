"""Command line interface for qrnlab."""

from __future__ import annotations

import json
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from dotenv import load_dotenv

from qrnlab import __version__, logger, set_logger_level
from qrnlab.exceptions import ConfigError, QRNError
from qrnlab.runner import ExperimentConfig, ExperimentReport, emit, emit_table, read_config_file, run, run_selftest
from qrnlab.schemas import EXPERIMENT_DESCRIPTIONS, EXPERIMENT_SCHEMAS, describe_experiment, list_experiments

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

# Flags whose name does not follow the key with "_" -> "-"
_FLAG_NAMES = {"grid_l": "--grid-L", "lam": "--lambda", "z1": "--z1", "z2": "--z2"}


def _flag(key: str) -> str:
    return _FLAG_NAMES.get(key, "--" + key.replace("_", "-"))


def _schema_options(kind: str) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
    """Attach one option per schema key; defaults stay None so config-file values are not masked."""

    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        for key, spec in reversed(list(EXPERIMENT_SCHEMAS[kind].items())):
            default = "required" if spec.required else spec.default
            func = click.option(_flag(key), key, type=spec.type, default=None, help=f"{spec.help} [{default}]")(func)
        return func

    return decorator


def _report_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option("--table", "table_path", type=click.Path(dir_okay=False), help="Write the data table CSV here")(
        func
    )
    func = click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", help="Report format")(
        func
    )
    func = click.option("--output", "output", type=click.Path(dir_okay=False), help="Report path (default stdout)")(
        func
    )
    func = click.option(
        "--config", "config_file", type=click.Path(exists=True, dir_okay=False), help="Flat KEY=VALUE config file"
    )(func)
    return func


def _write(report: ExperimentReport, output: str | None, fmt: str, table_path: str | None) -> None:
    payload = emit(report, fmt)
    if output:
        Path(output).write_bytes(payload)
        logger.info(f"Report written to {output}")
    else:
        click.echo(payload.decode(), nl=False)
    if table_path:
        Path(table_path).write_bytes(emit_table(report))
        logger.info(f"Table written to {table_path}")


def _execute(
    kind: str, config_file: str | None, output: str | None, fmt: str, table_path: str | None, **flags: Any
) -> None:
    try:
        file_values = read_config_file(config_file) if config_file else {}
        config = ExperimentConfig.build(kind, file_values, flags)
    except ConfigError as e:
        logger.error(e.message)
        click.echo(f"Error: {e.message}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        report = run(config)
    except QRNError as e:
        logger.error(f"{kind} failed: {e.message}")
        click.echo(f"Error: {e.message}", err=True)
        sys.exit(EXIT_FAIL)
    _write(report, output or config.output, fmt, table_path)
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@click.group()
@click.version_option(version=__version__, prog_name="qrn-lab")
@click.option(
    "--log-level",
    type=click.Choice(["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default=None,
    help="Console log level (overrides QRN_LOG_LEVEL)",
)
def cli(log_level: str | None) -> None:
    """Quantum real number lab: seeded checks of collimation, frequency and dynamics bounds."""
    load_dotenv()
    if log_level:
        set_logger_level(log_level)


def _register(kind: str) -> None:
    @_report_options
    @_schema_options(kind)
    def command(**kwargs: Any) -> None:
        _execute(kind, **kwargs)

    command.__doc__ = EXPERIMENT_DESCRIPTIONS[kind] + "."
    cli.command(name=kind)(command)


for _kind in EXPERIMENT_SCHEMAS:
    _register(_kind)


@cli.command()
@click.option("--seed", type=int, default=0, help="Seed shared by every experiment")
@_report_options
def selftest(seed: int, config_file: str | None, output: str | None, fmt: str, table_path: str | None) -> None:
    """Run the full acceptance suite."""
    if config_file:
        click.echo("Error: selftest takes no config file", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        report = run_selftest(seed)
    except QRNError as e:
        logger.error(f"selftest failed: {e.message}")
        click.echo(f"Error: {e.message}", err=True)
        sys.exit(EXIT_FAIL)
    _write(report, output, fmt, table_path)
    failed = [c["id"] for c in report.checks if not c["passed"]]
    if failed:
        logger.warning(f"selftest: {len(failed)} checks failed: {', '.join(failed)}")
    sys.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@cli.command(name="list-experiments")
def list_experiments_cmd() -> None:
    """List available experiment kinds."""
    click.echo("Available experiments:")
    for kind in list_experiments():
        click.echo(f"  {kind:10} - {EXPERIMENT_DESCRIPTIONS[kind]} ({len(EXPERIMENT_SCHEMAS[kind])} parameters)")
    click.echo("\nUse with: qrn-lab <experiment> --config <file>")


@cli.command()
@click.argument("kind")
def show_schema(kind: str) -> None:
    """Show the parameter schema of an experiment kind."""
    try:
        click.echo(json.dumps(describe_experiment(kind), indent=2))
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_CONFIG)


if __name__ == "__main__":
    cli()
