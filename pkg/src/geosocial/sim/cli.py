"""Command-line entry points for the simulation harness.

Exit codes: 0 success, 1 validation problem, 2 runtime failure.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

from ..errors import ValidationError
from . import runner, scenario as scenario_mod
from .demo import seed_demo


@click.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(), help="Scenario spec (JSON).")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Scenario file to write (JSONL).")
def simgen(spec_path: str, out_path: str):
    """Fabricate a deterministic scenario from a spec file."""
    try:
        spec = scenario_mod.load_spec(spec_path)
        generated = scenario_mod.generate(spec)
    except ValidationError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        scenario_mod.save_scenario(generated, out_path)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"wrote {out_path}: {len(generated.rps)} RPs, {generated.trials} trials")


@click.command()
@click.option("--scenario", "scenario_path", required=True, type=click.Path(), help="Scenario file (JSONL).")
@click.option("--report", "report_path", required=True, type=click.Path(), help="Report file to write (JSONL).")
@click.option("--figures/--no-figures", default=True, help="Render PNG figures beside the report.")
def simrun(scenario_path: str, report_path: str, figures: bool):
    """Run every trial of a scenario and write the accuracy report."""
    try:
        scn = scenario_mod.load_scenario(scenario_path)
    except ValidationError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(1)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        report = runner.run(scn)
        runner.save_report(report, report_path)
        if figures:
            from .figures import render_figures

            for path in render_figures(report, report_path):
                click.echo(f"figure: {path}")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(report.summary, sort_keys=True))


@click.command(name="seed-demo")
@click.option("--url", required=True, help="Base URL of a running geosocial service.")
def seed_demo_cli(url: str):
    """Create demo users, friendships, posts, chats, and location fixes."""
    try:
        summary = seed_demo(url)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach {url}: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(summary, sort_keys=True))
