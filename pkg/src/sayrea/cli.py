"""Command line entry points: serve the engine, replay traces, generate
synthetic habit traces."""

from __future__ import annotations

import json
import sys

import click

from .catalog import Catalog
from .engine import Engine
from .identify import make_backend
from .registry import Registry


@click.group()
def main():
    """SayRea-style contextual rule engine."""


@main.command()
@click.option("--registry", "registry_path", type=click.Path(exists=True), default=None,
              help="Context registry JSON (defaults to the shipped Table-1 registry).")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None,
              help="Service catalog JSON (defaults to the shipped demo catalog).")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Directory for the journal and rule snapshots.")
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock")
@click.option("--list-size", type=int, default=6, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8787, show_default=True)
def serve(registry_path, catalog_path, data_dir, backend, list_size, host, port):
    """Run the HTTP engine API."""
    from .api import serve as run_server

    engine = Engine(
        Registry.load(registry_path),
        Catalog.load(catalog_path),
        make_backend(backend),
        data_dir=data_dir,
        list_size=list_size,
    )
    click.echo(f"sayrea engine on http://{host}:{port} (backend={backend})", err=True)
    try:
        run_server(engine, host=host, port=port)
    finally:
        engine.close()


@main.command()
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--registry", "registry_path", type=click.Path(exists=True), default=None)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["mock", "http"]), default="mock")
@click.option("--list-size", type=int, default=6, show_default=True)
@click.option("--tz-offset", type=int, default=0, show_default=True,
              help="Day-boundary offset from UTC in minutes.")
def replay(trace_path, out_dir, registry_path, catalog_path, backend, list_size, tz_offset):
    """Replay a trace file and write metrics.json, daily.csv, rules.jsonl,
    and journal.jsonl into the output directory."""
    from .replay import replay as run_replay

    result = run_replay(
        trace_path,
        registry=Registry.load(registry_path),
        catalog=Catalog.load(catalog_path),
        backend=make_backend(backend),
        out_dir=out_dir,
        list_size=list_size,
        tz_offset_minutes=tz_offset,
    )
    metrics = result["metrics"]
    click.echo(json.dumps(metrics, sort_keys=True, indent=2))
    if result["skipped"]:
        click.echo(f"skipped {len(result['skipped'])} inapplicable events", err=True)


@main.command("gen-trace")
@click.option("--profile", "profile_path", type=click.Path(exists=True), default=None,
              help="Habit profile JSON; omitted means the shipped 5-habit profile.")
@click.option("--days", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def gen_trace_cmd(profile_path, days, seed, out_path):
    """Generate a deterministic synthetic habit trace."""
    from .replay import gen_trace

    profile = None
    if profile_path:
        with open(profile_path) as fh:
            profile = json.load(fh)
    events = gen_trace(profile, days, seed, out_path)
    click.echo(f"wrote {len(events)} events to {out_path}", err=True)


if __name__ == "__main__":
    sys.exit(main())
