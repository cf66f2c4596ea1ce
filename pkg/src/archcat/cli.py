"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 configuration validation failed,
4 corpus load failed, 5 query rejected.  Everything the HTTP service can
answer, `query` can print, so shell pipelines and the service cannot
disagree about semantics.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import engine as eng
from .config import load_bundle
from .engine import Engine, EngineLoadError
from .errors import ConfigError, CorpusError, RequestError
from .gen import GenParams, generate

EXIT_VALIDATION = 3
EXIT_CORPUS = 4
EXIT_QUERY = 5


def _echo_report(report, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(report.to_payload(), ensure_ascii=False, indent=2))
        return
    for finding in report.findings:
        click.echo(f"{finding.severity.upper()} {finding.location}: "
                   f"{finding.message}")
    status = "ok" if report.ok else "invalid"
    errors = sum(1 for f in report.findings if f.severity == "error")
    warnings = sum(1 for f in report.findings if f.severity == "warning")
    click.echo(f"configuration {status}: {errors} error(s), {warnings} warning(s)")


def _load_state(config, data):
    """Build an engine snapshot or exit with the conventional code."""
    engine = Engine(Path(config), Path(data))
    try:
        engine.load()
    except EngineLoadError as exc:
        if exc.report is not None:
            _echo_report(exc.report, as_json=False)
        else:
            click.echo(str(exc), err=True)
        sys.exit(EXIT_VALIDATION)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except CorpusError as exc:
        click.echo(f"corpus error: {exc}", err=True)
        sys.exit(EXIT_CORPUS)
    return engine


@click.group()
@click.version_option(package_name="archcat")
def main() -> None:
    """Explore entity catalogues extracted from transcribed source documents."""


@main.command()
@click.argument("config_root", type=click.Path(exists=True, file_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Print the report as JSON.")
def validate(config_root: str, as_json: bool) -> None:
    """Validate the configuration bundle under CONFIG_ROOT."""
    bundle, report = load_bundle(Path(config_root))
    _echo_report(report, as_json)
    if bundle is None:
        sys.exit(EXIT_VALIDATION)


@main.command()
@click.argument("config_root", type=click.Path(exists=True, file_okay=False))
@click.argument("data_root", type=click.Path(exists=True, file_okay=False))
def ingest(config_root: str, data_root: str) -> None:
    """Build every catalog once and print per-source row counts."""
    engine = _load_state(config_root, data_root)
    state = engine.state
    total_rows = 0
    for source_id, catalog in state.catalogs.by_source.items():
        parts = []
        for name, table in catalog.tables.items():
            parts.append(f"{name}: {len(table.rows)}")
            total_rows += len(table.rows)
        click.echo(f"{source_id} ({len(catalog.record_ids)} records)  "
                   + "; ".join(parts))
        for warning in catalog.warnings:
            click.echo(f"  warning: {warning}")
    for table in state.catalogs.global_catalog.tables.values():
        click.echo(f"[all sources] {table.name}: {len(table.rows)} rows")
    click.echo(f"total: {state.corpus.count()} records, {total_rows} rows")


def _parse_cli_filters(filter_texts) -> tuple:
    specs = []
    for text in filter_texts:
        try:
            obj = json.loads(text)
        except ValueError as exc:
            raise RequestError("bad_filter",
                               f"--filter must be a JSON object: {exc}")
        specs.append(eng.filter_from_obj(obj))
    return tuple(specs)


@main.command()
@click.option("--config", required=True, envvar="ARCHCAT_CONFIG",
              type=click.Path(exists=True, file_okay=False))
@click.option("--data", required=True, envvar="ARCHCAT_DATA",
              type=click.Path(exists=True, file_okay=False))
@click.option("--source", "source_id", help="Source type id (with --category).")
@click.option("--category", help="Category name within --source.")
@click.option("--global", "global_category",
              help="Query a cross-source category instead of a source one.")
@click.option("--record", "record_id", help="Only rows backed by this record.")
@click.option("--filter", "filters", multiple=True,
              help='JSON object, e.g. \'{"column":"age","op":"less_than","value":"30"}\'. Repeatable.')
@click.option("--sort", "sort_column", help="Column to sort by.")
@click.option("--desc", is_flag=True, help="Sort descending.")
@click.option("--offset", default=0, show_default=True)
@click.option("--limit", default=eng.DEFAULT_PAGE_LIMIT, show_default=True)
@click.option("--group-by", "group_column",
              help="Print value counts for this column instead of rows.")
@click.option("--entity", "entity_key",
              help="Print one entity's detail; the key is a JSON array.")
@click.option("--csv", "as_csv", is_flag=True,
              help="Emit CSV (all matching rows; paging does not apply).")
@click.option("--out", "out_file", type=click.Path(dir_okay=False),
              help="Write output to a file instead of stdout.")
def query(config, data, source_id, category, global_category, record_id,
          filters, sort_column, desc, offset, limit, group_column,
          entity_key, as_csv, out_file) -> None:
    """Run one table query and print JSON (default) or CSV."""
    if global_category is not None:
        if source_id or category:
            raise click.UsageError("--global excludes --source/--category")
        scope = ("global", None, global_category)
    else:
        if not source_id or not category:
            raise click.UsageError(
                "either --global, or both --source and --category, are required")
        scope = ("source", source_id, category)
    if record_id is not None and scope[0] == "global":
        raise click.UsageError("--record applies to source scopes only")

    engine = _load_state(config, data)
    state = engine.state
    try:
        table_query = eng.TableQuery(
            scope=scope,
            record_id=record_id,
            filters=_parse_cli_filters(filters),
            sort=(sort_column, "desc" if desc else "asc") if sort_column else None,
            offset=offset,
            limit=limit,
        )
        if entity_key is not None:
            payload = eng.entity_payload(state, scope, entity_key)
            raw = (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode()
        elif as_csv:
            if group_column is not None:
                raw = eng.groupby_csv_bytes(state, table_query, group_column)
            else:
                raw = eng.table_csv_bytes(state, table_query)
        elif group_column is not None:
            payload = eng.groupby_payload(state, table_query, group_column)
            raw = (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode()
        else:
            payload = eng.table_payload(state, table_query)
            raw = (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode()
    except RequestError as exc:
        click.echo(f"query rejected [{exc.code}]: {exc.message}", err=True)
        sys.exit(EXIT_QUERY)
    if out_file:
        Path(out_file).write_bytes(raw)
    else:
        sys.stdout.buffer.write(raw)
        sys.stdout.buffer.flush()


@main.command()
@click.option("--config", required=True, envvar="ARCHCAT_CONFIG",
              type=click.Path(exists=True, file_okay=False))
@click.option("--data", required=True, envvar="ARCHCAT_DATA",
              type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True,
              envvar="ARCHCAT_HOST")
@click.option("--port", default=8000, show_default=True, envvar="ARCHCAT_PORT")
@click.option("--no-admin", is_flag=True, envvar="ARCHCAT_NO_ADMIN",
              help="Disable the reload endpoint (returns 403).")
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False),
              envvar="ARCHCAT_UI",
              help="Serve a static web UI from this directory at /.")
def serve(config, data, host, port, no_admin, ui_dir) -> None:
    """Validate, build, then serve the HTTP API (refuses to start if invalid)."""
    engine = _load_state(config, data)
    from .service import create_app

    app = create_app(engine, admin_enabled=not no_admin, ui_dir=ui_dir)
    state = engine.state
    click.echo(f"serving {state.corpus.count()} records from "
               f"{len(state.catalogs.by_source)} source type(s) "
               f"on http://{host}:{port}")
    import uvicorn

    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=0, show_default=True)
@click.option("--sources", default=4, show_default=True)
@click.option("--records", default=40, show_default=True,
              help="Total records across all sources.")
@click.option("--people", default=12, show_default=True,
              help="Mean person entries per record.")
@click.option("--missing-rate", default=0.15, show_default=True)
@click.option("--repeat-rate", default=0.05, show_default=True)
def gen(out, seed, sources, records, people, missing_rate, repeat_rate) -> None:
    """Generate a synthetic corpus and configuration (same seed, same bytes)."""
    summary = generate(GenParams(
        out=Path(out), seed=seed, sources=sources, records=records,
        people=people, missing_rate=missing_rate, repeat_rate=repeat_rate))
    click.echo(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
