"""Engine state and response assembly shared by the HTTP service and the CLI.

The engine owns one immutable snapshot at a time: config bundle, corpus,
and the catalogs built from them.  Reload builds a complete replacement
snapshot off to the side and swaps a single reference only if everything
validated and built -- a failed reload leaves the serving state untouched.

Every response the service returns is assembled here as plain dicts, and
the CLI prints the same structures; the two front ends cannot drift apart
because neither has private formatting logic.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from urllib.parse import quote

from . import errors
from .catalog import CatalogSet, build_catalog_set, category_counts
from .config import Bundle, ValidationReport, load_bundle
from .corpus import Corpus, load_corpus, record_text
from .csvout import groupby_csv, table_csv
from .query import (
    DEFAULT_PAGE_LIMIT,
    MAX_PAGE_LIMIT,
    Filter,
    TableQuery,
    connection_rows,
    entity_detail,
    entity_sources,
    filter_rows,
    find_connection,
    group_by,
    group_rows,
    resolve_table,
    run_table_query,
    sort_rows,
)


@dataclass(frozen=True)
class EngineState:
    generation: int
    bundle: Bundle
    corpus: Corpus
    catalogs: CatalogSet
    report: ValidationReport


class EngineLoadError(Exception):
    """Raised when a state cannot be built; carries the validation report."""

    def __init__(self, message: str, report: ValidationReport | None = None):
        super().__init__(message)
        self.report = report


def build_state(config_root, corpus_root, generation: int = 1) -> EngineState:
    bundle, report = load_bundle(config_root)
    if bundle is None:
        raise EngineLoadError("configuration is invalid", report)
    corpus = load_corpus(corpus_root, bundle.templates)
    catalogs = build_catalog_set(corpus, bundle)
    return EngineState(
        generation=generation,
        bundle=bundle,
        corpus=corpus,
        catalogs=catalogs,
        report=report,
    )


class Engine:
    """Holds the current snapshot; reload is atomic swap-on-success."""

    def __init__(self, config_root, corpus_root):
        self.config_root = config_root
        self.corpus_root = corpus_root
        self._lock = threading.Lock()
        self._state: EngineState | None = None

    def load(self) -> EngineState:
        state = build_state(self.config_root, self.corpus_root, generation=1)
        self._state = state
        return state

    @property
    def state(self) -> EngineState:
        state = self._state
        if state is None:
            raise RuntimeError("engine not loaded")
        return state

    def reload(self) -> EngineState:
        with self._lock:
            current = self.state
            try:
                fresh = build_state(
                    self.config_root, self.corpus_root,
                    generation=current.generation + 1)
            except EngineLoadError as exc:
                detail = exc.report.to_payload() if exc.report else None
                raise errors.RequestError(
                    "reload_failed",
                    f"reload failed, still serving generation {current.generation}",
                    detail=detail,
                ) from exc
            except (errors.ConfigError, errors.CorpusError) as exc:
                raise errors.RequestError(
                    "reload_failed",
                    f"reload failed, still serving generation {current.generation}",
                    detail={"error": str(exc)},
                ) from exc
            self._state = fresh
            return fresh


# --- request parsing helpers ---------------------------------------------

_FILTER_KEYS = {"column", "op", "value", "value2"}


def parse_filters(raw: str | None) -> tuple[Filter, ...]:
    """Decode the wire form of filters: a JSON array of filter objects."""
    if raw is None or raw == "":
        return ()
    try:
        data = json.loads(raw)
    except ValueError as exc:
        raise errors.RequestError(
            "bad_filter", f"filters must be a JSON array: {exc}") from exc
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise errors.RequestError("bad_filter", "filters must be a JSON array")
    return tuple(filter_from_obj(obj) for obj in data)


def filter_from_obj(obj) -> Filter:
    if not isinstance(obj, dict):
        raise errors.RequestError("bad_filter", "each filter must be an object")
    extra = set(obj) - _FILTER_KEYS
    if extra:
        raise errors.RequestError(
            "bad_filter", f"unknown filter fields: {sorted(extra)}")
    try:
        column, op, value = obj["column"], obj["op"], obj["value"]
    except KeyError as exc:
        raise errors.RequestError(
            "bad_filter", f"filter is missing field {exc.args[0]!r}") from exc
    value2 = obj.get("value2")
    if (not isinstance(column, str) or not isinstance(op, str)
            or not isinstance(value, str)
            or not (value2 is None or isinstance(value2, str))):
        raise errors.RequestError(
            "bad_filter", "filter fields must be strings")
    return Filter(column=column, op=op, value=value, value2=value2)


def parse_page(offset, limit) -> tuple[int, int]:
    try:
        offset = int(offset)
        limit = int(limit) if limit is not None else DEFAULT_PAGE_LIMIT
    except (TypeError, ValueError) as exc:
        raise errors.RequestError(
            "bad_page", "offset and limit must be integers") from exc
    if offset < 0:
        raise errors.RequestError("bad_page", f"offset must be >= 0, got {offset}")
    if not 1 <= limit <= MAX_PAGE_LIMIT:
        raise errors.RequestError(
            "bad_page",
            f"limit must be between 1 and {MAX_PAGE_LIMIT}, got {limit}")
    return offset, limit


def parse_sort(sort: str | None, direction: str | None) -> tuple[str, str] | None:
    if sort is None:
        if direction is not None:
            raise errors.RequestError("bad_sort", "dir given without sort column")
        return None
    direction = direction or "asc"
    if direction not in ("asc", "desc"):
        raise errors.RequestError(
            "bad_sort", f"sort direction must be asc or desc, got {direction!r}")
    return (sort, direction)


# --- payload assembly -----------------------------------------------------


def _column_payload(columns) -> list[dict]:
    return [{"name": c.name, "kind": c.value_kind} for c in columns]


def _row_payload(row) -> dict:
    return {
        "key": row.key,
        "source": row.source_type_id,
        "category": row.category,
        "cells": [cell.display for cell in row.cells],
        "provenance": list(row.provenance),
    }


def record_link(state: EngineState, source_id: str, record_id: str) -> str:
    """External transcript URL when a pattern is configured, else our own."""
    template = state.bundle.template(source_id)
    if template and template.transcript_url_pattern:
        return template.transcript_url_pattern.replace("{record_id}", record_id)
    return f"/api/records/{quote(source_id, safe='')}/{quote(record_id, safe='')}"


def entity_path(source_id: str, category: str, key: str) -> str:
    return (f"/api/sources/{quote(source_id, safe='')}"
            f"/categories/{quote(category, safe='')}"
            f"/entities/{quote(key, safe='')}")


def validation_payload(report: ValidationReport) -> dict:
    return report.to_payload()


def templates_payload(state: EngineState) -> dict:
    """Grouped source-type listing, ordered as the templates file orders it."""
    groups: dict[str, list] = {}
    order: list[str] = []
    for template in state.bundle.templates:
        if template.group_label not in groups:
            groups[template.group_label] = []
            order.append(template.group_label)
        catalog = state.catalogs.by_source[template.source_type_id]
        groups[template.group_label].append({
            "id": template.source_type_id,
            "name": template.display_name,
            "description": template.description,
            "record_count": len(catalog.record_ids),
            "categories": [
                {"name": name, "rows": count}
                for name, count in category_counts(catalog)
            ],
        })
    return {"groups": [{"label": label, "sources": groups[label]}
                       for label in order]}


def globals_payload(state: EngineState) -> dict:
    groups: dict[str, list] = {}
    order: list[str] = []
    for decl in state.bundle.explore_all.global_categories:
        if decl.group_label not in groups:
            groups[decl.group_label] = []
            order.append(decl.group_label)
        table = state.catalogs.global_catalog.tables[decl.name]
        groups[decl.group_label].append({
            "name": decl.name,
            "rows": len(table.rows),
            "sources": sorted({row.source_type_id for row in table.rows}),
        })
    return {"groups": [{"label": label, "categories": groups[label]}
                       for label in order]}


def records_payload(state: EngineState, source_id: str) -> dict:
    catalog = state.catalogs.by_source.get(source_id)
    if catalog is None:
        raise errors.not_found(f"unknown source type {source_id!r}")
    return {
        "source": source_id,
        "records": [
            {"id": record_id, "url": record_link(state, source_id, record_id)}
            for record_id in catalog.record_ids
        ],
    }


def categories_payload(state: EngineState, source_id: str,
                       record_id: str | None = None) -> dict:
    """Per-category row counts, for the whole source or one record."""
    catalog = state.catalogs.by_source.get(source_id)
    if catalog is None:
        raise errors.not_found(f"unknown source type {source_id!r}")
    return {
        "source": source_id,
        "record": record_id,
        "categories": [
            {"name": name, "rows": count}
            for name, count in category_counts(catalog, record_id)
        ],
    }


def record_bytes(state: EngineState, source_id: str, record_id: str) -> bytes:
    """The transcript exactly as it sits on disk."""
    if source_id not in state.catalogs.by_source:
        raise errors.not_found(f"unknown source type {source_id!r}")
    record = state.corpus.get(source_id, record_id)
    if record is None:
        raise errors.not_found(
            f"unknown record {record_id!r} in source {source_id!r}")
    return record_text(record)


def _echo_payload(query: TableQuery) -> dict:
    """What was evaluated, so a UI can rebuild its controls from a response."""
    return {
        "record": query.record_id,
        "filters": [
            {"column": f.column, "op": f.op, "value": f.value,
             **({"value2": f.value2} if f.value2 is not None else {})}
            for f in query.filters
        ],
        "sort": query.sort[0] if query.sort else None,
        "dir": query.sort[1] if query.sort else None,
    }


def table_payload(state: EngineState, query: TableQuery) -> dict:
    page = run_table_query(state.catalogs, query)
    return {
        "scope": _scope_payload(query.scope),
        "query": _echo_payload(query),
        "columns": _column_payload(page.columns),
        "rows": [_row_payload(row) for row in page.rows],
        "total": page.total,
        "offset": page.offset,
        "limit": page.limit,
    }


def _scope_payload(scope: tuple) -> dict:
    if scope[0] == "source":
        return {"kind": "source", "source": scope[1], "category": scope[2]}
    return {"kind": "global", "category": scope[2]}


def groupby_payload(state: EngineState, query: TableQuery, column: str) -> dict:
    buckets = group_by(state.catalogs, query, column)
    return {
        "scope": _scope_payload(query.scope),
        "query": _echo_payload(query),
        "column": column,
        "buckets": [{"label": b.label, "count": b.count} for b in buckets],
        "total": sum(b.count for b in buckets),
    }


def table_csv_bytes(state: EngineState, query: TableQuery) -> bytes:
    """CSV of *all* rows matching the query -- export ignores paging."""
    table = resolve_table(state.catalogs, query.scope)
    return table_csv(table.columns, _all_rows(state, query))


def groupby_csv_bytes(state: EngineState, query: TableQuery, column: str) -> bytes:
    buckets = group_by(state.catalogs, query, column)
    return groupby_csv(column, buckets)


def _all_rows(state: EngineState, query: TableQuery):
    """Filtered (and optionally sorted) rows without paging, for export."""
    from .query import _scope_rows  # shared scan pipeline

    table = resolve_table(state.catalogs, query.scope)
    if query.record_id is not None and query.scope[0] == "source":
        catalog = state.catalogs.by_source[query.scope[1]]
        if query.record_id not in set(catalog.record_ids):
            raise errors.not_found(
                f"unknown record {query.record_id!r} in source {query.scope[1]!r}")
    rows = _scope_rows(table, query.record_id)
    rows = filter_rows(table, rows, query.filters)
    if query.sort is not None:
        rows = sort_rows(table, rows, query.sort[0], query.sort[1])
    return rows


def entity_payload(state: EngineState, scope: tuple, key: str) -> dict:
    detail = entity_detail(state.catalogs, state.bundle, scope, key)
    connections = []
    for conn in detail.connections:
        connections.append({
            "label": conn.spec.label,
            "target": conn.spec.target_category,
            "join": conn.spec.join_kind,
            "columns": _column_payload(conn.table.columns),
            "rows": [_row_payload(row) for row in conn.rows[:DEFAULT_PAGE_LIMIT]],
            "total": len(conn.rows),
        })
    return {
        "scope": _scope_payload(scope),
        "key": detail.key,
        "identity": detail.identity,
        "columns": _column_payload(detail.columns),
        "rows": [_row_payload(row) for row in detail.rows],
        "connections": connections,
        "records": [
            {
                "source": source,
                "record_id": record_id,
                "url": url if url is not None
                       else record_link(state, source, record_id),
            }
            for source, record_id, url in detail.records
        ],
    }


def entity_sources_payload(state: EngineState, category: str, key: str) -> dict:
    """Sources mentioning a cross-source entity, with redirect paths."""
    entries = entity_sources(state.catalogs, state.bundle, category, key)
    return {
        "category": category,
        "key": key,
        "sources": [
            {
                "source": source_id,
                "name": display,
                "category": local_category,
                "rows": count,
                "path": entity_path(source_id, local_category, key),
            }
            for source_id, display, local_category, count in entries
        ],
    }


def _connection_row_set(state: EngineState, source_id: str, category: str,
                        key: str, label: str):
    """Resolve a connection's target table and unpaged row set."""
    scope = ("source", source_id, category)
    table = resolve_table(state.catalogs, scope)
    subject_rows = [table.rows[i] for i in table.by_key.get(key, [])]
    if not subject_rows:
        raise errors.not_found(f"no entity with key {key} in {category!r}")
    spec = find_connection(table, label)
    return connection_rows(state.catalogs, source_id, subject_rows, spec)


def connection_payload(state: EngineState, source_id: str, category: str,
                       key: str, label: str, filters=(), sort=None,
                       offset: int = 0, limit: int = DEFAULT_PAGE_LIMIT) -> dict:
    """A filterable, sortable, pageable view over one connection's rows."""
    conn = _connection_row_set(state, source_id, category, key, label)
    rows = filter_rows(conn.table, conn.rows, filters)
    if sort is not None:
        rows = sort_rows(conn.table, rows, sort[0], sort[1])
    total = len(rows)
    if offset < 0:
        raise errors.RequestError("bad_page", f"offset must be >= 0, got {offset}")
    if not 1 <= limit <= MAX_PAGE_LIMIT:
        raise errors.RequestError(
            "bad_page", f"limit must be between 1 and {MAX_PAGE_LIMIT}, got {limit}")
    return {
        "label": conn.spec.label,
        "target": conn.spec.target_category,
        "join": conn.spec.join_kind,
        "columns": _column_payload(conn.table.columns),
        "rows": [_row_payload(row) for row in rows[offset:offset + limit]],
        "total": total,
        "offset": offset,
        "limit": limit,
    }


def connection_groupby_payload(state: EngineState, source_id: str, category: str,
                               key: str, label: str, column: str,
                               filters=()) -> dict:
    conn = _connection_row_set(state, source_id, category, key, label)
    rows = filter_rows(conn.table, conn.rows, filters)
    buckets = group_rows(conn.table, rows, column)
    return {
        "label": label,
        "column": column,
        "buckets": [{"label": b.label, "count": b.count} for b in buckets],
        "total": sum(b.count for b in buckets),
    }


def connection_csv_bytes(state: EngineState, source_id: str, category: str,
                         key: str, label: str, filters=(), sort=None) -> bytes:
    conn = _connection_row_set(state, source_id, category, key, label)
    rows = filter_rows(conn.table, conn.rows, filters)
    if sort is not None:
        rows = sort_rows(conn.table, rows, sort[0], sort[1])
    return table_csv(conn.table.columns, rows)


def health_payload(state: EngineState) -> dict:
    total_rows = sum(
        len(table.rows)
        for catalog in state.catalogs.by_source.values()
        for table in catalog.tables.values()
    )
    return {
        "status": "ok",
        "generation": state.generation,
        "sources": len(state.catalogs.by_source),
        "records": state.corpus.count(),
        "rows": total_rows,
        "warnings": sum(len(c.warnings) for c in state.catalogs.by_source.values()),
    }
