"""Query evaluation over built catalogs: filter, sort, page, group, connect.

All operations are full scans over in-memory rows.  Cells carry
precomputed casefolded and typed forms, so a scan is pointer-chasing and
comparisons only; at the corpus sizes this engine targets (hundreds of
records, low hundreds of thousands of rows) that stays comfortably
interactive and keeps the semantics trivially auditable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import errors
from .catalog import (
    ABSENT,
    MISSING,
    PRESENT,
    CatalogSet,
    CategoryTable,
    ColumnDesc,
    EntityRow,
    GlobalTable,
    typed_for,
)
from .config import Bundle, ConnectionSpec, RECORD_ID_PLACEHOLDER

TEXT_OPS = ("contains", "not_contains", "equals", "not_equals",
            "starts_with", "ends_with")
NUMERIC_OPS = ("num_equals", "num_not_equals", "less_than", "greater_than",
               "in_range")

DEFAULT_PAGE_LIMIT = 100
MAX_PAGE_LIMIT = 1000


@dataclass(frozen=True)
class Filter:
    column: str
    op: str
    value: str
    value2: str | None = None  # upper bound, in_range only


@dataclass(frozen=True)
class TableQuery:
    """One table request: which rows, in what order, which page.

    ``scope`` is either ("source", source_type_id, category_name) or
    ("global", None, category_name).  ``record_id`` restricts to rows whose
    provenance contains the record.  ``sort`` is (column, direction).
    """
    scope: tuple
    record_id: str | None = None
    filters: tuple[Filter, ...] = ()
    sort: tuple[str, str] | None = None
    offset: int = 0
    limit: int = DEFAULT_PAGE_LIMIT


@dataclass
class TablePage:
    columns: tuple[ColumnDesc, ...]
    rows: list[EntityRow]
    total: int
    offset: int
    limit: int
    table: CategoryTable | GlobalTable = field(repr=False, default=None)


@dataclass
class GroupBucket:
    label: str
    count: int


def resolve_table(catalogs: CatalogSet, scope: tuple) -> CategoryTable | GlobalTable:
    kind = scope[0]
    if kind == "source":
        _, source_id, category = scope
        catalog = catalogs.by_source.get(source_id)
        if catalog is None:
            raise errors.not_found(f"unknown source type {source_id!r}")
        table = catalog.tables.get(category)
        if table is None:
            raise errors.not_found(
                f"unknown category {category!r} in source {source_id!r}")
        return table
    if kind == "global":
        table = catalogs.global_catalog.tables.get(scope[2])
        if table is None:
            raise errors.not_found(f"unknown global category {scope[2]!r}")
        return table
    raise errors.RequestError("bad_request", f"unknown scope kind {kind!r}")


def _column_index(table, name: str, code: str, what: str) -> int:
    for i, col in enumerate(table.columns):
        if col.name == name:
            return i
    raise errors.RequestError(code, f"unknown {what} column {name!r}")


def check_filter(table, spec: Filter) -> None:
    index = _column_index(table, spec.column, "bad_filter", "filter")
    kind = table.columns[index].value_kind
    if kind == "text":
        allowed = TEXT_OPS
    else:
        allowed = NUMERIC_OPS
    if spec.op not in allowed:
        raise errors.RequestError(
            "bad_filter",
            f"operator {spec.op!r} is not valid for {kind} column {spec.column!r}",
            detail={"allowed": list(allowed)},
        )
    if spec.op == "in_range" and spec.value2 is None:
        raise errors.RequestError(
            "bad_filter", "in_range requires two boundary values")
    if spec.op in NUMERIC_OPS:
        from .catalog import parse_typed

        low = parse_typed(spec.value, kind)
        if low is None:
            raise errors.RequestError(
                "bad_filter",
                f"filter value {spec.value!r} is not a valid {kind}")
        if spec.value2 is not None:
            high = parse_typed(spec.value2, kind)
            if high is None:
                raise errors.RequestError(
                    "bad_filter",
                    f"filter value {spec.value2!r} is not a valid {kind}")
            if spec.op == "in_range" and not low <= high:
                raise errors.RequestError(
                    "bad_filter",
                    f"in_range bounds out of order: {spec.value!r} > {spec.value2!r}")


def _text_match(cell, op: str, needle: str) -> bool:
    folded = cell.folded
    if op == "contains":
        return needle in folded
    if op == "not_contains":
        return needle not in folded
    if op == "equals":
        return folded == needle
    if op == "not_equals":
        return folded != needle
    if op == "starts_with":
        return folded.startswith(needle)
    return folded.endswith(needle)  # ends_with


def _typed_match(cell, kind: str, op: str, low, high) -> bool:
    value = typed_for(cell, kind)
    if value is None:
        return False
    if op == "num_equals":
        return value == low
    if op == "num_not_equals":
        return value != low
    if op == "less_than":
        return value < low
    if op == "greater_than":
        return value > low
    return low <= value <= high  # in_range


def _compile_filter(table, spec: Filter):
    """Validate, then close over precomputed needles for the scan."""
    check_filter(table, spec)
    index = _column_index(table, spec.column, "bad_filter", "filter")
    kind = table.columns[index].value_kind
    if kind == "text":
        needle = spec.value.casefold()
        return lambda row: _text_match(row.cells[index], spec.op, needle)
    from .catalog import parse_typed

    low = parse_typed(spec.value, kind)
    high = parse_typed(spec.value2, kind) if spec.value2 is not None else None
    if kind == "decimal" and type(low) is int:
        low = float(low)
    if kind == "decimal" and type(high) is int:
        high = float(high)
    return lambda row: _typed_match(row.cells[index], kind, spec.op, low, high)


def filter_rows(table, rows: list[EntityRow], filters) -> list[EntityRow]:
    for spec in filters:
        predicate = _compile_filter(table, spec)
        rows = [row for row in rows if predicate(row)]
    return rows


def _sort_tier(cell, kind: str) -> int:
    """0 sortable value, 1 present but unparsed (typed columns), 2/3 sentinels."""
    if cell.state == MISSING:
        return 2
    if cell.state == ABSENT:
        return 3
    if kind == "text":
        return 0
    return 0 if typed_for(cell, kind) is not None else 1


def sort_rows(table, rows: list[EntityRow], column: str, direction: str) -> list[EntityRow]:
    if direction not in ("asc", "desc"):
        raise errors.RequestError(
            "bad_sort", f"sort direction must be asc or desc, got {direction!r}")
    index = _column_index(table, column, "bad_sort", "sort")
    kind = table.columns[index].value_kind
    reverse = direction == "desc"

    tiers: dict[int, list[EntityRow]] = {0: [], 1: [], 2: [], 3: []}
    for row in rows:
        tiers[_sort_tier(row.cells[index], kind)].append(row)

    if kind == "text":
        tiers[0].sort(key=lambda r: r.cells[index].folded, reverse=reverse)
    else:
        tiers[0].sort(key=lambda r: typed_for(r.cells[index], kind), reverse=reverse)
        tiers[1].sort(key=lambda r: r.cells[index].folded, reverse=reverse)
    # Sentinel tiers keep their relative order and always trail, regardless
    # of direction: reversing a sort must not surface the gaps.
    return tiers[0] + tiers[1] + tiers[2] + tiers[3]


def _scope_rows(table, record_id: str | None) -> list[EntityRow]:
    if record_id is None:
        return list(table.rows)
    by_record = getattr(table, "by_record", None)
    if by_record is None:
        raise errors.RequestError(
            "bad_request", "record scoping applies to source tables only")
    return [table.rows[i] for i in by_record.get(record_id, [])]


def run_table_query(catalogs: CatalogSet, query: TableQuery) -> TablePage:
    table = resolve_table(catalogs, query.scope)
    if query.record_id is not None and query.scope[0] == "source":
        catalog = catalogs.by_source[query.scope[1]]
        if query.record_id not in set(catalog.record_ids):
            raise errors.not_found(
                f"unknown record {query.record_id!r} in source {query.scope[1]!r}")
    rows = _scope_rows(table, query.record_id)
    rows = filter_rows(table, rows, query.filters)
    if query.sort is not None:
        rows = sort_rows(table, rows, query.sort[0], query.sort[1])
    total = len(rows)
    offset, limit = query.offset, query.limit
    if offset < 0:
        raise errors.RequestError("bad_page", f"offset must be >= 0, got {offset}")
    if not 1 <= limit <= MAX_PAGE_LIMIT:
        raise errors.RequestError(
            "bad_page", f"limit must be between 1 and {MAX_PAGE_LIMIT}, got {limit}")
    return TablePage(
        columns=table.columns,
        rows=rows[offset:offset + limit],
        total=total,
        offset=offset,
        limit=limit,
        table=table,
    )


def group_rows(table, rows: list[EntityRow], column: str) -> list[GroupBucket]:
    """Distinct display values with counts over the given rows.

    Grouping is by display string -- sentinels included, so the size of the
    gap in the data is itself a visible, countable fact.  Buckets order by
    count descending, then case-insensitive label, then raw label.
    """
    index = _column_index(table, column, "bad_group", "group-by")
    counts: dict[str, int] = {}
    for row in rows:
        label = row.cells[index].display
        counts[label] = counts.get(label, 0) + 1
    buckets = [GroupBucket(label, n) for label, n in counts.items()]
    buckets.sort(key=lambda b: (-b.count, b.label.casefold(), b.label))
    return buckets


def group_by(catalogs: CatalogSet, query: TableQuery, column: str) -> list[GroupBucket]:
    """Group-by over *all* rows matching the query's scope and filters."""
    table = resolve_table(catalogs, query.scope)
    _column_index(table, column, "bad_group", "group-by")
    if query.record_id is not None and query.scope[0] == "source":
        catalog = catalogs.by_source[query.scope[1]]
        if query.record_id not in set(catalog.record_ids):
            raise errors.not_found(
                f"unknown record {query.record_id!r} in source {query.scope[1]!r}")
    rows = _scope_rows(table, query.record_id)
    rows = filter_rows(table, rows, query.filters)
    return group_rows(table, rows, column)


# --- entity detail -------------------------------------------------------


@dataclass
class ConnectionRows:
    spec: ConnectionSpec
    table: CategoryTable
    rows: list[EntityRow]


def find_connection(table: CategoryTable | GlobalTable, label: str) -> ConnectionSpec:
    config = getattr(table, "config", None)
    if config is None:
        raise errors.not_found("global categories define no connections")
    for spec in config.connections:
        if spec.label == label:
            return spec
    raise errors.not_found(f"unknown connection {label!r}")


def connection_rows(
    catalogs: CatalogSet,
    source_id: str,
    subject_rows: list[EntityRow],
    spec: ConnectionSpec,
) -> ConnectionRows:
    """Rows of the connection's target category related to the subject entity.

    same_record: target rows sharing at least one provenance record with the
    subject.  key_match: target rows whose remote column display equals the
    subject's local column display, compared casefolded; sentinel displays
    match literally, which deliberately links "unknown here" to "unknown
    there" rather than hiding either.
    """
    catalog = catalogs.by_source[source_id]
    target = catalog.tables.get(spec.target_category)
    if target is None:
        raise errors.not_found(
            f"connection target category {spec.target_category!r} not found")
    if spec.join_kind == "same_record":
        wanted: set[str] = set()
        for row in subject_rows:
            wanted.update(row.provenance)
        indexes: set[int] = set()
        for record_id in wanted:
            indexes.update(target.by_record.get(record_id, []))
        rows = [target.rows[i] for i in sorted(indexes)]
    else:  # key_match
        rows = _key_match_rows(catalog, subject_rows, spec, target)
    return ConnectionRows(spec=spec, table=target, rows=rows)


def _key_match_rows(catalog, subject_rows, spec, target):
    owner = None
    for table in catalog.tables.values():
        if spec in table.config.connections:
            owner = table
            break
    if owner is None:  # pragma: no cover - config validation prevents this
        raise errors.not_found("connection has no owning category")
    local_index = next(
        i for i, c in enumerate(owner.columns) if c.name == spec.local_column)
    remote_index = next(
        i for i, c in enumerate(target.columns) if c.name == spec.remote_column)
    wanted = {row.cells[local_index].folded for row in subject_rows}
    return [row for row in target.rows if row.cells[remote_index].folded in wanted]


@dataclass
class EntityDetail:
    scope: tuple
    key: str
    identity: list[str]
    columns: tuple[ColumnDesc, ...]
    rows: list[EntityRow]
    connections: list[ConnectionRows]
    records: list[tuple[str, str, str | None]]  # (source, record_id, url)


def entity_detail(catalogs: CatalogSet, bundle: Bundle, scope: tuple, key: str) -> EntityDetail:
    """Everything shown on an entity page: rows, connections, source records."""
    kind = scope[0]
    table = resolve_table(catalogs, scope)
    rows = [table.rows[i] for i in table.by_key.get(key, [])]
    if not rows:
        raise errors.not_found(f"no entity with key {key} in {scope[2]!r}")

    connections: list[ConnectionRows] = []
    if kind == "source":
        config = table.config
        for spec in config.connections:
            connections.append(
                connection_rows(catalogs, scope[1], rows, spec))

    records: list[tuple[str, str, str | None]] = []
    seen: set[tuple[str, str]] = set()
    for row in rows:
        template = bundle.template(row.source_type_id)
        pattern = template.transcript_url_pattern if template else None
        for record_id in row.provenance:
            ref = (row.source_type_id, record_id)
            if ref in seen:
                continue
            seen.add(ref)
            url = None
            if pattern:
                url = pattern.replace(RECORD_ID_PLACEHOLDER, record_id)
            records.append((row.source_type_id, record_id, url))
    records.sort(key=lambda r: (r[0], r[1]))

    try:
        identity = json.loads(key)
    except ValueError:
        identity = []
    return EntityDetail(
        scope=scope,
        key=key,
        identity=identity if isinstance(identity, list) else [],
        columns=table.columns,
        rows=rows,
        connections=connections,
        records=records,
    )


def entity_sources(
    catalogs: CatalogSet, bundle: Bundle, category: str, key: str
) -> list[tuple[str, str, str, int]]:
    """Which sources mention this cross-source entity, and where to go next.

    One entry per (source, local category) contributing at least one row
    with the key, in row (= mapping) order: (source_type_id, display name,
    local category name, row count).  The UI redirects into the source's
    own entity page from these.
    """
    table = catalogs.global_catalog.tables.get(category)
    if table is None:
        raise errors.not_found(f"unknown global category {category!r}")
    counts: dict[tuple[str, str], int] = {}
    for index in table.by_key.get(key, []):
        row = table.rows[index]
        pair = (row.source_type_id, row.category)
        counts[pair] = counts.get(pair, 0) + 1
    out = []
    for (source_id, local_category), count in counts.items():
        template = bundle.template(source_id)
        display = template.display_name if template else source_id
        out.append((source_id, display, local_category, count))
    return out
