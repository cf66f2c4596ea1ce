"""Entity catalogs: extract rows from the corpus, deduplicate, index, unify.

Extraction walks every record of a source type once per configured entity
category: the category's base path yields candidate entities, column paths
(relative to each base node) fill the cells, and candidates identical in
*all* cells merge into one row whose provenance is the set of records that
produced it.  Merging only perfect duplicates never conflates distinct
evidence; cross-source identity is a navigation key, not a merge.

Two reserved display values keep absence honest for researchers:

    "None or unfilled"  the record simply has no value for the field
    "n/a"               the row's source does not define the column at all
                        (global view only)
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from . import errors
from .config import Bundle, EntityCategoryConfig, ExploreAllConfig
from .corpus import Corpus, TranscriptRecord
from .paths import evaluate

MISSING_TEXT = "None or unfilled"
ABSENT_TEXT = "n/a"

PRESENT = 0
MISSING = 1
ABSENT = 2


class CellValue:
    """One table cell: display string, casefolded form, optional typed value.

    ``state`` distinguishes a present value from the two sentinels.  The
    folded form and the typed value are precomputed at build time so that
    filtering and sorting never re-derive them per query.
    """

    __slots__ = ("state", "display", "folded", "typed")

    def __init__(self, state: int, display: str, folded: str, typed):
        self.state = state
        self.display = display
        self.folded = folded
        self.typed = typed

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"CellValue({self.display!r})"


MISSING_CELL = CellValue(MISSING, MISSING_TEXT, MISSING_TEXT.casefold(), None)
ABSENT_CELL = CellValue(ABSENT, ABSENT_TEXT, ABSENT_TEXT.casefold(), None)

_INT_RE = re.compile(r"[+-]?[0-9]+")
_DEC_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")
_DATE_RE = re.compile(r"([0-9]{4})(?:-([0-9]{2})(?:-([0-9]{2}))?)?")


def parse_typed(display: str, value_kind: str):
    """Parse a display string per the column's value kind; None if it doesn't.

    Dates are ISO-8601 with partial precision (YYYY, YYYY-MM, YYYY-MM-DD)
    represented as int tuples, which order chronologically with a year
    sorting before any of its months.  Anything unparsed stays text-only:
    it sorts lexicographically and numeric/date filters skip it.
    """
    if value_kind == "integer":
        if _INT_RE.fullmatch(display):
            return int(display)
    elif value_kind == "decimal":
        if _DEC_RE.fullmatch(display):
            value = float(display)
            if value == value and value not in (float("inf"), float("-inf")):
                return value
    elif value_kind == "date":
        match = _DATE_RE.fullmatch(display)
        if match:
            year = int(match.group(1))
            parts = [year]
            if match.group(2) is not None:
                month = int(match.group(2))
                if not 1 <= month <= 12:
                    return None
                parts.append(month)
            if match.group(3) is not None:
                day = int(match.group(3))
                if not 1 <= day <= 31:
                    return None
                parts.append(day)
            return tuple(parts)
    return None


def typed_for(cell: CellValue, value_kind: str):
    """The cell's typed value, iff compatible with the queried column kind.

    In the global view a column name can carry different kinds in different
    sources; a typed value only participates in numeric/date filtering and
    sorting when its shape matches the kind being queried.
    """
    typed = cell.typed
    if typed is None:
        return None
    if value_kind == "integer":
        return typed if type(typed) is int else None
    if value_kind == "decimal":
        if type(typed) is int:
            return float(typed)
        return typed if type(typed) is float else None
    if value_kind == "date":
        return typed if type(typed) is tuple else None
    return None


def render_scalar(value) -> str:
    """Canonical JSON textual form for scalars found where text is expected."""
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return json.dumps(value)
    raise TypeError(f"not a scalar: {type(value).__name__}")


def canonical_key(values: list[str]) -> str:
    """Identity key: the JSON-array serialization of the identity displays."""
    return json.dumps(values, ensure_ascii=False, separators=(",", ":"))


@dataclass(frozen=True)
class ColumnDesc:
    name: str
    value_kind: str


class EntityRow:
    __slots__ = ("category", "source_type_id", "cells", "provenance", "key")

    def __init__(self, category: str, source_type_id: str, cells: tuple,
                 provenance: list[str], key: str):
        self.category = category
        self.source_type_id = source_type_id
        self.cells = cells
        self.provenance = provenance
        self.key = key

    def cell_map(self, columns: tuple[ColumnDesc, ...]) -> dict[str, CellValue]:
        return {col.name: cell for col, cell in zip(columns, self.cells)}


@dataclass
class CategoryTable:
    name: str
    config: EntityCategoryConfig
    columns: tuple[ColumnDesc, ...]
    rows: list[EntityRow] = field(default_factory=list)
    by_key: dict[str, list[int]] = field(default_factory=dict)
    by_record: dict[str, list[int]] = field(default_factory=dict)


@dataclass
class SourceCatalog:
    source_type_id: str
    tables: dict[str, CategoryTable]
    record_ids: list[str]
    warnings: list[str] = field(default_factory=list)


@dataclass
class GlobalTable:
    name: str
    group_label: str
    columns: tuple[ColumnDesc, ...]
    rows: list[EntityRow] = field(default_factory=list)
    by_key: dict[str, list[int]] = field(default_factory=dict)


@dataclass
class GlobalCatalog:
    tables: dict[str, GlobalTable]


def _make_cell(display: str, value_kind: str, cache: dict) -> CellValue:
    cell = cache.get((value_kind, display))
    if cell is None:
        cell = CellValue(PRESENT, display, display.casefold(), parse_typed(display, value_kind))
        cache[(value_kind, display)] = cell
    return cell


def extract_candidates(
    record: TranscriptRecord,
    category: EntityCategoryConfig,
    cache: dict | None = None,
    warnings: list[str] | None = None,
) -> list[tuple[CellValue, ...]]:
    """Candidate rows (cell tuples) for one category of one record.

    One candidate per base node, in document order.  A column with no match
    yields the missing sentinel; multiple matches join with "; " in
    document order; non-scalar matches yield nothing and a warning
    (transcripts are hand-made: fail soft, report loudly).
    """
    if cache is None:
        cache = {}
    candidates: list[tuple[CellValue, ...]] = []
    for base_node, base_loc in evaluate(record.root, category.base_path):
        cells: list[CellValue] = []
        for col in category.columns:
            parts: list[str] | None = None
            for value, loc in evaluate(base_node, col.path, prefix=base_loc):
                if isinstance(value, (dict, list)):
                    if warnings is not None:
                        warnings.append(
                            f"{record.source_type_id}/{record.record_id}: column "
                            f"{col.name!r} at {loc}: expected a scalar, found "
                            f"{'object' if isinstance(value, dict) else 'array'}"
                        )
                    continue
                if parts is None:
                    parts = [render_scalar(value)]
                else:
                    parts.append(render_scalar(value))
            if parts is None:
                cells.append(MISSING_CELL)
            else:
                cells.append(_make_cell("; ".join(parts), col.value_kind, cache))
        candidates.append(tuple(cells))
    return candidates


def build_source_catalog(
    corpus: Corpus,
    source_type_id: str,
    categories: list[EntityCategoryConfig],
) -> SourceCatalog:
    """Extract, merge and index every configured category of one source."""
    records = corpus.records(source_type_id)
    warnings: list[str] = []
    cache: dict = {}
    tables: dict[str, CategoryTable] = {}
    for category in categories:
        columns = tuple(ColumnDesc(c.name, c.value_kind) for c in category.columns)
        identity_idx = [
            next(i for i, c in enumerate(category.columns) if c.name == name)
            for name in category.identity
        ]
        table = CategoryTable(name=category.name, config=category, columns=columns)
        by_signature: dict[tuple, int] = {}
        for record in records:
            for cells in extract_candidates(record, category, cache, warnings):
                signature = tuple((c.state, c.display) for c in cells)
                index = by_signature.get(signature)
                if index is None:
                    key = canonical_key([cells[i].display for i in identity_idx])
                    table.rows.append(
                        EntityRow(category.name, source_type_id, cells,
                                  [record.record_id], key)
                    )
                    by_signature[signature] = len(table.rows) - 1
                else:
                    provenance = table.rows[index].provenance
                    if provenance[-1] != record.record_id:
                        provenance.append(record.record_id)
        for index, row in enumerate(table.rows):
            table.by_key.setdefault(row.key, []).append(index)
            for record_id in row.provenance:
                table.by_record.setdefault(record_id, []).append(index)
        tables[category.name] = table
    return SourceCatalog(
        source_type_id=source_type_id,
        tables=tables,
        record_ids=[r.record_id for r in records],
        warnings=warnings,
    )


def build_global_catalog(
    source_catalogs: dict[str, SourceCatalog],
    explore_all: ExploreAllConfig,
) -> GlobalCatalog:
    """Unify mapped source tables per global category.

    Columns are the union of the mapped sources' columns in first-seen
    order (the first occurrence also fixes the column's value kind); rows
    concatenate in mapping order, tagged with their source, and are never
    merged across sources -- reconciling representations of the same entity
    is a separate problem this engine does not attempt.
    """
    tables: dict[str, GlobalTable] = {}
    for decl in explore_all.global_categories:
        columns: list[ColumnDesc] = []
        seen: set[str] = set()
        pairs = explore_all.mappings.get(decl.name, ())
        for source_id, local_name in pairs:
            table = source_catalogs[source_id].tables[local_name]
            for col in table.columns:
                if col.name not in seen:
                    seen.add(col.name)
                    columns.append(col)
        unified = GlobalTable(name=decl.name, group_label=decl.group_label,
                              columns=tuple(columns))
        for source_id, local_name in pairs:
            table = source_catalogs[source_id].tables[local_name]
            positions = {col.name: i for i, col in enumerate(table.columns)}
            layout = [positions.get(col.name) for col in columns]
            for row in table.rows:
                cells = tuple(
                    ABSENT_CELL if pos is None else row.cells[pos] for pos in layout
                )
                unified.rows.append(
                    EntityRow(local_name, source_id, cells, row.provenance, row.key))
        for index, row in enumerate(unified.rows):
            unified.by_key.setdefault(row.key, []).append(index)
        tables[decl.name] = unified
    return GlobalCatalog(tables=tables)


def category_counts(
    catalog: SourceCatalog, record_id: str | None = None
) -> list[tuple[str, int]]:
    """Deduplicated row counts per category, optionally scoped to one record."""
    if record_id is not None and record_id not in set(catalog.record_ids):
        raise errors.not_found(
            f"unknown record {record_id!r} in source {catalog.source_type_id!r}"
        )
    counts = []
    for name, table in catalog.tables.items():
        if record_id is None:
            counts.append((name, len(table.rows)))
        else:
            counts.append((name, len(table.by_record.get(record_id, []))))
    return counts


def entity_key_of(row: EntityRow) -> str:
    return row.key


def lookup(catalog: SourceCatalog | GlobalCatalog, category: str, key: str) -> list[EntityRow]:
    """All rows whose identity tuple equals the key (possibly several)."""
    tables = catalog.tables
    table = tables.get(category)
    if table is None:
        raise errors.not_found(f"unknown category {category!r}")
    return [table.rows[i] for i in table.by_key.get(key, [])]


@dataclass
class CatalogSet:
    by_source: dict[str, SourceCatalog]
    global_catalog: GlobalCatalog


def build_catalog_set(corpus: Corpus, bundle: Bundle) -> CatalogSet:
    by_source = {
        source_id: build_source_catalog(corpus, source_id, categories)
        for source_id, categories in bundle.source_categories.items()
    }
    return CatalogSet(
        by_source=by_source,
        global_catalog=build_global_catalog(by_source, bundle.explore_all),
    )
