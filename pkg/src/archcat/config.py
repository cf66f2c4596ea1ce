"""Configuration bundle: templates, per-source entity categories, global view.

A deployment is configured by four kinds of UTF-8 JSON files under one
config root:

    templates.json          one entry per source type (id, group, name,
                            description, config file, optional transcript
                            URL pattern)
    <name>.json             per source type: the entity categories to
                            extract, their columns (paths + value kinds),
                            identity columns and connections
    explore_all.json        the global entity categories and their grouping
    explore_all_conf.json   which source tables feed each global category

Validation is eager and total: ``load_bundle`` returns a report and the
service refuses to start while the report has error findings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .paths import PathExpr, parse_path

VALUE_KINDS = ("text", "integer", "decimal", "date")
JOIN_KINDS = ("same_record", "key_match")

RECORD_ID_PLACEHOLDER = "{record_id}"


@dataclass(frozen=True)
class TemplateEntry:
    source_type_id: str
    group_label: str
    display_name: str
    description: str
    config_file: str
    transcript_url_pattern: str | None = None


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    path: PathExpr
    value_kind: str = "text"


@dataclass(frozen=True)
class ConnectionSpec:
    label: str
    target_category: str
    join_kind: str
    local_column: str | None = None
    remote_column: str | None = None


@dataclass(frozen=True)
class EntityCategoryConfig:
    name: str
    base_path: PathExpr
    columns: tuple[ColumnSpec, ...]
    identity: tuple[str, ...]
    connections: tuple[ConnectionSpec, ...] = ()

    def column(self, name: str) -> ColumnSpec | None:
        for col in self.columns:
            if col.name == name:
                return col
        return None


@dataclass(frozen=True)
class GlobalCategoryDecl:
    name: str
    group_label: str


@dataclass(frozen=True)
class ExploreAllConfig:
    global_categories: tuple[GlobalCategoryDecl, ...]
    # per global category name: ordered (source_type_id, local category name)
    mappings: dict[str, tuple[tuple[str, str], ...]]


@dataclass(frozen=True)
class Finding:
    severity: str  # "error" | "warning"
    location: str
    message: str


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    def error(self, location: str, message: str) -> None:
        self.findings.append(Finding("error", location, message))

    def warning(self, location: str, message: str) -> None:
        self.findings.append(Finding("warning", location, message))

    @property
    def ok(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    def to_payload(self) -> dict:
        return {
            "ok": self.ok,
            "findings": [
                {"severity": f.severity, "location": f.location, "message": f.message}
                for f in self.findings
            ],
        }


@dataclass
class Bundle:
    """All four configuration parts, parsed and cross-checked."""

    templates: list[TemplateEntry]
    source_categories: dict[str, list[EntityCategoryConfig]]
    explore_all: ExploreAllConfig

    def template(self, source_type_id: str) -> TemplateEntry | None:
        for entry in self.templates:
            if entry.source_type_id == source_type_id:
                return entry
        return None


def _decode_json(text: bytes, where: str):
    try:
        return json.loads(text.decode("utf-8-sig"))
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{where}: not UTF-8: {exc}", where)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{where}: malformed JSON: {exc}", where)


def _require_str(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value:
        raise ConfigError(f"{where}: missing or empty field {key!r}", where)
    return value


def parse_templates(text: bytes) -> list[TemplateEntry]:
    """Parse templates.json: a JSON array of source-type entries."""
    data = _decode_json(text, "templates.json")
    if not isinstance(data, list):
        raise ConfigError("templates.json: expected a JSON array", "templates.json")
    entries: list[TemplateEntry] = []
    seen: set[str] = set()
    for i, raw in enumerate(data):
        where = f"templates[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object", where)
        source_id = _require_str(raw, "id", where)
        if source_id in seen:
            raise ConfigError(f"{where}: duplicate id {source_id!r}", where)
        seen.add(source_id)
        pattern = raw.get("transcript_url")
        if pattern is not None and not isinstance(pattern, str):
            raise ConfigError(f"{where}: transcript_url must be a string", where)
        entries.append(
            TemplateEntry(
                source_type_id=source_id,
                group_label=_require_str(raw, "group", where),
                display_name=_require_str(raw, "name", where),
                description=_require_str(raw, "description", where),
                config_file=_require_str(raw, "config", where),
                transcript_url_pattern=pattern,
            )
        )
    return entries


def _parse_column(raw: dict, where: str) -> ColumnSpec:
    name = _require_str(raw, "name", where)
    path_text = _require_str(raw, "path", where)
    kind = raw.get("kind", "text")
    if kind not in VALUE_KINDS:
        raise ConfigError(f"{where}: unknown value kind {kind!r}", where)
    return ColumnSpec(name=name, path=parse_path(path_text), value_kind=kind)


def _parse_connection(raw: dict, where: str) -> ConnectionSpec:
    label = _require_str(raw, "label", where)
    target = _require_str(raw, "target", where)
    join = raw.get("join", "same_record")
    if join not in JOIN_KINDS:
        raise ConfigError(f"{where}: unknown join kind {join!r}", where)
    local = raw.get("local")
    remote = raw.get("remote")
    if join == "key_match":
        if not isinstance(local, str) or not isinstance(remote, str):
            raise ConfigError(
                f"{where}: key_match requires 'local' and 'remote' columns", where
            )
    else:
        local = remote = None
    return ConnectionSpec(
        label=label, target_category=target, join_kind=join,
        local_column=local, remote_column=remote,
    )


def parse_source_config(text: bytes, source_type_id: str) -> list[EntityCategoryConfig]:
    """Parse one source configuration file into its entity categories.

    Identity columns and connection targets are resolved here; key_match
    column existence is a bundle-level check (validate_bundle) so a single
    file parse stays local.
    """
    where0 = source_type_id
    data = _decode_json(text, where0)
    if not isinstance(data, dict) or not isinstance(data.get("categories"), list):
        raise ConfigError(f"{where0}: expected an object with a 'categories' array", where0)
    categories: list[EntityCategoryConfig] = []
    names: set[str] = set()
    for i, raw in enumerate(data["categories"]):
        where = f"{where0} categories[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object", where)
        name = _require_str(raw, "name", where)
        if name in names:
            raise ConfigError(f"{where}: duplicate category name {name!r}", where)
        names.add(name)
        base = parse_path(_require_str(raw, "base", where))
        raw_columns = raw.get("columns")
        if not isinstance(raw_columns, list) or not raw_columns:
            raise ConfigError(f"{where}: 'columns' must be a non-empty array", where)
        columns = []
        col_names: set[str] = set()
        for j, raw_col in enumerate(raw_columns):
            if not isinstance(raw_col, dict):
                raise ConfigError(f"{where} columns[{j}]: expected an object", where)
            col = _parse_column(raw_col, f"{where} columns[{j}]")
            if col.name in col_names:
                raise ConfigError(
                    f"{where} columns[{j}]: duplicate column name {col.name!r}", where
                )
            col_names.add(col.name)
            columns.append(col)
        identity = raw.get("identity")
        if not isinstance(identity, list) or not identity:
            raise ConfigError(f"{where}: 'identity' must be a non-empty array", where)
        for col_name in identity:
            if col_name not in col_names:
                raise ConfigError(
                    f"{where}: identity references unknown column {col_name!r}", where
                )
        connections = []
        for j, raw_conn in enumerate(raw.get("connections", []) or []):
            if not isinstance(raw_conn, dict):
                raise ConfigError(f"{where} connections[{j}]: expected an object", where)
            connections.append(_parse_connection(raw_conn, f"{where} connections[{j}]"))
        categories.append(
            EntityCategoryConfig(
                name=name,
                base_path=base,
                columns=tuple(columns),
                identity=tuple(identity),
                connections=tuple(connections),
            )
        )
    # Connection targets must exist within this source config.
    for cat in categories:
        for conn in cat.connections:
            if conn.target_category not in names:
                raise ConfigError(
                    f"{where0} category {cat.name!r}: connection {conn.label!r} "
                    f"targets unknown category {conn.target_category!r}",
                    where0,
                )
    return categories


def parse_explore_all(categories_text: bytes, mappings_text: bytes) -> ExploreAllConfig:
    """Parse explore_all.json (declarations) and explore_all_conf.json (mappings)."""
    decls_raw = _decode_json(categories_text, "explore_all.json")
    if not isinstance(decls_raw, list):
        raise ConfigError("explore_all.json: expected a JSON array", "explore_all.json")
    decls: list[GlobalCategoryDecl] = []
    seen: set[str] = set()
    for i, raw in enumerate(decls_raw):
        where = f"explore_all[{i}]"
        if not isinstance(raw, dict):
            raise ConfigError(f"{where}: expected an object", where)
        name = _require_str(raw, "name", where)
        if name in seen:
            raise ConfigError(f"{where}: duplicate global category {name!r}", where)
        seen.add(name)
        decls.append(GlobalCategoryDecl(name=name, group_label=_require_str(raw, "group", where)))

    maps_raw = _decode_json(mappings_text, "explore_all_conf.json")
    if not isinstance(maps_raw, dict):
        raise ConfigError(
            "explore_all_conf.json: expected an object keyed by global category",
            "explore_all_conf.json",
        )
    mappings: dict[str, tuple[tuple[str, str], ...]] = {}
    for name, raw_list in maps_raw.items():
        where = f"explore_all_conf[{name!r}]"
        if name not in seen:
            raise ConfigError(f"{where}: global category not declared in explore_all.json", where)
        if not isinstance(raw_list, list):
            raise ConfigError(f"{where}: expected an array of mappings", where)
        pairs = []
        for i, raw in enumerate(raw_list):
            if not isinstance(raw, dict):
                raise ConfigError(f"{where}[{i}]: expected an object", where)
            pairs.append(
                (_require_str(raw, "source", f"{where}[{i}]"),
                 _require_str(raw, "category", f"{where}[{i}]"))
            )
        mappings[name] = tuple(pairs)
    for decl in decls:
        mappings.setdefault(decl.name, ())
    return ExploreAllConfig(global_categories=tuple(decls), mappings=mappings)


def validate_bundle(
    templates: list[TemplateEntry],
    source_categories: dict[str, list[EntityCategoryConfig]],
    explore_all: ExploreAllConfig,
) -> ValidationReport:
    """Cross-check the parsed parts; findings are data, not failures."""
    report = ValidationReport()
    declared = {t.source_type_id for t in templates}

    for i, entry in enumerate(templates):
        where = f"templates[{i}] ({entry.source_type_id})"
        pattern = entry.transcript_url_pattern
        if pattern is not None and pattern.count(RECORD_ID_PLACEHOLDER) != 1:
            report.error(
                where,
                f"transcript_url must contain {RECORD_ID_PLACEHOLDER} exactly once",
            )
        if entry.source_type_id not in source_categories:
            report.error(where, "source configuration missing or unparsed")

    for source_id, categories in source_categories.items():
        by_name = {cat.name: cat for cat in categories}
        for cat in categories:
            for conn in cat.connections:
                where = f"{source_id} category {cat.name!r} connection {conn.label!r}"
                target = by_name.get(conn.target_category)
                if target is None:
                    report.error(where, f"unknown target category {conn.target_category!r}")
                    continue
                if conn.join_kind == "key_match":
                    if cat.column(conn.local_column or "") is None:
                        report.error(where, f"unknown local column {conn.local_column!r}")
                    if target.column(conn.remote_column or "") is None:
                        report.error(
                            where,
                            f"unknown remote column {conn.remote_column!r} "
                            f"in {conn.target_category!r}",
                        )

    for name, pairs in explore_all.mappings.items():
        for source_id, local_name in pairs:
            where = f"explore_all_conf[{name!r}] -> ({source_id}, {local_name})"
            if source_id not in declared:
                report.error(where, f"unknown source type {source_id!r}")
                continue
            categories = source_categories.get(source_id, [])
            if not any(cat.name == local_name for cat in categories):
                report.error(where, f"source {source_id!r} has no category {local_name!r}")
    return report


def load_bundle(config_root: str | Path) -> tuple[Bundle | None, ValidationReport]:
    """Load and validate the full bundle from a config root directory.

    Parse failures become error findings; the Bundle is returned only when
    the report is clean enough to build catalogs (no error findings).
    """
    root = Path(config_root)
    report = ValidationReport()

    def read(name: str) -> bytes | None:
        path = root / name
        if not path.is_file():
            report.error(name, "file not found")
            return None
        return path.read_bytes()

    templates: list[TemplateEntry] = []
    raw = read("templates.json")
    if raw is not None:
        try:
            templates = parse_templates(raw)
        except ConfigError as exc:
            report.error(exc.location, str(exc))

    source_categories: dict[str, list[EntityCategoryConfig]] = {}
    for entry in templates:
        raw = read(entry.config_file)
        if raw is None:
            continue
        try:
            source_categories[entry.source_type_id] = parse_source_config(
                raw, entry.source_type_id
            )
        except ConfigError as exc:
            report.error(exc.location, str(exc))

    explore_all = ExploreAllConfig(global_categories=(), mappings={})
    decls_raw = read("explore_all.json")
    maps_raw = read("explore_all_conf.json")
    if decls_raw is not None and maps_raw is not None:
        try:
            explore_all = parse_explore_all(decls_raw, maps_raw)
        except ConfigError as exc:
            report.error(exc.location, str(exc))

    report.findings.extend(
        validate_bundle(templates, source_categories, explore_all).findings
    )
    if not report.ok:
        return None, report
    return Bundle(templates, source_categories, explore_all), report
