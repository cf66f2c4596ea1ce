"""Naive reference implementation used as an oracle in tests.

Everything here is written from the behavioural contract alone, on purpose:
no imports from the package under test, no shared helpers, no indexes, no
precomputation.  It operates directly on raw config dicts and record JSON
trees and does full scans everywhere.  Slow and obvious beats fast and
clever -- if the real engine and this file agree on thousands of random
inputs, a shared misreading is the only way both can be wrong.

Cells are (state, display) pairs with state in {"present", "missing",
"absent"} so that a transcribed literal "None or unfilled" string never
collides with a genuinely missing cell.  Each row carries a parallel
"kinds" list: the value kind of the column *in the row's own source*,
because a typed value exists only under its source column's kind -- in a
unified cross-source column a text-kind "42" stays text and never joins
numeric filtering, no matter what kind the unified column ended up with.
"""

import json
import re

MISSING = ("missing", "None or unfilled")
ABSENT = ("absent", "n/a")


# --- path walking ---------------------------------------------------------

def split_path(text):
    """'a.b[].c' -> [('a', False), ('b', True), ('c', False)]"""
    segments = []
    for part in text.split("."):
        if part.endswith("[]"):
            segments.append((part[:-2], True))
        else:
            segments.append((part, False))
    return segments


def walk(node, segments):
    if not segments:
        yield node
        return
    name, iterate = segments[0]
    if not isinstance(node, dict) or name not in node or node[name] is None:
        return
    child = node[name]
    if iterate:
        if isinstance(child, list):
            for element in child:
                if element is not None:
                    yield from walk(element, segments[1:])
    else:
        yield from walk(child, segments[1:])


def show(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return json.dumps(value)  # float


# --- extraction -----------------------------------------------------------

def column_kinds(category):
    return [(c["name"], c.get("kind", "text")) for c in category["columns"]]


def extract(records, category):
    """records: list of (record_id, tree). Returns deduplicated row dicts."""
    base = split_path(category["base"])
    kinds = [k for _, k in column_kinds(category)]
    rows = []
    index_of = {}
    for record_id, tree in records:
        for base_node in walk(tree, base):
            cells = []
            for column in category["columns"]:
                found = [v for v in walk(base_node, split_path(column["path"]))
                         if not isinstance(v, (dict, list))]
                if found:
                    cells.append(("present", "; ".join(show(v) for v in found)))
                else:
                    cells.append(MISSING)
            signature = tuple(cells)
            if signature in index_of:
                row = rows[index_of[signature]]
                if record_id not in row["provenance"]:
                    row["provenance"].append(record_id)
            else:
                index_of[signature] = len(rows)
                names = [c["name"] for c in category["columns"]]
                identity = [cells[names.index(n)][1] for n in category["identity"]]
                rows.append({
                    "cells": cells,
                    "kinds": kinds,
                    "provenance": [record_id],
                    "key": json.dumps(identity, ensure_ascii=False,
                                      separators=(",", ":")),
                    "category": category["name"],
                })
    return rows


def global_view(per_source_rows, mappings, configs):
    """per_source_rows: {(source, category): rows}; mappings: ordered
    [(source, category)]; configs: {source: {category: category_cfg}}.
    Returns (columns, rows) with rows re-laid-out on the unified columns."""
    columns = []
    for source, name in mappings:
        for col_name, kind in column_kinds(configs[source][name]):
            if col_name not in [c[0] for c in columns]:
                columns.append((col_name, kind))
    rows = []
    for source, name in mappings:
        local = column_kinds(configs[source][name])
        local_names = [c[0] for c in local]
        for row in per_source_rows[(source, name)]:
            cells = []
            kinds = []
            for col_name, _ in columns:
                if col_name in local_names:
                    idx = local_names.index(col_name)
                    cells.append(row["cells"][idx])
                    kinds.append(local[idx][1])
                else:
                    cells.append(ABSENT)
                    kinds.append(None)
            rows.append({
                "cells": cells,
                "kinds": kinds,
                "provenance": row["provenance"],
                "key": row["key"],
                "source": source,
                "category": name,
            })
    return columns, rows


# --- typed parsing --------------------------------------------------------

INT_PAT = re.compile(r"^[+-]?[0-9]+$")
DEC_PAT = re.compile(r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?$")
DATE_PAT = re.compile(r"^([0-9]{4})(-([0-9]{2})(-([0-9]{2}))?)?$")


def typed(display, kind):
    if kind == "integer":
        if INT_PAT.match(display):
            return int(display)
        return None
    if kind == "decimal":
        if DEC_PAT.match(display):
            value = float(display)
            if value in (float("inf"), float("-inf")):
                return None
            return value
        return None
    if kind == "date":
        m = DATE_PAT.match(display)
        if not m:
            return None
        pieces = [int(m.group(1))]
        if m.group(3):
            if not (1 <= int(m.group(3)) <= 12):
                return None
            pieces.append(int(m.group(3)))
        if m.group(5):
            if not (1 <= int(m.group(5)) <= 31):
                return None
            pieces.append(int(m.group(5)))
        return tuple(pieces)
    return None


def cell_typed(cell, source_kind, query_kind):
    """Typed value a cell contributes when queried under query_kind.

    The parse happens under the cell's own source kind; the result then has
    to be shape-compatible with the kind being queried (an integer widens
    to decimal; nothing else crosses kinds).
    """
    state, display = cell
    if state != "present" or source_kind in (None, "text"):
        return None
    value = typed(display, source_kind)
    if value is None:
        return None
    if query_kind == "integer":
        return value if isinstance(value, int) else None
    if query_kind == "decimal":
        return float(value) if isinstance(value, (int, float)) else None
    if query_kind == "date":
        return value if isinstance(value, tuple) else None
    return None


# --- query evaluation -----------------------------------------------------

def match(cell, source_kind, query_kind, op, value, value2=None):
    if op in ("contains", "not_contains", "equals", "not_equals",
              "starts_with", "ends_with"):
        hay = cell[1].casefold()
        needle = value.casefold()
        if op == "contains":
            return needle in hay
        if op == "not_contains":
            return needle not in hay
        if op == "equals":
            return hay == needle
        if op == "not_equals":
            return hay != needle
        if op == "starts_with":
            return hay.startswith(needle)
        return hay.endswith(needle)
    have = cell_typed(cell, source_kind, query_kind)
    if have is None:
        return False
    want = typed(value, query_kind)
    if query_kind == "decimal":
        want = float(want)
    if op == "num_equals":
        return have == want
    if op == "num_not_equals":
        return have != want
    if op == "less_than":
        return have < want
    if op == "greater_than":
        return have > want
    want2 = typed(value2, query_kind)
    if query_kind == "decimal":
        want2 = float(want2)
    return want <= have <= want2


def apply_filters(rows, columns, filters):
    names = [c[0] for c in columns]
    for f in filters:
        idx = names.index(f["column"])
        query_kind = columns[idx][1]
        rows = [r for r in rows
                if match(r["cells"][idx], r["kinds"][idx], query_kind,
                         f["op"], f["value"], f.get("value2"))]
    return rows


def sort_reference(rows, columns, column, direction):
    names = [c[0] for c in columns]
    idx = names.index(column)
    query_kind = columns[idx][1]

    def tier(row):
        state, _ = row["cells"][idx]
        if state == "missing":
            return 2
        if state == "absent":
            return 3
        if query_kind == "text":
            return 0
        value = cell_typed(row["cells"][idx], row["kinds"][idx], query_kind)
        return 0 if value is not None else 1

    buckets = {0: [], 1: [], 2: [], 3: []}
    for row in rows:
        buckets[tier(row)].append(row)
    reverse = direction == "desc"
    if query_kind == "text":
        buckets[0] = sorted(buckets[0],
                            key=lambda r: r["cells"][idx][1].casefold(),
                            reverse=reverse)
    else:
        buckets[0] = sorted(
            buckets[0],
            key=lambda r: cell_typed(r["cells"][idx], r["kinds"][idx], query_kind),
            reverse=reverse)
        buckets[1] = sorted(buckets[1],
                            key=lambda r: r["cells"][idx][1].casefold(),
                            reverse=reverse)
    return buckets[0] + buckets[1] + buckets[2] + buckets[3]


def group_reference(rows, columns, column):
    names = [c[0] for c in columns]
    idx = names.index(column)
    counts = {}
    for row in rows:
        label = row["cells"][idx][1]
        counts[label] = counts.get(label, 0) + 1
    return sorted(counts.items(),
                  key=lambda kv: (-kv[1], kv[0].casefold(), kv[0]))
