"""Seeded random bundles, corpora and queries for oracle-equivalence tests.

The point is breadth, not realism: value pools are stacked with the cases
most likely to expose a divergence between the engine and the reference --
strings equal to the sentinel texts, case-folding traps (Istanbul's dotted
I, the German sharp s, final sigma), numbers with signs and leading zeros,
date strings at the edge of validity, raw JSON numbers and booleans,
values containing the multi-match join separator, commas/quotes/newlines
for CSV, nulls and non-scalar leaves.
"""

import random

TEXT_VALUES = [
    "Camogli", "camogli", "CAMOGLI", "Genoa", "Genoa ", " genoa",
    "None or unfilled", "n/a", "", "Rossi, P.", 'said "ciao"',
    "two\nlines", "straße", "STRASSE", "İstanbul", "istanbul",
    "ΣΊΣΥΦΟΣ", "σίσυφος", "43", "007", "1850-03", "zz; top", "ẞ", "ss",
]
INT_VALUES = ["0", "7", "-3", "42", "+12", "007", "31", "99"]
BAD_INT_VALUES = ["thirty", "4.5", "", " 7", "7 ", "--3"]
DEC_VALUES = ["1.5", "-0.25", "2", "3.14", ".5", "10.", "1e3", "-2e-2"]
BAD_DEC_VALUES = ["4,2", "one", "", "1.2.3", "nan", "inf"]
DATE_VALUES = ["1850", "1850-03", "1850-03-17", "1999-12-31", "1850-01-01",
               "1850-12", "1851-03-17"]
BAD_DATE_VALUES = ["1850-13", "1850-00", "1850-3", "03-1850", "circa 1850",
                   "1850-03-00", "1850-03-32", "185", ""]
RAW_SCALARS = [31, -2, 2.5, 0.1, True, False, 0, 1850]

VALUES_BY_KIND = {
    "text": TEXT_VALUES,
    "integer": INT_VALUES + BAD_INT_VALUES,
    "decimal": DEC_VALUES + BAD_DEC_VALUES,
    "date": DATE_VALUES + BAD_DATE_VALUES,
}
FILTER_VALUES_BY_KIND = {  # only values the engine accepts as operands
    "integer": INT_VALUES,
    "decimal": DEC_VALUES,
    "date": DATE_VALUES,
}

TEXT_OPS = ["contains", "not_contains", "equals", "not_equals",
            "starts_with", "ends_with"]
NUMERIC_OPS = ["num_equals", "num_not_equals", "less_than", "greater_than",
               "in_range"]

BASE_PATHS = ["items[]", "header", "doc.entries[]", "doc.head", "rows[].cell",
              "group[]"]
COLUMN_NAMES = ["name", "place", "tag", "x", "y", "weird name", "v-2"]
COLUMN_PATHS = ["name", "loc.place", "tags[]", "x", "meta.y", "vals[].n"]


def make_category(rng: random.Random, name: str) -> dict:
    n_cols = rng.randint(1, 4)
    names = rng.sample(COLUMN_NAMES, n_cols)
    columns = []
    for col_name in names:
        column = {"name": col_name, "path": rng.choice(COLUMN_PATHS)}
        kind = rng.choice(["text", "text", "integer", "decimal", "date"])
        if kind != "text":
            column["kind"] = kind
        columns.append(column)
    identity = rng.sample(names, rng.randint(1, len(names)))
    return {
        "name": name,
        "base": rng.choice(BASE_PATHS),
        "columns": columns,
        "identity": identity,
    }


def make_bundle(rng: random.Random, n_sources=None) -> dict:
    """Returns {templates, source_configs, explore_all, explore_all_conf,
    categories: {source: {cat_name: cfg}}, mappings: [(source, cat)]}."""
    if n_sources is None:
        n_sources = rng.randint(1, 3)
    templates = []
    source_configs = {}
    categories = {}
    all_pairs = []
    for s in range(n_sources):
        source_id = f"src{s}"
        cats = {}
        for c in range(rng.randint(1, 2)):
            cat = make_category(rng, f"Cat{s}{c}")
            cats[cat["name"]] = cat
            all_pairs.append((source_id, cat["name"]))
        categories[source_id] = cats
        source_configs[f"{source_id}.json"] = {
            "categories": list(cats.values())}
        templates.append({
            "id": source_id,
            "group": rng.choice(["Alpha", "Beta"]),
            "name": f"Source {s}",
            "description": f"random source {s}",
            "config": f"{source_id}.json",
        })
    mappings = [pair for pair in all_pairs if rng.random() < 0.8]
    rng.shuffle(mappings)
    explore_all = [{"name": "Everything", "group": "All"}] if mappings else []
    explore_all_conf = (
        {"Everything": [{"source": s, "category": c} for s, c in mappings]}
        if mappings else {})
    return {
        "templates": templates,
        "source_configs": source_configs,
        "explore_all": explore_all,
        "explore_all_conf": explore_all_conf,
        "categories": categories,
        "mappings": mappings,
    }


def _ensure(node: dict, name: str, container):
    """Get node[name], creating/replacing so it is the wanted container type."""
    if not isinstance(node.get(name), type(container)):
        node[name] = container
    return node[name]


def _build_base_nodes(rng, tree: dict, base: str) -> list[dict]:
    """Create (or reuse) the containers along a base path; return base nodes."""
    nodes = [tree]
    parts = base.split(".")
    for i, part in enumerate(parts):
        iterate = part.endswith("[]")
        name = part[:-2] if iterate else part
        next_nodes = []
        for node in nodes:
            if iterate:
                bucket = _ensure(node, name, [])
                if not bucket:
                    for _ in range(rng.randint(0, 3)):
                        bucket.append({})
                    if bucket and rng.random() < 0.1:
                        bucket.insert(rng.randrange(len(bucket) + 1), None)
                next_nodes.extend(n for n in bucket if isinstance(n, dict))
            else:
                next_nodes.append(_ensure(node, name, {}))
        nodes = next_nodes
    return nodes


def _fill_column(rng, base_node: dict, path: str, kind: str) -> None:
    parts = path.split(".")
    node = base_node
    for part in parts[:-1]:
        iterate = part.endswith("[]")
        name = part[:-2] if iterate else part
        if iterate:
            bucket = _ensure(node, name, [])
            if not bucket:
                bucket.extend({} for _ in range(rng.randint(1, 2)))
            node = next((n for n in bucket if isinstance(n, dict)), None)
            if node is None:
                return
        else:
            node = _ensure(node, name, {})
    last = parts[-1]
    iterate = last.endswith("[]")
    name = last[:-2] if iterate else last

    def scalar():
        if rng.random() < 0.15:
            return rng.choice(RAW_SCALARS)
        return rng.choice(VALUES_BY_KIND[kind])

    if iterate:
        node[name] = [scalar() for _ in range(rng.randint(1, 3))]
        if rng.random() < 0.1:
            node[name].append(None)
    else:
        roll = rng.random()
        if roll < 0.04:
            node[name] = {"nested": "object"}   # non-scalar leaf -> skipped
        elif roll < 0.07:
            node[name] = None                    # null -> missing
        else:
            node[name] = scalar()


def make_corpus(rng: random.Random, bundle: dict,
                records_per_source=(1, 5)) -> dict:
    corpus = {}
    for source_id, cats in bundle["categories"].items():
        records = {}
        for r in range(rng.randint(*records_per_source)):
            tree: dict = {}
            for cat in cats.values():
                for base_node in _build_base_nodes(rng, tree, cat["base"]):
                    for column in cat["columns"]:
                        if rng.random() < 0.25:
                            continue  # leave missing
                        _fill_column(rng, base_node, column["path"],
                                     column.get("kind", "text"))
            records[f"r{r:03d}"] = tree
        corpus[source_id] = records
    return corpus


def make_filter(rng: random.Random, columns) -> dict:
    name, kind = rng.choice(columns)
    if kind == "text":
        return {
            "column": name,
            "op": rng.choice(TEXT_OPS),
            "value": rng.choice(TEXT_VALUES + ["cam", "CAM", "a", "ß"]),
        }
    op = rng.choice(NUMERIC_OPS)
    values = FILTER_VALUES_BY_KIND[kind]
    if op != "in_range":
        return {"column": name, "op": op, "value": rng.choice(values)}
    a, b = rng.choice(values), rng.choice(values)
    if _operand_key(a, kind) > _operand_key(b, kind):
        a, b = b, a
    return {"column": name, "op": op, "value": a, "value2": b}


def _operand_key(value: str, kind: str):
    import reference

    parsed = reference.typed(value, kind)
    return float(parsed) if kind == "decimal" else parsed


def make_query(rng: random.Random, columns) -> dict:
    """columns: list of (name, kind) for the scoped table."""
    query = {"filters": [make_filter(rng, columns)
                         for _ in range(rng.choice([0, 0, 1, 1, 2, 3]))]}
    if rng.random() < 0.5 and columns:
        query["sort"] = rng.choice(columns)[0]
        query["dir"] = rng.choice(["asc", "desc"])
    query["offset"] = rng.choice([0, 0, 0, 1, 2, 5, 10])
    query["limit"] = rng.choice([1, 2, 3, 5, 100])
    query["group_column"] = rng.choice(columns)[0] if columns else None
    return query
