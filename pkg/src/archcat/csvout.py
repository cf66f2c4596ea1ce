"""Deterministic CSV rendering for table and group-by exports.

The writer is deliberately hand-rolled rather than delegated to the stdlib:
exports must be byte-for-byte reproducible across runs and platforms, so
the quoting rule is pinned here -- a field is quoted if and only if it
contains a comma, a double quote, or a line break, with embedded quotes
doubled.  Records end with CRLF; encoding is UTF-8 without a BOM.  The test
suite reads every export back through an independent parser to keep this
honest.
"""

from __future__ import annotations

_NEEDS_QUOTES = (",", '"', "\r", "\n")


def csv_field(text: str) -> str:
    if any(ch in text for ch in _NEEDS_QUOTES):
        return '"' + text.replace('"', '""') + '"'
    return text


def csv_line(fields: list[str]) -> str:
    return ",".join(csv_field(f) for f in fields) + "\r\n"


def render_csv(header: list[str], rows: list[list[str]]) -> bytes:
    parts = [csv_line(header)]
    parts.extend(csv_line(row) for row in rows)
    return "".join(parts).encode("utf-8")


def table_csv(columns, rows) -> bytes:
    """Export a row listing: one column per configured column, displays as-is.

    Sentinel cells export their display text; an empty field in the file
    therefore always means an empty transcribed string, never absence.
    """
    header = [col.name for col in columns]
    body = [[cell.display for cell in row.cells] for row in rows]
    return render_csv(header, body)


def groupby_csv(column: str, buckets) -> bytes:
    header = [column, "count"]
    body = [[bucket.label, str(bucket.count)] for bucket in buckets]
    return render_csv(header, body)
