"""Transcript corpus: one folder per source type, one JSON file per record.

Layout: ``<data_root>/<source_type_id>/<record_id>.json``.  The record id is
the file name stem -- the only stable identifier the corpus offers -- and it
is what provenance links point at.  The whole corpus is held in memory; at
the scales this engine targets (hundreds of records, ~100K extracted rows)
that is comfortable and far simpler than streaming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .config import TemplateEntry
from .errors import CorpusError


@dataclass
class TranscriptRecord:
    record_id: str
    source_type_id: str
    root: dict
    file_path: Path


@dataclass
class Corpus:
    """Immutable after load; safe for unrestricted concurrent reads."""

    # records per source type, ordered by record_id (lexicographic)
    by_source: dict[str, list[TranscriptRecord]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def count(self, source_type_id: str | None = None) -> int:
        if source_type_id is not None:
            return len(self.by_source.get(source_type_id, []))
        return sum(len(records) for records in self.by_source.values())

    def records(self, source_type_id: str) -> list[TranscriptRecord]:
        return self.by_source.get(source_type_id, [])

    def get(self, source_type_id: str, record_id: str) -> TranscriptRecord | None:
        for record in self.by_source.get(source_type_id, []):
            if record.record_id == record_id:
                return record
        return None


def load_corpus(root_dir: str | Path, templates: list[TemplateEntry]) -> Corpus:
    """Load every ``*.json`` under the declared source-type folders.

    Files are read in lexicographic name order so a corpus loads to the
    same Corpus regardless of directory listing order.  A subdirectory not
    named by any template is skipped with a warning; an unparseable file or
    a non-object root is an error naming the file.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise CorpusError(f"data root not found: {root}", str(root))
    declared = {t.source_type_id for t in templates}
    corpus = Corpus()
    for sub in sorted(root.iterdir(), key=lambda p: p.name):
        if not sub.is_dir():
            continue
        if sub.name not in declared:
            corpus.warnings.append(f"skipping unknown source folder {sub.name!r}")
            continue
        records: list[TranscriptRecord] = []
        for file in sorted(sub.glob("*.json"), key=lambda p: p.name):
            raw = file.read_bytes()
            try:
                tree = json.loads(raw.decode("utf-8-sig"))
            except (UnicodeDecodeError, ValueError) as exc:
                raise CorpusError(f"{file}: unparseable JSON: {exc}", str(file))
            if not isinstance(tree, dict):
                raise CorpusError(f"{file}: record root must be a JSON object", str(file))
            records.append(
                TranscriptRecord(
                    record_id=file.stem,
                    source_type_id=sub.name,
                    root=tree,
                    file_path=file,
                )
            )
        corpus.by_source[sub.name] = records
    return corpus


def record_text(record: TranscriptRecord) -> bytes:
    """The original file bytes, bit-exact, for transcript display/download."""
    try:
        return record.file_path.read_bytes()
    except OSError as exc:
        raise CorpusError(
            f"transcript file no longer available: {record.file_path}: {exc}",
            str(record.file_path),
        )
