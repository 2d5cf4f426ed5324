"""Passage corpus: ingestion, lookup, and on-disk snapshots.

Input formats:
  - JSONL: one object per line with keys ``id``, ``text``, optional
    ``title`` and ``entity``.
  - TSV: ``id<TAB>title<TAB>text``.

The corpus is immutable after ingest; one input record is one passage
(no re-chunking). Snapshots are the same JSONL format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import DuplicateIdError, IngestError, PassageNotFoundError

FORMATS = ("jsonl", "tsv")


@dataclass(frozen=True)
class Passage:
    id: str
    text: str
    title: str = ""
    entity: str = ""

    def rendered_text(self) -> str:
        """The "title: text" form used for indexing and prompt contexts."""
        if self.title:
            return f"{self.title}: {self.text}"
        return self.text


class Corpus:
    """Ordered, immutable collection of passages with id lookup."""

    def __init__(self, passages: Iterable[Passage] = ()):
        self._passages: list[Passage] = list(passages)
        self._by_id: dict[str, Passage] = {}
        for p in self._passages:
            if p.id in self._by_id:
                raise DuplicateIdError(p.id)
            self._by_id[p.id] = p

    @property
    def doc_count(self) -> int:
        return len(self._passages)

    def __len__(self) -> int:
        return len(self._passages)

    def __iter__(self) -> Iterator[Passage]:
        return iter(self._passages)

    def __contains__(self, passage_id: str) -> bool:
        return passage_id in self._by_id

    def get_passage(self, passage_id: str) -> Passage:
        try:
            return self._by_id[passage_id]
        except KeyError:
            raise PassageNotFoundError(passage_id) from None

    def entities(self) -> dict[str, list[Passage]]:
        """Group passages by their (non-empty) entity field, ingest order kept."""
        groups: dict[str, list[Passage]] = {}
        for p in self._passages:
            if p.entity:
                groups.setdefault(p.entity, []).append(p)
        return groups

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for p in self._passages:
                record = {"id": p.id, "title": p.title, "text": p.text}
                if p.entity:
                    record["entity"] = p.entity
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _parse_jsonl(line: str, line_number: int) -> Passage:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed JSON on line {line_number}: {exc}", line_number)
    if not isinstance(record, dict) or "id" not in record or "text" not in record:
        raise IngestError(f"record on line {line_number} missing id/text", line_number)
    return Passage(
        id=str(record["id"]),
        text=str(record["text"]),
        title=str(record.get("title") or ""),
        entity=str(record.get("entity") or ""),
    )


def _parse_tsv(line: str, line_number: int) -> Passage:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise IngestError(
            f"line {line_number}: expected id<TAB>title<TAB>text, got {len(parts)} fields",
            line_number,
        )
    return Passage(id=parts[0], title=parts[1], text=parts[2])


def ingest(source: Iterable[str] | IO[str] | str | Path, format: str = "jsonl") -> Corpus:
    """Build a Corpus from a line stream or a file path.

    Rejects duplicate ids, empty text, and malformed records, always
    naming the offending line.
    """
    if format not in FORMATS:
        raise IngestError(f"unknown format {format!r}; expected one of {FORMATS}")
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return ingest(fh, format)

    parse = _parse_jsonl if format == "jsonl" else _parse_tsv
    passages: list[Passage] = []
    seen: set[str] = set()
    for line_number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        passage = parse(line, line_number)
        if passage.id in seen:
            raise DuplicateIdError(passage.id, line_number)
        if not passage.text.strip():
            raise IngestError(f"empty text on line {line_number}", line_number)
        seen.add(passage.id)
        passages.append(passage)
    return Corpus(passages)


def load_snapshot(path: str | Path) -> Corpus:
    return ingest(path, "jsonl")
