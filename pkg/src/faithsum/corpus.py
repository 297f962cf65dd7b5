"""Dataset loading and normalization into standard question/summary records.

Two on-disk formats are supported: delimited tables (UTF-8 CSV with a
header row) and record-lines (UTF-8 JSONL, one object per line).  A
manifest maps the source file's field names onto the record schema.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import random
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .errors import DatasetError

logger = logging.getLogger(__name__)

FORMAT_DELIMITED = "delimited-table"
FORMAT_RECORD_LINES = "record-lines"

# Zero-width characters dropped during normalization.  ZWJ/ZWNJ are kept:
# they are meaningful inside Bangla conjuncts.
_DROP_CHARS = {"​", "﻿", "⁠"}


class Language(Enum):
    ENGLISH = "english"
    BANGLA = "bangla"

    @classmethod
    def parse(cls, value: str) -> "Language":
        v = value.strip().lower()
        if v in ("english", "en"):
            return cls.ENGLISH
        if v in ("bangla", "bengali", "bn"):
            return cls.BANGLA
        raise ValueError(f"unknown language: {value!r}")


@dataclass(frozen=True)
class ChqRecord:
    """One dataset example: a consumer health question and its reference."""

    id: str
    question: str
    reference_summary: Optional[str]
    language: Language


@dataclass
class DatasetManifest:
    name: str
    path: Path
    format: str
    language: Language
    question_field: str
    summary_field: Optional[str] = None
    id_field: Optional[str] = None
    split_files: dict[str, Path] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.path = Path(self.path)
        if self.format not in (FORMAT_DELIMITED, FORMAT_RECORD_LINES):
            raise DatasetError(f"unknown dataset format: {self.format!r}")

    def mapped_fields(self) -> list[str]:
        fields = [self.question_field]
        if self.summary_field:
            fields.append(self.summary_field)
        if self.id_field:
            fields.append(self.id_field)
        return fields


@dataclass
class LoadResult:
    records: list[ChqRecord]
    total_rows: int
    rejected: list[tuple[int, str]]


def normalize_text(text: str) -> str:
    """NFC-compose, drop control/zero-width chars, collapse whitespace."""
    text = unicodedata.normalize("NFC", text)
    kept = []
    for ch in text:
        if ch in _DROP_CHARS:
            continue
        if unicodedata.category(ch) == "Cc" and not ch.isspace():
            continue
        kept.append(ch)
    return " ".join("".join(kept).split())


def normalize_record(
    raw_question: str,
    raw_summary: Optional[str],
    language: Language,
    record_id: str = "",
) -> ChqRecord:
    """Normalize one raw example; raises ValueError on an empty question."""
    question = normalize_text(raw_question)
    if not question:
        raise ValueError("question empty after normalization")
    summary = None
    if raw_summary is not None:
        summary = normalize_text(raw_summary) or None
    return ChqRecord(
        id=record_id, question=question, reference_summary=summary, language=language
    )


def _iter_rows(manifest: DatasetManifest) -> Iterable[tuple[int, dict]]:
    path = manifest.path
    if manifest.format == FORMAT_DELIMITED:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [f for f in manifest.mapped_fields() if f not in header]
            if missing:
                raise DatasetError(
                    f"{manifest.name}: mapped fields {missing} not in header {header}"
                )
            for i, row in enumerate(reader):
                yield i, row
    else:
        first = True
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    yield i, {"__parse_error__": str(exc)}
                    continue
                if first:
                    missing = [f for f in manifest.mapped_fields() if f not in obj]
                    if missing:
                        raise DatasetError(
                            f"{manifest.name}: mapped fields {missing} not in first record"
                        )
                    first = False
                yield i, obj


def load_dataset(manifest: DatasetManifest, strict: bool = False) -> LoadResult:
    """Load and normalize every row of the manifest's file.

    Malformed rows are skipped with a warning (fatal under ``strict``);
    the result reports total and rejected counts exactly.
    """
    if not manifest.path.exists():
        raise DatasetError(f"{manifest.name}: dataset file not found: {manifest.path}")

    records: list[ChqRecord] = []
    rejected: list[tuple[int, str]] = []
    seen_ids: set[str] = set()
    total = 0

    def reject(index: int, reason: str) -> None:
        if strict:
            raise DatasetError(f"{manifest.name}: row {index}: {reason}")
        logger.warning("%s: skipping row %d: %s", manifest.name, index, reason)
        rejected.append((index, reason))

    for index, row in _iter_rows(manifest):
        total += 1
        if "__parse_error__" in row:
            reject(index, f"unparseable line: {row['__parse_error__']}")
            continue
        raw_question = row.get(manifest.question_field)
        if raw_question is None:
            reject(index, f"missing field {manifest.question_field!r}")
            continue
        raw_summary = row.get(manifest.summary_field) if manifest.summary_field else None
        if manifest.id_field:
            raw_id = row.get(manifest.id_field)
            if raw_id is None or not str(raw_id).strip():
                reject(index, f"missing id field {manifest.id_field!r}")
                continue
            record_id = str(raw_id).strip()
        else:
            record_id = f"row-{index:06d}"
        if record_id in seen_ids:
            reject(index, f"duplicate id {record_id!r}")
            continue
        try:
            record = normalize_record(
                str(raw_question),
                None if raw_summary is None else str(raw_summary),
                manifest.language,
                record_id=record_id,
            )
        except ValueError as exc:
            reject(index, str(exc))
            continue
        seen_ids.add(record_id)
        records.append(record)

    logger.info(
        "%s: loaded %d records (%d rows, %d rejected)",
        manifest.name,
        len(records),
        total,
        len(rejected),
    )
    return LoadResult(records=records, total_rows=total, rejected=rejected)


def record_to_json(record: ChqRecord) -> dict:
    return {
        "id": record.id,
        "question": record.question,
        "summary": record.reference_summary,
        "language": record.language.value,
    }


def dump_records(records: Iterable[ChqRecord], path: Path) -> int:
    """Write records as record-lines; the corpus round-trip format."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json(record), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            count += 1
    return count


def load_dumped_records(path: Path, language: Language) -> list[ChqRecord]:
    manifest = DatasetManifest(
        name="dump",
        path=Path(path),
        format=FORMAT_RECORD_LINES,
        language=language,
        question_field="question",
        summary_field="summary",
        id_field="id",
    )
    return load_dataset(manifest).records


def split_records(
    records: list[ChqRecord],
    seed: int,
    split_ids: Optional[dict[str, set[str]]] = None,
) -> dict[str, list[ChqRecord]]:
    """Split into train/validation/test.

    Uses the dataset's own id lists when provided, otherwise a seeded
    deterministic shuffle with an 80/10/10 split.
    """
    if split_ids:
        out: dict[str, list[ChqRecord]] = {name: [] for name in ("train", "validation", "test")}
        assigned = set()
        for name, ids in split_ids.items():
            if name not in out:
                raise DatasetError(f"unknown split name {name!r}")
            out[name] = [r for r in records if r.id in ids]
            assigned |= ids
        leftover = [r.id for r in records if r.id not in assigned]
        if leftover:
            logger.warning("%d records not covered by split files", len(leftover))
        return out

    shuffled = list(records)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_train = math.floor(n * 0.8)
    n_val = math.floor(n * 0.1)
    return {
        "train": shuffled[:n_train],
        "validation": shuffled[n_train : n_train + n_val],
        "test": shuffled[n_train + n_val :],
    }


def load_split_files(split_files: dict[str, Path]) -> dict[str, set[str]]:
    out = {}
    for name, path in split_files.items():
        path = Path(path)
        if not path.exists():
            raise DatasetError(f"split file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            out[name] = {line.strip() for line in fh if line.strip()}
    return out
