"""Readers and writers for the two input formats.

Poll CSV
    UTF-8, header ``date,issue,share``.  Dates are ``YYYY-MM-DD`` or
    ``YYYY-MM`` (normalized to the first of the month); shares are decimal
    fractions.  Values above 1.5 are treated as percentages and rejected.

Corpus JSONL
    UTF-8, one JSON object per line with keys ``id``, ``date`` and ``text``.
    Unknown keys are ignored.

Both readers reject bad lines individually and keep going; the returned
:class:`IngestReport` lists every rejection with its line number.  Only a
missing header or an input with nothing accepted is fatal.
"""

from __future__ import annotations

import codecs
import csv
import io
import json
import math
import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from datetime import date
from typing import IO

from .agenda import MAX_DATE, MIN_DATE, AttentionRecord, IssueCatalog
from .errors import IngestError

POLL_HEADER = ("date", "issue", "share")
MAX_SHARE = 1.5
MAX_LINE_BYTES = 10 * 1024 * 1024

_DATE_RE = re.compile(r"^(\d{4})-(\d{2})(?:-(\d{2}))?$")


@dataclass(frozen=True)
class Document:
    doc_id: str
    timestamp: date
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise IngestError(f"document {self.doc_id!r} has empty text")


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: int = 0
    rejection_reasons: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, line: int, reason: str) -> None:
        self.rejected += 1
        self.rejection_reasons.append((line, reason))

    @property
    def total(self) -> int:
        return self.accepted + self.rejected


def parse_date(text: str) -> date:
    """Parse ``YYYY-MM-DD`` or ``YYYY-MM``.  A trailing time part
    (``2013-07-02T10:00:00Z``) is ignored."""
    text = text.strip()
    if len(text) > 10 and text[10] in "T ":
        text = text[:10]
    m = _DATE_RE.match(text)
    if not m:
        raise ValueError(f"unparseable date {text!r}; expected YYYY-MM-DD or YYYY-MM")
    year, month, day = int(m[1]), int(m[2]), int(m[3] or 1)
    try:
        parsed = date(year, month, day)
    except ValueError as exc:
        raise ValueError(f"invalid date {text!r}: {exc}") from None
    if not MIN_DATE <= parsed <= MAX_DATE:
        raise ValueError(f"date {text!r} outside [{MIN_DATE}, {MAX_DATE}]")
    return parsed


def _text_lines(stream: IO) -> Iterator[str]:
    """Decode a byte or text stream as UTF-8, stripping a leading BOM."""
    first = True
    if isinstance(stream, io.TextIOBase):
        lines: Iterable = stream
        decode = None
    else:
        lines = stream
        decode = codecs.getincrementaldecoder("utf-8")()
    for raw in lines:
        line = decode.decode(raw) if decode is not None else raw
        if first:
            line = line.lstrip("\ufeff")
            first = False
        yield line


def _parse_share(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"share {text!r} is not a number") from None
    if not math.isfinite(value) or value < 0:
        raise ValueError(f"share {text!r} must be a finite nonnegative number")
    if value > MAX_SHARE:
        raise ValueError("share out of range; divide percentages by 100")
    return value


def parse_poll_csv(stream: IO) -> tuple[list[AttentionRecord], IssueCatalog, IngestReport]:
    """Parse poll shares into records and derive the issue catalog.

    Raises
    ------
    IngestError
        If the header is missing or wrong, or no row is accepted.  Bad rows
        are only recorded in the report.
    """
    try:
        reader = csv.reader(_text_lines(stream))
        header = next(reader, None)
    except UnicodeDecodeError as exc:
        raise IngestError(f"input is not valid UTF-8: {exc}") from None
    if header is None:
        raise IngestError("empty input: missing header `date,issue,share`")
    if tuple(h.strip().lower() for h in header) != POLL_HEADER:
        raise IngestError(f"unknown header {header!r}; expected `date,issue,share`")

    records: list[AttentionRecord] = []
    report = IngestReport()
    while True:
        try:
            row = next(reader)
        except StopIteration:
            break
        except (csv.Error, UnicodeDecodeError) as exc:
            report.reject(reader.line_num, f"malformed line: {exc}")
            continue
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            report.reject(line, "empty line")
            continue
        if len(row) != 3:
            report.reject(line, f"expected 3 fields, found {len(row)}")
            continue
        issue = row[1].strip()
        if not issue:
            report.reject(line, "empty issue")
            continue
        try:
            when = parse_date(row[0])
            share = _parse_share(row[2].strip())
        except ValueError as exc:
            report.reject(line, str(exc))
            continue
        records.append(AttentionRecord(when, issue, share))
        report.accepted += 1

    if not records:
        raise IngestError(f"no rows accepted ({report.rejected} rejected)")
    return records, IssueCatalog.from_records(records), report


def write_poll_csv(records: Iterable[AttentionRecord], stream: IO[str]) -> None:
    """Write records in the poll CSV format.  Shares use ``repr`` so that
    re-parsing is lossless."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(POLL_HEADER)
    for rec in records:
        writer.writerow((rec.timestamp.isoformat(), rec.issue_id, repr(float(rec.share))))


def _read_limited_lines(stream: IO[bytes], limit: int) -> Iterator[tuple[bytes, bool]]:
    """Yield ``(line, too_long)``; over-long lines are drained, not kept."""
    while True:
        chunk = stream.readline(limit + 1)
        if not chunk:
            return
        if len(chunk) > limit and not chunk.endswith(b"\n"):
            while True:
                rest = stream.readline(limit)
                if not rest or rest.endswith(b"\n"):
                    break
            yield b"", True
        else:
            yield chunk, len(chunk.rstrip(b"\r\n")) > limit


def parse_corpus_jsonl(stream: IO) -> tuple[list[Document], IngestReport]:
    """Parse a JSONL corpus.  Later duplicates of an id are rejected.

    Text is whitespace-normalized (runs of whitespace collapse to one space).
    """
    if isinstance(stream, io.TextIOBase):
        stream = io.BytesIO(stream.read().encode("utf-8"))
    docs: list[Document] = []
    seen: set[str] = set()
    report = IngestReport()
    for lineno, (raw, too_long) in enumerate(_read_limited_lines(stream, MAX_LINE_BYTES), 1):
        if too_long:
            report.reject(lineno, "line exceeds 10 MB")
            continue
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            report.reject(lineno, "line is not valid UTF-8")
            continue
        if lineno == 1:
            text = text.lstrip("\ufeff")
        if not text.strip():
            report.reject(lineno, "empty line")
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            report.reject(lineno, f"invalid JSON: {exc.msg}")
            continue
        if not isinstance(obj, dict):
            report.reject(lineno, "line is not a JSON object")
            continue
        missing = [key for key in ("id", "date", "text") if key not in obj]
        if missing:
            report.reject(lineno, f"missing field(s): {', '.join(missing)}")
            continue
        doc_id, when, body = obj["id"], obj["date"], obj["text"]
        if isinstance(doc_id, bool) or not isinstance(doc_id, (str, int)):
            report.reject(lineno, "id must be a string or integer")
            continue
        doc_id = str(doc_id)
        if not isinstance(when, str):
            report.reject(lineno, "date must be a string")
            continue
        if not isinstance(body, str):
            report.reject(lineno, "text must be a string")
            continue
        body = " ".join(body.split())
        if not body:
            report.reject(lineno, "empty text")
            continue
        if doc_id in seen:
            report.reject(lineno, "duplicate id")
            continue
        try:
            stamp = parse_date(when)
        except ValueError as exc:
            report.reject(lineno, str(exc))
            continue
        seen.add(doc_id)
        docs.append(Document(doc_id, stamp, body))
        report.accepted += 1

    if not docs:
        raise IngestError(f"no documents accepted ({report.rejected} rejected)")
    return docs, report


def write_corpus_jsonl(docs: Iterable[Document], stream: IO[str]) -> None:
    for doc in docs:
        obj = {"id": doc.doc_id, "date": doc.timestamp.isoformat(), "text": doc.text}
        stream.write(json.dumps(obj, ensure_ascii=False) + "\n")
