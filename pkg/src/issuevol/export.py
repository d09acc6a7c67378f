"""CSV output and crash-safe file writing."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from collections.abc import Iterable, Sequence
from contextlib import contextmanager
from datetime import date
from pathlib import Path

from .measures import MeasureRecord

MEASURE_COLUMNS = (
    "bucket_start",
    "total_issues",
    "entropy_bits",
    "effective_number",
    "inverse_simpson",
    "novelty_bits",
    "pedersen",
    "gap_before",
)


def _real(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def measures_to_csv(records: Iterable[MeasureRecord]) -> str:
    """Render measure records.  Reals carry 6 decimals; absent values are
    empty fields; Pedersen is on the 0-1 scale."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MEASURE_COLUMNS)
    for r in records:
        writer.writerow((
            r.bucket_start.isoformat(),
            r.total_issues,
            _real(r.entropy_bits),
            _real(r.effective_number),
            _real(r.inverse_simpson),
            _real(r.novelty_bits),
            _real(r.pedersen),
            "true" if r.gap_before else "false",
        ))
    return buf.getvalue()


def read_measures_csv(path: str | Path) -> list[MeasureRecord]:
    """Parse a file written by :func:`measures_to_csv` (values rounded)."""
    def opt(text: str) -> float | None:
        return float(text) if text else None

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != MEASURE_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            MeasureRecord(
                bucket_start=date.fromisoformat(row["bucket_start"]),
                total_issues=int(row["total_issues"]),
                entropy_bits=float(row["entropy_bits"]),
                effective_number=float(row["effective_number"]),
                inverse_simpson=float(row["inverse_simpson"]),
                novelty_bits=opt(row["novelty_bits"]),
                pedersen=opt(row["pedersen"]),
                gap_before=row["gap_before"] == "true",
            )
            for row in reader
        ]


def table_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


@contextmanager
def atomic_open(path: str | Path, mode: str = "w"):
    """Write to a temporary file beside *path*; rename over it on success.

    On any exception the temporary file is removed and *path* is untouched.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        os.chmod(tmp, 0o666 & ~_umask())
        kwargs = {} if "b" in mode else {"encoding": "utf-8", "newline": ""}
        with os.fdopen(fd, mode, **kwargs) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_files(contents: dict[Path, str]) -> None:
    """Atomically write several text files, all rendered up front."""
    for path, text in contents.items():
        with atomic_open(path) as fh:
            fh.write(text)
