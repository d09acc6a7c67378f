"""Attention series: calendar bucketing, issue selection and measurement.

A series is an ordered run of calendar buckets, each holding the attention
distribution for that period.  Missing periods are simply absent; they are
never zero-filled or interpolated.  Every transform returns a new series.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, replace
from datetime import date
from enum import Enum

import numpy as np

from .errors import DegenerateInputError, ParameterError, SeriesError
from .measures import (
    Distribution,
    MeasureRecord,
    default_epsilon,
    entropy,
    inverse_simpson,
    kl_divergence,
    pedersen,
    smooth,
)

log = logging.getLogger(__name__)

MIN_DATE = date(1900, 1, 1)
MAX_DATE = date(2100, 1, 1)


class Period(str, Enum):
    MONTHLY = "monthly"
    QUARTERLY = "quarterly"
    YEARLY = "yearly"

    @property
    def months(self) -> int:
        return {"monthly": 1, "quarterly": 3, "yearly": 12}[self.value]

    def index(self, day: date) -> int:
        """Running period number; consecutive periods differ by one."""
        return (day.year * 12 + day.month - 1) // self.months

    def start_of(self, day: date) -> date:
        """First day of the period containing *day*.  Quarters start in
        January, April, July and October."""
        return self.from_index(self.index(day))

    def from_index(self, index: int) -> date:
        month0 = index * self.months
        return date(month0 // 12, month0 % 12 + 1, 1)

    def next_start(self, day: date) -> date:
        return self.from_index(self.index(day) + 1)


@dataclass(frozen=True)
class AttentionRecord:
    """One observed share for one issue at one date."""

    timestamp: date
    issue_id: str
    share: float

    def __post_init__(self) -> None:
        if not MIN_DATE <= self.timestamp <= MAX_DATE:
            raise ParameterError(
                f"timestamp {self.timestamp} outside [{MIN_DATE}, {MAX_DATE}]"
            )
        if not (math.isfinite(self.share) and self.share >= 0):
            raise ParameterError(f"share must be finite and >= 0, got {self.share!r}")


@dataclass(frozen=True)
class IssueInfo:
    issue_id: str
    label: str
    first_seen: date
    last_seen: date


@dataclass(frozen=True)
class IssueCatalog:
    """Known issues in a fixed order, with the span over which each was seen."""

    issues: tuple[IssueInfo, ...]

    def __post_init__(self) -> None:
        ids = [info.issue_id for info in self.issues]
        if len(set(ids)) != len(ids):
            raise SeriesError("issue ids in catalog are not unique")
        for info in self.issues:
            if info.first_seen > info.last_seen:
                raise SeriesError(f"issue {info.issue_id!r}: first_seen after last_seen")
        object.__setattr__(self, "_by_id", {info.issue_id: info for info in self.issues})

    @classmethod
    def from_records(cls, records: Iterable[AttentionRecord]) -> IssueCatalog:
        """Catalog in order of first appearance; labels default to the id."""
        spans: dict[str, list[date]] = {}
        for rec in records:
            span = spans.get(rec.issue_id)
            if span is None:
                spans[rec.issue_id] = [rec.timestamp, rec.timestamp]
            else:
                span[0] = min(span[0], rec.timestamp)
                span[1] = max(span[1], rec.timestamp)
        return cls(tuple(IssueInfo(i, i, lo, hi) for i, (lo, hi) in spans.items()))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(info.issue_id for info in self.issues)

    def __len__(self) -> int:
        return len(self.issues)

    def __contains__(self, issue_id: object) -> bool:
        return issue_id in self._by_id  # type: ignore[attr-defined]

    def __getitem__(self, issue_id: str) -> IssueInfo:
        return self._by_id[issue_id]  # type: ignore[attr-defined]

    def restrict(self, keep: Iterable[str]) -> IssueCatalog:
        keep = set(keep)
        return IssueCatalog(tuple(i for i in self.issues if i.issue_id in keep))


@dataclass(frozen=True)
class Bucket:
    start: date
    distribution: Distribution
    record_count: int


@dataclass(frozen=True)
class AttentionSeries:
    """Time-ordered buckets of one period type.

    ``notes`` carries non-fatal warnings raised by transforms (for example a
    top-k request larger than the catalog).
    """

    buckets: tuple[Bucket, ...]
    period: Period
    catalog: IssueCatalog
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "period", Period(self.period))
        object.__setattr__(self, "buckets", tuple(self.buckets))
        if not self.buckets:
            raise SeriesError("series has no buckets")
        previous = None
        for b in self.buckets:
            if b.start != self.period.start_of(b.start):
                raise SeriesError(f"bucket {b.start} is not a {self.period.value} period start")
            if previous is not None and b.start <= previous:
                raise SeriesError(f"bucket starts not strictly increasing at {b.start}")
            previous = b.start
            unknown = [i for i in b.distribution.issues if i not in self.catalog]
            if unknown:
                raise SeriesError(f"bucket {b.start} has issues missing from catalog: {unknown}")

    def __len__(self) -> int:
        return len(self.buckets)

    def __iter__(self) -> Iterator[Bucket]:
        return iter(self.buckets)

    @property
    def starts(self) -> list[date]:
        return [b.start for b in self.buckets]

    @property
    def issues(self) -> tuple[str, ...]:
        """Union of bucket supports, in catalog order."""
        present = set()
        for b in self.buckets:
            present.update(b.distribution.issues)
        return tuple(i for i in self.catalog.ids if i in present)

    def matrix(self) -> tuple[tuple[str, ...], np.ndarray]:
        """Shares as a ``(buckets, issues)`` array over the aligned support."""
        issues = self.issues
        col = {issue: j for j, issue in enumerate(issues)}
        out = np.zeros((len(self.buckets), len(issues)))
        for t, b in enumerate(self.buckets):
            for issue, share in b.distribution:
                out[t, col[issue]] = share
        return issues, out


def bucketize(
    records: Sequence[AttentionRecord],
    period: Period | str = Period.MONTHLY,
    catalog: IssueCatalog | None = None,
) -> AttentionSeries:
    """Group records into calendar buckets.

    Shares reported for the same issue within one bucket are averaged, then
    each bucket is renormalized.  Periods without records are left out.
    """
    period = Period(period)
    if not records:
        raise SeriesError("no records to bucketize")
    if catalog is None:
        catalog = IssueCatalog.from_records(records)
    grouped: dict[date, dict[str, list[float]]] = defaultdict(lambda: defaultdict(list))
    counts: dict[date, int] = defaultdict(int)
    for rec in records:
        start = period.start_of(rec.timestamp)
        grouped[start][rec.issue_id].append(rec.share)
        counts[start] += 1

    buckets = []
    for start in sorted(grouped):
        cells = grouped[start]
        order = [i for i in catalog.ids if i in cells]
        if len(order) != len(cells):
            missing = sorted(set(cells) - set(order))
            raise SeriesError(f"issues {missing} in bucket {start} are not in the catalog")
        try:
            dist = Distribution(
                ((i, math.fsum(cells[i]) / len(cells[i])) for i in order), lenient=True
            )
        except DegenerateInputError as exc:
            raise SeriesError(f"bucket {start}: {exc}") from exc
        buckets.append(Bucket(start, dist, counts[start]))
    return AttentionSeries(tuple(buckets), period, catalog)


def series_to_records(series: AttentionSeries) -> list[AttentionRecord]:
    """One record per (bucket, issue) entry, dated at the bucket start."""
    return [
        AttentionRecord(b.start, issue, share)
        for b in series.buckets
        for issue, share in b.distribution
    ]


def _restrict_buckets(series: AttentionSeries, keep: Sequence[str], why: str) -> tuple[Bucket, ...]:
    out = []
    for b in series.buckets:
        try:
            dist = b.distribution.reindex(series.issues).restrict(keep)
        except DegenerateInputError as exc:
            raise SeriesError(f"{why} leaves bucket {b.start} without attention") from exc
        out.append(Bucket(b.start, dist, b.record_count))
    return tuple(out)


def truncate_top_k(series: AttentionSeries, k: int) -> AttentionSeries:
    """Keep the *k* issues with the highest mean share over all buckets.

    The same issue set is kept in every bucket (absent issues count as 0 in
    the mean and appear with share 0 in the output), and each bucket is
    renormalized over it.  Ties are broken by catalog order.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ParameterError(f"k must be a positive integer, got {k!r}")
    n = len(series.catalog)
    if k > n:
        note = f"top-k {k} exceeds catalog size {n}; series left unchanged"
        log.warning(note)
        return replace(series, notes=series.notes + (note,))
    if k == n:
        return series
    issues, shares = series.matrix()
    means = shares.mean(axis=0)
    ranked = sorted(range(len(issues)), key=lambda j: (-means[j], j))
    kept = {issues[j] for j in ranked[:k]}
    keep = [i for i in issues if i in kept]
    buckets = _restrict_buckets(series, keep, f"top-{k} truncation")
    return replace(series, buckets=buckets, catalog=series.catalog.restrict(keep))


def filter_issues(series: AttentionSeries, introduced_after: date) -> AttentionSeries:
    """Drop issues first seen strictly after *introduced_after*; renormalize."""
    if not isinstance(introduced_after, date):
        raise ParameterError(f"cutoff must be a date, got {introduced_after!r}")
    removed = {i.issue_id for i in series.catalog.issues if i.first_seen > introduced_after}
    if not removed:
        return series
    buckets = []
    for b in series.buckets:
        keep = [i for i in b.distribution.issues if i not in removed]
        if not keep:
            raise SeriesError(f"filtering removes all issues from bucket {b.start}")
        try:
            dist = b.distribution.restrict(keep)
        except DegenerateInputError as exc:
            raise SeriesError(f"filtering removes all attention from bucket {b.start}") from exc
        buckets.append(Bucket(b.start, dist, b.record_count))
    kept = [i for i in series.catalog.ids if i not in removed]
    return replace(series, buckets=tuple(buckets), catalog=series.catalog.restrict(kept))


def align_supports(series: AttentionSeries) -> AttentionSeries:
    """Express every bucket over the union of issues, absent ones at 0."""
    union = series.issues
    if all(b.distribution.issues == union for b in series.buckets):
        return series
    buckets = tuple(
        Bucket(b.start, b.distribution.reindex(union), b.record_count) for b in series.buckets
    )
    return replace(series, buckets=buckets)


def compute_measures(series: AttentionSeries, epsilon: float | None = None) -> list[MeasureRecord]:
    """Per-bucket entropy, effective number, inverse Simpson, novelty, Pedersen.

    Novelty and Pedersen compare each bucket with the preceding *present*
    bucket; ``gap_before`` marks records where that bucket is not the
    adjacent calendar period.  Both distributions are smoothed with
    *epsilon* (default ``1 / (10 * n_issues)``) before the divergence.
    """
    series = align_supports(series)
    support = series.issues
    eps = default_epsilon(len(support)) if epsilon is None else epsilon
    period = series.period

    records = []
    prev = prev_smoothed = None
    for b in series.buckets:
        d = b.distribution
        h = entropy(d)
        smoothed = smooth(d, support, eps)
        if prev is None:
            novelty = volatility = None
            gap = False
        else:
            novelty = kl_divergence(smoothed, prev_smoothed)
            volatility = pedersen(d, prev.distribution)
            gap = period.index(b.start) - period.index(prev.start) > 1
        records.append(
            MeasureRecord(
                bucket_start=b.start,
                total_issues=d.support_size,
                entropy_bits=h,
                effective_number=2.0**h,
                inverse_simpson=inverse_simpson(d),
                novelty_bits=novelty,
                pedersen=volatility,
                gap_before=gap,
            )
        )
        prev, prev_smoothed = b, smoothed
    return records
