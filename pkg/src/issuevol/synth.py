"""Synthetic agendas and corpora with known ground truth.

Agendas are drawn bucket by bucket around a target distribution whose
effective number follows a linear schedule.  The target has a power-law
shape over the active issues, ``p_i ~ (i + 1) ** -s``, with ``s`` solved so
that ``2 ** H(p)`` hits the scheduled value; Dirichlet noise around the
target then gives bucket-to-bucket variation.

Corpora use disjoint planted vocabularies, one per topic, so topic recovery
can be scored exactly.
"""

from __future__ import annotations

import math
import string
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from datetime import date, timedelta

import numpy as np

from .agenda import AttentionSeries, Bucket, IssueCatalog, IssueInfo, Period
from .errors import SpecError
from .ingest import Document, parse_date
from .measures import Distribution, effective_number


@dataclass(frozen=True)
class RegimeSpec:
    """Parameters of a synthetic agenda.

    ``drift`` is the per-bucket change of the target effective number, which
    starts at ``start_effective_number`` (default: half the issues).
    ``punctuations`` are ``(bucket, issue, mass)`` triples: at that bucket the
    given fraction of all attention is moved onto the issue.
    ``entries_exits`` are ``(issue, first_bucket, last_bucket)`` windows
    outside which the issue gets no attention.  ``base_concentration`` may be
    ``inf`` for a noiseless series.
    """

    n_issues: int
    n_buckets: int
    base_concentration: float = 200.0
    drift: float = 0.0
    punctuations: tuple[tuple[int, int, float], ...] = ()
    entries_exits: tuple[tuple[int, int, int], ...] = ()
    seed: int = 0
    start_effective_number: float | None = None
    start: date = date(1985, 1, 1)
    period: Period = Period.MONTHLY

    def __post_init__(self) -> None:
        object.__setattr__(self, "period", Period(self.period))
        object.__setattr__(self, "punctuations", tuple(tuple(p) for p in self.punctuations))
        object.__setattr__(self, "entries_exits", tuple(tuple(e) for e in self.entries_exits))
        object.__setattr__(self, "base_concentration", float(self.base_concentration))
        if self.n_issues < 1 or self.n_buckets < 1:
            raise SpecError("n_issues and n_buckets must be positive")
        if not self.base_concentration > 0:
            raise SpecError("base_concentration must be positive")
        if self.seed < 0:
            raise SpecError("seed must be nonnegative")
        for bucket, issue, mass in self.punctuations:
            if not 0 <= bucket < self.n_buckets:
                raise SpecError(f"punctuation bucket {bucket} outside [0, {self.n_buckets})")
            if not 0 <= issue < self.n_issues:
                raise SpecError(f"punctuation issue {issue} outside [0, {self.n_issues})")
            if not 0 < mass < 1:
                raise SpecError(f"punctuation mass {mass} must be in (0, 1)")
        for issue, first, last in self.entries_exits:
            if not 0 <= issue < self.n_issues:
                raise SpecError(f"entry/exit issue {issue} outside [0, {self.n_issues})")
            if not 0 <= first <= last < self.n_buckets:
                raise SpecError(f"entry/exit window ({first}, {last}) invalid")
        for t in (0, self.n_buckets - 1):
            target = self.target_effective_number(t)
            if target > self.n_issues + 1e-9:
                raise SpecError(
                    f"target effective number {target:.4g} at bucket {t} exceeds "
                    f"{self.n_issues} issues"
                )
            if target < 1 - 1e-9:
                raise SpecError(f"target effective number {target:.4g} at bucket {t} is below 1")

    @property
    def initial_effective_number(self) -> float:
        if self.start_effective_number is None:
            return max(1.0, self.n_issues / 2)
        return float(self.start_effective_number)

    def target_effective_number(self, bucket: int) -> float:
        return self.initial_effective_number + self.drift * bucket

    def active(self, bucket: int) -> np.ndarray:
        mask = np.ones(self.n_issues, dtype=bool)
        for issue, first, last in self.entries_exits:
            mask[issue] = first <= bucket <= last
        return mask


@dataclass
class AgendaTruth:
    """What the generator was asked to produce, bucket by bucket."""

    spec: RegimeSpec
    target_effective_number: list[float]
    targets: np.ndarray  # (buckets, issues) noiseless target shares
    punctuation_buckets: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "spec": regime_to_dict(self.spec),
            "programmed_slope": self.spec.drift,
            "target_effective_number": self.target_effective_number,
            "punctuation_buckets": self.punctuation_buckets,
            "targets": self.targets.tolist(),
        }


def power_law_shares(n: int, exponent: float) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float) ** -exponent
    return w / w.sum()


def power_law_for_effective_number(n: int, target: float) -> np.ndarray:
    """Power-law shares over *n* issues with effective number *target*.

    Targets at or above *n* give the uniform distribution; targets at 1 give
    a point mass on the first issue.
    """
    if target >= n - 1e-12:
        return np.full(n, 1.0 / n)
    if target <= 1 + 1e-12:
        out = np.zeros(n)
        out[0] = 1.0
        return out
    lo, hi = 0.0, 1.0
    while effective_number(power_law_shares(n, hi)) > target:
        hi *= 2
        if hi > 1e6:
            break
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if effective_number(power_law_shares(n, mid)) > target:
            lo = mid
        else:
            hi = mid
    return power_law_shares(n, 0.5 * (lo + hi))


def issue_ids(n: int) -> tuple[str, ...]:
    width = max(2, len(str(n - 1)))
    return tuple(f"issue_{i:0{width}d}" for i in range(n))


def generate_agenda_with_truth(spec: RegimeSpec) -> tuple[AttentionSeries, AgendaTruth]:
    rng = np.random.default_rng(spec.seed)
    ids = issue_ids(spec.n_issues)
    period = spec.period
    first_index = period.index(spec.start)
    punct: dict[int, list[tuple[int, float]]] = {}
    for bucket, issue, mass in spec.punctuations:
        punct.setdefault(bucket, []).append((issue, mass))

    buckets = []
    targets = np.zeros((spec.n_buckets, spec.n_issues))
    scheduled = []
    for t in range(spec.n_buckets):
        mask = spec.active(t)
        active = np.flatnonzero(mask)
        if active.size == 0:
            raise SpecError(f"no active issues at bucket {t}")
        goal = spec.target_effective_number(t)
        scheduled.append(goal)
        target = power_law_for_effective_number(active.size, min(goal, active.size))
        targets[t, active] = target
        if math.isinf(spec.base_concentration):
            sample = target.copy()
        else:
            sample = rng.dirichlet(spec.base_concentration * np.maximum(target, 1e-300))
        shares = np.zeros(spec.n_issues)
        shares[active] = sample
        present = mask.copy()
        for issue, mass in punct.get(t, ()):
            shares *= 1 - mass
            shares[issue] += mass
            present[issue] = True
        dist = Distribution(
            ((ids[i], float(shares[i])) for i in np.flatnonzero(present)), lenient=True
        )
        buckets.append(Bucket(period.from_index(first_index + t), dist, int(present.sum())))

    seen: dict[str, list[date]] = {}
    for b in buckets:
        for issue in b.distribution.issues:
            seen.setdefault(issue, [b.start, b.start])[1] = b.start
    catalog = IssueCatalog(tuple(
        IssueInfo(i, i, seen[i][0], seen[i][1]) for i in ids if i in seen
    ))
    series = AttentionSeries(tuple(buckets), period, catalog)
    truth = AgendaTruth(spec, scheduled, targets, sorted(punct))
    return series, truth


def generate_agenda(spec: RegimeSpec) -> AttentionSeries:
    """Draw a synthetic attention series; deterministic given ``spec.seed``."""
    return generate_agenda_with_truth(spec)[0]


# --- corpora -----------------------------------------------------------------

def _letters(n: int, width: int) -> str:
    chars = []
    for _ in range(width):
        n, r = divmod(n, 26)
        chars.append(string.ascii_lowercase[r])
    if n:
        raise SpecError("too many planted terms for the word encoding")
    return "".join(reversed(chars))


def planted_term(topic: int, j: int) -> str:
    """Pseudo-word ``j`` of planted topic ``topic``; letters only, never a
    stopword, unique across topics."""
    return f"zq{_letters(topic, 2)}{_letters(j, 3)}"


@dataclass
class SyntheticCorpus:
    documents: list[Document]
    mixtures: np.ndarray  # (documents, k) planted topic proportions
    topic_terms: list[list[str]]
    bucket_of: list[int]

    def to_dict(self) -> dict:
        return {
            "doc_ids": [d.doc_id for d in self.documents],
            "buckets": self.bucket_of,
            "mixtures": self.mixtures.tolist(),
            "topic_terms": self.topic_terms,
        }


def generate_corpus(
    k: int,
    vocab_per_topic: int,
    docs_per_bucket: int,
    n_buckets: int,
    doc_length: int,
    topic_schedule: Sequence[Sequence[float]] | np.ndarray,
    seed: int = 0,
    start: date = date(2013, 1, 1),
    period: Period | str = Period.MONTHLY,
) -> SyntheticCorpus:
    """Planted-topic corpus.

    Each document draws its topic mixture from ``Dirichlet(topic_schedule[b])``
    for its bucket ``b``, then draws ``doc_length`` tokens: a topic from the
    mixture, then a term uniformly from that topic's private vocabulary.
    """
    schedule = np.asarray(topic_schedule, dtype=float)
    if k < 1 or vocab_per_topic < 1 or docs_per_bucket < 1 or n_buckets < 1:
        raise SpecError("k, vocab_per_topic, docs_per_bucket and n_buckets must be positive")
    if doc_length < 10:
        raise SpecError("doc_length must be at least 10")
    if schedule.shape != (n_buckets, k):
        raise SpecError(f"topic_schedule must have shape {(n_buckets, k)}, got {schedule.shape}")
    if not (np.isfinite(schedule).all() and (schedule > 0).all()):
        raise SpecError("topic_schedule entries must be positive and finite")
    period = Period(period)
    rng = np.random.default_rng(seed)
    terms = [[planted_term(t, j) for j in range(vocab_per_topic)] for t in range(k)]
    first_index = period.index(start)

    docs, mixtures, bucket_of = [], [], []
    for b in range(n_buckets):
        bucket_start = period.from_index(first_index + b)
        for i in range(docs_per_bucket):
            theta = rng.dirichlet(schedule[b])
            counts = rng.multinomial(doc_length, theta)
            words = []
            for t in range(k):
                words.extend(terms[t][j] for j in rng.integers(0, vocab_per_topic, size=counts[t]))
            words = [words[j] for j in rng.permutation(len(words))]
            stamp = bucket_start + timedelta(days=i % 28)
            docs.append(Document(f"d{b:04d}_{i:04d}", stamp, " ".join(words)))
            mixtures.append(theta)
            bucket_of.append(b)
    return SyntheticCorpus(docs, np.array(mixtures), terms, bucket_of)


def shift_schedule(n_buckets: int, before: Sequence[float], after: Sequence[float], shift_at: int) -> np.ndarray:
    """Schedule that switches from *before* to *after* at bucket *shift_at*."""
    before, after = np.asarray(before, float), np.asarray(after, float)
    return np.array([before if b < shift_at else after for b in range(n_buckets)])


def interpolated_schedule(n_buckets: int, first: Sequence[float], last: Sequence[float]) -> np.ndarray:
    """Schedule moving linearly from *first* to *last*."""
    first, last = np.asarray(first, float), np.asarray(last, float)
    w = np.linspace(0.0, 1.0, n_buckets)[:, None]
    return (1 - w) * first + w * last


# --- spec files --------------------------------------------------------------

def _concentration(value) -> float:
    if value is None or (isinstance(value, str) and value.lower() in ("inf", "infinity")):
        return math.inf
    return float(value)


def regime_from_dict(obj: dict) -> RegimeSpec:
    obj = dict(obj)
    obj.pop("kind", None)
    try:
        if "start" in obj:
            obj["start"] = parse_date(obj["start"])
        if "base_concentration" in obj:
            obj["base_concentration"] = _concentration(obj["base_concentration"])
        return RegimeSpec(**obj)
    except (TypeError, ValueError) as exc:
        raise SpecError(f"invalid regime spec: {exc}") from exc


def regime_to_dict(spec: RegimeSpec) -> dict:
    out = asdict(spec)
    out["kind"] = "agenda"
    out["start"] = spec.start.isoformat()
    out["period"] = spec.period.value
    out["punctuations"] = [list(p) for p in spec.punctuations]
    out["entries_exits"] = [list(e) for e in spec.entries_exits]
    if math.isinf(spec.base_concentration):
        out["base_concentration"] = "inf"
    return out


def corpus_from_dict(obj: dict) -> SyntheticCorpus:
    """Generate a corpus from a spec mapping.

    ``schedule`` is either an explicit ``n_buckets x k`` matrix or a mapping
    with ``before``/``after``/``shift_at`` or ``first``/``last`` vectors.
    """
    try:
        n_buckets, k = int(obj["n_buckets"]), int(obj["k"])
        sched = obj["schedule"]
        if isinstance(sched, dict):
            if "shift_at" in sched:
                schedule = shift_schedule(n_buckets, sched["before"], sched["after"], int(sched["shift_at"]))
            else:
                schedule = interpolated_schedule(n_buckets, sched["first"], sched["last"])
        else:
            schedule = np.asarray(sched, dtype=float)
        return generate_corpus(
            k=k,
            vocab_per_topic=int(obj["vocab_per_topic"]),
            docs_per_bucket=int(obj["docs_per_bucket"]),
            n_buckets=n_buckets,
            doc_length=int(obj["doc_length"]),
            topic_schedule=schedule,
            seed=int(obj.get("seed", 0)),
            start=parse_date(obj.get("start", "2013-01-01")),
            period=obj.get("period", "monthly"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"invalid corpus spec: {exc}") from exc
